from spherekde.cli.main import main

raise SystemExit(main())

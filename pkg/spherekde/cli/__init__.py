from spherekde.cli.main import main

__all__ = ["main"]

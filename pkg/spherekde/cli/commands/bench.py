# spherekde/cli/commands/bench.py
# `spherekde bench`: run a Monte-Carlo config through the bench pipeline.

import logging
import sys

from spherekde.bench.bench_graph import run_bench

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("bench", help="run a benchmark config (mise, lambda-sweep, risk-curves, ...)")
    parser.add_argument("--config", required=True, help="JSON file mirroring BenchConfig")
    parser.add_argument("--output", required=True, help="JSON report path (tables go to a sibling .csv)")
    parser.add_argument("--workers", type=int, default=None, help="parallel replications (capped by SPHEREKDE_THREADS)")
    parser.set_defaults(handler=run)


def run(args) -> int:
    state = run_bench(config_path=args.config, output=args.output, workers=args.workers)
    if state.get("error"):
        print(f"error: {state['error']}", file=sys.stderr)
        return int(state.get("error_code") or 1)
    for path in state.get("written") or []:
        print(path)
    return 0

# spherekde/cli/commands/select.py
# `spherekde select`: choose a bandwidth for a point file with SPCO or CV2.

import logging

from spherekde.kernel import get_kernel
from spherekde.selectors import cv2_select, spco_select
from spherekde.utils.io_utils import read_point_file, write_text_atomic

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("select", help="select a bandwidth for a point file")
    parser.add_argument("--input", required=True, help="CSV of Cartesian coordinates, one point per line")
    parser.add_argument("--output", help="path of the JSON selection report")
    parser.add_argument("--method", choices=["spco", "cv2"], default="spco")
    parser.add_argument("--lambda", dest="lam", type=float, default=1.0, help="SPCO penalty weight (default 1)")
    parser.add_argument("--kernel", default="vonmises")
    parser.add_argument("--spherical", action="store_true", help="input rows are (theta, phi), theta = colatitude")
    parser.add_argument("--seed", type=int, default=None, help="echoed into the report")
    parser.set_defaults(handler=run)


def run(args) -> int:
    logger.info("🚀 select started: method=%s input=%s", args.method, args.input)
    sample = read_point_file(args.input, spherical=args.spherical)
    K = get_kernel(args.kernel)
    if args.method == "spco":
        report = spco_select(sample, K, lam=args.lam, seed=args.seed)
    else:
        report = cv2_select(sample, K, seed=args.seed)

    if args.output:
        write_text_atomic(args.output, report.to_json() + "\n")
        logger.info("💾 Selection report written to %s", args.output)
    logger.info("✅ %s chose h=%.6f over %d bandwidths", report.method, report.chosen_h, len(report.table))
    print(repr(report.chosen_h))
    return 0

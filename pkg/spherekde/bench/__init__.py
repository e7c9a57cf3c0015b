from spherekde.bench.bench_graph import build_bench_graph, run_bench
from spherekde.bench.experiments import lambda_sweep, rate_sweep, reconstruction, risk_curves, run_mise
from spherekde.bench.report_agent import write_report

__all__ = [
    "build_bench_graph",
    "lambda_sweep",
    "rate_sweep",
    "reconstruction",
    "risk_curves",
    "run_bench",
    "run_mise",
    "write_report",
]

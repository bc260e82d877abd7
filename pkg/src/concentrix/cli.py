"""Command-line front end.

Runs named experiments in-process by default, or as a thin client of a
running service when --server is given.  Exit codes: 0 when every bound
verdict passes, 1 on any FAIL verdict, 2 for a usage error, 3 for a
runtime failure (for example an unwritable output path).

Worker threads for the Monte Carlo engine are capped by the
CONCENTRIX_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConcentrixError, UsageError
from .experiments import EXPERIMENTS, ExperimentConfig, ExperimentResult, run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="concentrix",
        description="Evaluate spectral-norm concentration bounds and verify them by Monte Carlo.",
        epilog="Experiment ids: " + ", ".join(sorted(EXPERIMENTS)),
    )
    parser.add_argument("--exp", metavar="ID", help="experiment to run")
    parser.add_argument("--list", action="store_true", help="print experiment ids and exit")
    parser.add_argument("--dim", type=int, help="square/ambient dimension (experiment-specific default)")
    parser.add_argument("--rows", type=int, help="row dimension for rectangular experiments")
    parser.add_argument("--cols", type=int, help="column dimension for rectangular experiments")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials (default 200; 1000 for maxqp; 10000 for khintchine)")
    parser.add_argument("--seed", type=int, default=1, help="random seed (default 1)")
    parser.add_argument("--eps", type=float, help="accuracy target for sampling experiments (default 0.5)")
    parser.add_argument("--t", type=str, default="", help="comma-separated tail thresholds")
    parser.add_argument("--out", type=str, help="report file path (default: no file, summary only)")
    parser.add_argument("--format", choices=("json", "csv"), default="json", help="report format (default json)")
    parser.add_argument("--server", type=str, help="base URL of a running service; run remotely")
    parser.add_argument("--serve", action="store_true", help="start the HTTP service instead of running an experiment")
    parser.add_argument("--host", type=str, default="127.0.0.1", help="bind address for --serve")
    parser.add_argument("--port", type=int, default=8000, help="port for --serve (default 8000)")
    return parser


def parse_args(argv) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if not args.exp:
        raise UsageError("--exp is required (or use --list)")
    try:
        t_grid = tuple(float(x) for x in args.t.split(",") if x.strip())
    except ValueError as exc:
        raise UsageError(f"--t must be a comma-separated list of numbers: {exc}") from exc
    return ExperimentConfig(
        experiment=args.exp,
        dim=args.dim,
        rows=args.rows,
        cols=args.cols,
        trials=args.trials,
        seed=args.seed,
        eps=args.eps,
        t_grid=t_grid,
    )


def _run_remote(args: argparse.Namespace) -> ExperimentResult:
    import httpx

    body = {
        "experiment": args.exp,
        "dim": args.dim,
        "rows": args.rows,
        "cols": args.cols,
        "trials": args.trials,
        "seed": args.seed,
        "eps": args.eps,
        "tGrid": [float(x) for x in args.t.split(",") if x.strip()],
    }
    response = httpx.post(f"{args.server.rstrip('/')}/experiments/run", json=body, timeout=300.0)
    if response.status_code == 404:
        raise UsageError(response.json().get("detail", "unknown experiment"))
    response.raise_for_status()
    data = response.json()
    return ExperimentResult(
        experiment=data["experiment"],
        passed=data["passed"],
        report=data["report"]["report"],
        summary=data["summary"],
    )


def write_report(result: ExperimentResult, out: str | None, fmt: str) -> None:
    if not out:
        return
    text = result.to_json() if fmt == "json" else result.to_csv()
    with open(out, "w") as fh:
        fh.write(text)


def main(argv=None) -> int:
    args = parse_args(sys.argv[1:] if argv is None else argv)

    if args.serve:
        import uvicorn

        from .service import app as service_app

        uvicorn.run(service_app, host=args.host, port=args.port)
        return 0

    if args.list:
        for name in sorted(EXPERIMENTS):
            print(name)
        return 0

    try:
        if args.server:
            result = _run_remote(args)
        else:
            config = config_from_args(args)
            result = run_experiment(config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # any runtime failure maps to exit 3
        print(f"error: {exc}", file=sys.stderr)
        return 3

    try:
        write_report(result, args.out, args.format)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return 3

    for line in result.summary:
        print(line)
    print(f"{result.experiment}: {'PASS' if result.passed else 'FAIL'}")
    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())

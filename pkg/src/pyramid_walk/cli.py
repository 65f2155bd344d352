"""Command-line front end.

::

    pyramid-walk solve configs/triangular.toml --format report
    pyramid-walk validate configs/triangular.toml --out errors.csv
    pyramid-walk sweep-nq configs/triangular.toml --nq 100,200,400
    pyramid-walk check-geometry configs/octagonal.toml
"""
import argparse
import sys

from . import __version__
from .config import load_config
from .errors import PyramidWalkError
from .experiments import (
    best_nq,
    csv_text,
    emit_csv,
    format_report,
    geometry_report,
    run_experiment,
    run_sweep,
)


def _nq_list(text):
    try:
        values = [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad nq list {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("nq values must be positive integers")
    return values


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pyramid-walk",
        description="Monte Carlo solution of Dirichlet problems for the Laplace equation "
                    "inside irregular pyramids.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="experiment configuration (TOML)")
        p.add_argument("--seed", type=_seed, help="override the configured seed")
        p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
        p.add_argument("--out", help="CSV destination (default: output.csv from the config)")
        p.add_argument("--format", choices=("csv", "report"), default="report",
                       help="what to print on stdout")
        p.add_argument("-q", "--quiet", action="store_true", help="no progress lines on stderr")

    common(sub.add_parser("solve", help="piecewise boundary data, table of u_N"))
    common(sub.add_parser("validate", help="point-source boundary data, table of absolute errors"))
    sweep = sub.add_parser("sweep-nq", help="try several quantization numbers per point")
    common(sweep)
    sweep.add_argument("--nq", type=_nq_list, required=True, help="comma-separated nq values")
    geo = sub.add_parser("check-geometry", help="print derived coefficients and run geometry checks")
    geo.add_argument("config")
    geo.add_argument("--seed", type=_seed, default=0)
    return parser


def _progress(args):
    if args.quiet:
        return None

    def show(row):
        extra = "" if row.abs_error is None else f" err={row.abs_error:.2e}"
        print(f"  x={row.point} nq={row.nq} N={row.N}: u_N={row.estimate:.6f} "
              f"se={row.std_error:.1e}{extra} steps={row.mean_steps:.0f} t={row.elapsed:.1f}s",
              file=sys.stderr, flush=True)
    return show


def _emit(table, args, config, extra=""):
    out = args.out or config.output.csv
    if out:
        emit_csv(table, out)
    if args.format == "csv":
        sys.stdout.write(csv_text(table))
    else:
        sys.stdout.write(format_report(table) + extra)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.command == "check-geometry":
            text, ok = geometry_report(config.build_domain(), seed=args.seed)
            sys.stdout.write(text)
            return 0 if ok else 1
        if args.command == "sweep-nq":
            table = run_sweep(config, args.nq, workers=args.threads, seed=args.seed,
                              progress=_progress(args))
            best = best_nq(table)
            extra = "".join(f"best nq for point {i + 1}: {nq}\n" for i, nq in sorted(best.items()))
            _emit(table, args, config, extra)
            return 0
        mode = "piecewise" if args.command == "solve" else "point-source"
        table = run_experiment(config, mode=mode, workers=args.threads, seed=args.seed,
                               progress=_progress(args))
        _emit(table, args, config)
        return 0
    except (PyramidWalkError, OSError) as exc:
        print(f"pyramid-walk: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

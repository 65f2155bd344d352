"""Convergence tables for the bundled example configurations.

Runs both boundary modes on a config and writes one CSV per mode next to
the requested output prefix. The full tables go up to N = 1e6 per point,
which takes hours on one core; ``--max-n`` caps the trajectory counts.

    python scripts/reproduce_tables.py configs/triangular.toml --max-n 1e4 --out results/tri
"""
import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from pyramid_walk.config import load_config
from pyramid_walk.experiments import emit_csv, format_report, run_experiment


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--max-n", type=float, default=None, help="drop N values above this")
    ap.add_argument("--modes", default="point-source,piecewise")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default=None, help="CSV prefix; '<prefix>_<mode>.csv'")
    args = ap.parse_args(argv)

    config = load_config(args.config)
    if args.max_n is not None:
        kept = tuple(n for n in config.solve.N if n <= args.max_n) or (int(args.max_n),)
        config = replace(config, solve=replace(config.solve, N=kept))

    for mode in args.modes.split(","):
        t0 = time.perf_counter()
        table = run_experiment(config, mode=mode, workers=args.threads)
        print(f"# {Path(args.config).stem}, {mode} ({time.perf_counter() - t0:.0f} s)")
        print(format_report(table))
        if args.out:
            path = Path(f"{args.out}_{mode}.csv")
            path.parent.mkdir(parents=True, exist_ok=True)
            emit_csv(table, path)
            print(f"wrote {path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())

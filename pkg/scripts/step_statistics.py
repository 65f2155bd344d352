"""Walk length and increment statistics as the quantization number grows.

Mean steps to exit scale like nq**2 for a fixed start point, which is what
makes large nq expensive. Per-coordinate increment variance should stay at
1 / nq**2.

    python scripts/step_statistics.py configs/octagonal.toml --point 0 0 1 --nq 25,50,100,200
"""
import argparse
import sys

import numpy as np

from pyramid_walk import WalkConfig
from pyramid_walk.config import load_config
from pyramid_walk.estimator import sample_exits
from pyramid_walk.walk import trace_trajectory


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--point", type=float, nargs=3, default=(0.0, 0.0, 0.5))
    ap.add_argument("--nq", default="25,50,100,200")
    ap.add_argument("--trajectories", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    domain = load_config(args.config).build_domain()
    print(f"{'nq':>6} {'mean steps':>12} {'steps/nq^2':>11} {'max steps':>10} "
          f"{'edge hits':>9} {'var*nq^2':>9} {'time s':>7}")
    for nq in (int(v) for v in args.nq.split(",")):
        config = WalkConfig(nq=nq, seed=args.seed)
        batch = sample_exits(domain, args.point, args.trajectories, config)
        pts, _ = trace_trajectory(domain, args.point, config)
        inc = np.diff(pts, axis=0)
        var = inc.var(axis=0, ddof=1).mean() * nq**2 if len(inc) > 1 else float("nan")
        mean = batch.steps.mean()
        print(f"{nq:>6} {mean:>12.1f} {mean / nq**2:>11.4f} {batch.steps.max():>10} "
              f"{int(np.sum(batch.codes > domain.n + 1)):>9} {var:>9.4f} {batch.elapsed:>7.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Monte Carlo estimate of the harmonic solution at an interior point."""
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import walk
from .boundary import PointSource, exact_value
from .errors import MaxStepsExceeded, SpecMismatch
from .geometry import STEP_EXIT
from .rng import trajectory_generator


@dataclass(frozen=True)
class Estimate:
    mean: float
    n_samples: int
    sample_std: float
    std_error: float
    edge_hits: int
    mean_steps: float
    elapsed: float
    min_value: float = math.nan
    max_value: float = math.nan
    spec: object = None


@dataclass
class ExitBatch:
    """Raw exits of trajectories ``first .. first + len(codes) - 1``."""

    points: np.ndarray
    codes: np.ndarray
    steps: np.ndarray
    status: np.ndarray
    elapsed: float
    first: int = 0

    def __len__(self):
        return len(self.codes)


def _run_chunk(domain, start, config, lo, hi, arrays, base):
    # Trajectories lo..hi-1 land in rows lo-base..hi-base-1.
    points, codes, steps, status = arrays
    for i in range(lo, hi):
        st, y0, y1, y2, code, _, k = walk.walk_kernel(
            trajectory_generator(config.seed, i), domain.normals, domain.offsets,
            domain.vertices3, domain.h, start[0], start[1], start[2],
            config.nq, config.max_steps, domain.eps_surf, domain.eps_edge)
        row = i - base
        points[row, 0] = y0
        points[row, 1] = y1
        points[row, 2] = y2
        codes[row] = code
        steps[row] = k
        status[row] = st


def sample_exits(domain, x, N, config, workers=1, first=0):
    """Run ``N`` trajectories from ``x`` and collect their exits.

    Trajectory ``i`` always draws from the stream keyed by
    ``(config.seed, i)``, so the result does not depend on ``workers``.
    """
    domain = config.apply(domain)
    start = tuple(float(v) for v in x)
    walk._check_start(domain, start)
    N = int(N)
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    out = (np.empty((N, 3)), np.zeros(N, dtype=np.int64), np.zeros(N, dtype=np.int64),
           np.zeros(N, dtype=np.int8))
    t0 = time.perf_counter()
    workers = max(1, int(workers))
    if workers == 1:
        _run_chunk(domain, start, config, first, first + N, out, first)
    else:
        n_chunks = min(N, 8 * workers)
        bounds = np.linspace(first, first + N, n_chunks + 1).astype(np.int64)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            jobs = [pool.submit(_run_chunk, domain, start, config, int(a), int(b), out, first)
                    for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
            for job in jobs:
                job.result()
    elapsed = time.perf_counter() - t0
    batch = ExitBatch(out[0], out[1], out[2], out[3], elapsed, first)
    bad = batch.status != STEP_EXIT
    if np.any(bad):
        n_cap = int(np.sum(batch.status == walk.WALK_MAX_STEPS))
        idx = int(np.flatnonzero(bad)[0]) + first
        if n_cap:
            raise MaxStepsExceeded(
                f"{n_cap} of {N} trajectories exceeded max_steps={config.max_steps} "
                f"(nq={config.nq}); first at trajectory {idx}")
        walk._raise_for_status(int(batch.status[idx - first]), f"trajectory {idx}")
    return batch


def summarize(values, batch, n_edges_from, spec=None, elapsed=None):
    """Estimate from per-trajectory boundary values.

    The sum is exactly rounded, so the mean does not depend on how the
    trajectories were split over workers.
    """
    values = np.asarray(values, dtype=float)
    N = len(values)
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        # fsum(...) / N rounds twice; identical samples must give the value itself.
        mean = lo
    else:
        mean = min(max(math.fsum(values) / N, lo), hi)
    if N > 1:
        var = math.fsum((values - mean) ** 2) / (N - 1)
        std = math.sqrt(var)
    else:
        std = 0.0
    return Estimate(
        mean=mean,
        n_samples=N,
        sample_std=std,
        std_error=std / math.sqrt(N),
        edge_hits=int(np.sum(batch.codes >= n_edges_from)),
        mean_steps=math.fsum(batch.steps) / N,
        elapsed=batch.elapsed if elapsed is None else elapsed,
        min_value=lo,
        max_value=hi,
        spec=spec,
    )


def estimate_from_batch(domain, spec, batch, elapsed=None):
    values = spec.evaluate_many(batch.points, batch.codes, domain.n)
    return summarize(values, batch, domain.n + 2, spec=spec, elapsed=elapsed)


def solve_at(domain, spec, x, N, config, workers=1):
    """Mean boundary value over ``N`` exits of walks started at ``x``.

    Parameters
    ----------
    domain : PyramidDomain
    spec : PiecewiseConstant, PiecewiseFunction or PointSource
    x : 3-sequence
        Strictly interior evaluation point.
    N : int
        Number of trajectories.
    config : WalkConfig
    workers : int
        Threads sharing the trajectories; has no effect on the result.

    Returns
    -------
    Estimate
    """
    spec.validate(domain)
    batch = sample_exits(domain, x, N, config, workers=workers)
    return estimate_from_batch(domain, spec, batch)


def error_vs_exact(est, x, source):
    """Absolute error of a point-source estimate against ``1 / |x - source|``."""
    if est.spec is not None:
        if not isinstance(est.spec, PointSource):
            raise SpecMismatch("estimate was not produced with point-source boundary data")
        if est.spec.source != tuple(float(v) for v in source):
            raise SpecMismatch(f"estimate used source {est.spec.source}, not {tuple(source)}")
    return abs(est.mean - exact_value(x, source))

"""Convergence tables over evaluation points and trajectory counts."""
import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import PointSource
from .estimator import ExitBatch, estimate_from_batch, sample_exits
from .geometry import beta_inside, classify_points, plane_residual, intersect_step
from .walk import WalkConfig

CSV_HEADER = ["point_x1", "point_x2", "point_x3", "nq", "N", "estimate", "std_error",
              "exact", "abs_error", "mean_steps", "elapsed_s"]


@dataclass(frozen=True)
class ResultRow:
    point_index: int
    point: tuple
    nq: int
    N: int
    estimate: float
    std_error: float
    mean_steps: float
    elapsed: float
    exact: float = None
    abs_error: float = None
    edge_hits: int = 0


@dataclass
class ResultTable:
    mode: str
    rows: list = field(default_factory=list)

    def sort(self):
        self.rows.sort(key=lambda r: (r.point_index, r.nq, r.N))

    def points(self):
        seen = {}
        for r in self.rows:
            seen.setdefault(r.point_index, r.point)
        return [seen[i] for i in sorted(seen)]


def _concat(parts):
    return ExitBatch(
        np.concatenate([p.points for p in parts]),
        np.concatenate([p.codes for p in parts]),
        np.concatenate([p.steps for p in parts]),
        np.concatenate([p.status for p in parts]),
        sum(p.elapsed for p in parts),
    )


def convergence_rows(domain, spec, point_index, x, nq, n_values, seed, max_steps, workers=1):
    """Rows for one point, one per ``N``, sharing trajectories.

    The estimate for ``N`` uses trajectories ``0 .. N-1`` and is therefore
    identical to an independent :func:`solve_at` call with the same seed.
    Elapsed times are cumulative.
    """
    config = WalkConfig(nq=nq, max_steps=max_steps, seed=seed)
    exact = spec.exact(x) if isinstance(spec, PointSource) else None
    parts = []
    done = 0
    rows = []
    for N in sorted(n_values):
        if N > done:
            parts.append(sample_exits(domain, x, N - done, config, workers=workers, first=done))
            done = N
        batch = _concat(parts)
        sub = ExitBatch(batch.points[:N], batch.codes[:N], batch.steps[:N], batch.status[:N],
                        batch.elapsed)
        est = estimate_from_batch(domain, spec, sub)
        rows.append(ResultRow(
            point_index=point_index, point=tuple(x), nq=nq, N=N,
            estimate=est.mean, std_error=est.std_error, mean_steps=est.mean_steps,
            elapsed=est.elapsed, exact=exact,
            abs_error=None if exact is None else abs(est.mean - exact),
            edge_hits=est.edge_hits,
        ))
    return rows


def run_experiment(config, mode=None, workers=1, seed=None, progress=None):
    """Evaluate every configured point at every configured ``N``.

    Parameters
    ----------
    config : ExperimentConfig
    mode : {"piecewise", "point-source"}, optional
        Overrides the configured boundary mode.
    workers : int
    seed : int, optional
        Overrides the configured seed.
    progress : callable, optional
        Called with each finished :class:`ResultRow`.
    """
    mode = mode or config.boundary.mode
    domain = config.build_domain()
    spec = config.boundary_spec(mode)
    spec.validate(domain)
    seed = config.solve.seed if seed is None else seed
    table = ResultTable(mode)
    for i, (x, nq) in enumerate(zip(config.solve.points, config.solve.nq)):
        for row in convergence_rows(domain, spec, i, x, nq, config.solve.N, seed,
                                    config.solve.max_steps, workers):
            table.rows.append(row)
            if progress:
                progress(row)
    table.sort()
    return table


def run_sweep(config, nq_values, mode=None, workers=1, seed=None, progress=None):
    """Same as :func:`run_experiment` but with every point tried at every ``nq``."""
    mode = mode or ("point-source" if config.boundary.source is not None else config.boundary.mode)
    domain = config.build_domain()
    spec = config.boundary_spec(mode)
    spec.validate(domain)
    seed = config.solve.seed if seed is None else seed
    table = ResultTable(mode)
    for i, x in enumerate(config.solve.points):
        for nq in nq_values:
            for row in convergence_rows(domain, spec, i, x, nq, config.solve.N, seed,
                                        config.solve.max_steps, workers):
                table.rows.append(row)
                if progress:
                    progress(row)
    table.sort()
    return table


def best_nq(table):
    """Per point, the ``nq`` with the smallest error at the largest ``N``."""
    out = {}
    for r in table.rows:
        if r.abs_error is None:
            continue
        cur = out.get(r.point_index)
        if cur is None or r.N > cur.N or (r.N == cur.N and r.abs_error < cur.abs_error):
            out[r.point_index] = r
    return {i: r.nq for i, r in out.items()}


def _fmt(value):
    return "" if value is None else repr(float(value))


def write_csv(table, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in table.rows:
        writer.writerow([
            _fmt(r.point[0]), _fmt(r.point[1]), _fmt(r.point[2]), r.nq, r.N,
            _fmt(r.estimate), _fmt(r.std_error), _fmt(r.exact), _fmt(r.abs_error),
            _fmt(r.mean_steps), _fmt(r.elapsed),
        ])


def emit_csv(table, destination):
    """Write ``table`` as CSV to the file path ``destination``."""
    with open(destination, "w", newline="", encoding="utf-8") as fh:
        write_csv(table, fh)


def csv_text(table):
    buf = io.StringIO()
    write_csv(table, buf)
    return buf.getvalue()


def _pt(p):
    return "(" + ",".join(f"{v:g}" for v in p) + ")"


def format_report(table):
    """Text table: one row per ``N``, one column per (point, nq)."""
    columns = sorted({(r.point_index, r.nq) for r in table.rows})
    points = dict((r.point_index, r.point) for r in table.rows)
    n_values = sorted({r.N for r in table.rows})
    cell = {(r.point_index, r.nq, r.N): r for r in table.rows}
    errors = table.mode == "point-source"
    width = 14
    lines = []
    lines.append("x".ljust(8) + "".join(_pt(points[i]).rjust(width) for i, _ in columns))
    label = "err,nq=" if errors else "u_N,nq="
    lines.append("N".ljust(8) + "".join(f"{label}{nq}".rjust(width) for _, nq in columns))
    for N in n_values:
        parts = []
        for i, nq in columns:
            r = cell.get((i, nq, N))
            if r is None:
                parts.append("".rjust(width))
            elif errors:
                parts.append(f"{r.abs_error:.2E}".rjust(width))
            else:
                parts.append(f"{r.estimate:.5f}".rjust(width))
        lines.append(f"{N:.0E}".ljust(8) + "".join(parts))
    lines.append("")
    lines.append("std errors at largest N: " + ", ".join(
        f"{_pt(points[i])}@{nq}: {cell[(i, nq, n_values[-1])].std_error:.2E}"
        for i, nq in columns if (i, nq, n_values[-1]) in cell))
    return "\n".join(lines) + "\n"


def geometry_report(domain, n_random=20000, seed=0):
    """Derived coefficients plus invariant checks.

    Returns ``(text, ok)``.
    """
    lines = [f"n = {domain.n}, h = {domain.h:g}, diameter = {domain.diameter:.6g}"]
    lines.append(" m   k_m          c_m          d_m          alpha_m      face plane (A, B, C, D)")
    for m in range(domain.n):
        k, c = domain.edge_slopes[m]
        plane = ", ".join(f"{v:g}" for v in domain.face_planes[m])
        lines.append(f"{m + 1:2d}   {k:<12.6g} {c:<12.6g} {domain.base_distances[m]:<12.6f} "
                     f"{domain.inclination_angles[m]:<12.6f} ({plane})")
    checks = []

    scale = np.max(np.abs(domain.face_planes), axis=1)
    worst = 0.0
    n = domain.n
    for m in range(n):
        plane = domain.face_planes[m]
        for v in (domain.apex, domain.vertices3[m], domain.vertices3[(m + 1) % n]):
            worst = max(worst, abs(plane[:3] @ v + plane[3]) / scale[m])
    checks.append(("face planes pass through apex and base vertices", worst <= 1e-12, f"{worst:.2e}"))

    tan_err = np.max(np.abs(np.tan(domain.inclination_angles) * domain.base_distances - domain.h))
    checks.append(("tan(alpha_m) * d_m = h", tan_err <= 1e-12 * domain.h, f"{tan_err:.2e}"))

    line_err = 0.0
    for m in range(n):
        k, c = domain.edge_slopes[m]
        if math.isnan(k):
            continue
        p, q, r = domain.edge_lines[m]
        # p x + q (k x + c) + r must vanish for every x.
        line_err = max(line_err, abs(p + q * k), abs(q * c + r))
    checks.append(("slope form matches implicit edge lines", line_err <= 1e-12, f"{line_err:.2e}"))

    rng = np.random.default_rng(seed)
    lo = np.append(domain.base_vertices.min(axis=0), 0.0)
    hi = np.append(domain.base_vertices.max(axis=0), domain.h)
    pts = rng.uniform(lo, hi, size=(n_random, 3))
    # Inclination-angle test on points projecting into the base polygon.
    margin = domain.edge_lines[:, 0] * pts[:, :1] + domain.edge_lines[:, 1] * pts[:, 1:2] + domain.edge_lines[:, 2]
    interior = np.all(margin < -1e-9, axis=1) & (pts[:, 2] > 1e-9) & (pts[:, 2] < domain.h - 1e-9)
    cls = classify_points(domain, pts[interior])
    beta = beta_inside(domain, pts[interior])
    disagree = int(np.sum((cls == 0) != beta))
    checks.append(("angle test agrees with half-space test", disagree == 0,
                   f"{disagree} of {int(interior.sum())}"))

    residual = 0.0
    inside = pts[classify_points(domain, pts) == 0][:2000]
    directions = rng.normal(size=(len(inside), 3))
    directions *= 2 * domain.diameter / np.linalg.norm(directions, axis=1)[:, None]
    for x, dx in zip(inside, directions):
        event = intersect_step(domain, x, x + dx)
        residual = max(residual, plane_residual(domain, event))
    checks.append(("exit points lie on their face", residual <= 1e-9, f"{residual:.2e}"))

    ok = all(c[1] for c in checks)
    lines.append("")
    for name, passed, detail in checks:
        lines.append(f"[{'PASS' if passed else 'FAIL'}] {name} ({detail})")
    return "\n".join(lines) + "\n", ok


"""Quantized Wiener trajectories run to their first exit from the pyramid."""
from dataclasses import dataclass

import numba
import numpy as np

from . import geometry
from .errors import DegenerateDirection, MaxStepsExceeded, NoCandidateCrossing, StartNotInside
from .geometry import STEP_DEGENERATE, STEP_EXIT, STEP_INSIDE, STEP_NO_CANDIDATE, ExitEvent, RegionLabel
from .rng import NormalStream

# Batch status codes beyond the geometry ones.
WALK_MAX_STEPS = 4

DEFAULT_MAX_STEPS = 10_000_000


@dataclass(frozen=True)
class WalkConfig:
    """Walk parameters.

    ``nq`` is the quantization number: each coordinate moves by a standard
    normal deviate divided by ``nq`` per step. Tolerances left as ``None``
    fall back to the domain's defaults.
    """

    nq: int
    max_steps: int = DEFAULT_MAX_STEPS
    seed: int = 0
    eps_edge: float = None
    eps_surf: float = None

    def __post_init__(self):
        if int(self.nq) != self.nq or self.nq < 1:
            raise ValueError(f"nq must be a positive integer, got {self.nq}")
        if int(self.max_steps) != self.max_steps or self.max_steps < 1:
            raise ValueError(f"max_steps must be a positive integer, got {self.max_steps}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def apply(self, domain):
        if self.eps_edge is None and self.eps_surf is None:
            return domain
        return domain.with_tolerances(eps_surf=self.eps_surf, eps_edge=self.eps_edge)


def wiener_step(x_prev, deviates, nq):
    """One step of the quantized Wiener process: ``x + deviates / nq``."""
    return (x_prev[0] + deviates[0] / nq,
            x_prev[1] + deviates[1] / nq,
            x_prev[2] + deviates[2] / nq)


@numba.njit(cache=True, nogil=True)
def walk_kernel(gen, normals, offsets, vertices3, h, s0, s1, s2, nq, max_steps,
                eps_surf, eps_edge):
    """Compiled trajectory loop; same arithmetic as the step-by-step replay.

    ``gen`` is the trajectory's ``numpy.random.Generator``. Returns
    ``(status, y0, y1, y2, region_code, theta, steps)``.
    """
    x0 = s0
    x1 = s1
    x2 = s2
    for k in range(max_steps):
        n0 = x0 + gen.standard_normal() / nq
        n1 = x1 + gen.standard_normal() / nq
        n2 = x2 + gen.standard_normal() / nq
        if geometry.locate(normals, offsets, h, n0, n1, n2, eps_surf) == 0:
            x0 = n0
            x1 = n1
            x2 = n2
            continue
        status, y0, y1, y2, code, theta = geometry.exit_kernel(
            normals, offsets, vertices3, h, x0, x1, x2, n0, n1, n2, eps_surf, eps_edge)
        return status, y0, y1, y2, code, theta, k + 1
    return WALK_MAX_STEPS, x0, x1, x2, 0, 0.0, max_steps


def _raise_for_status(status, where):
    if status == STEP_NO_CANDIDATE:
        raise NoCandidateCrossing(f"{where}: step left the pyramid through no face")
    if status == STEP_DEGENERATE:
        raise DegenerateDirection(f"{where}: step parallel to the only crossed plane")
    if status == WALK_MAX_STEPS:
        raise MaxStepsExceeded(f"{where}: no exit within max_steps")


def _check_start(domain, start):
    if not geometry.classify_point(domain, start).inside:
        raise StartNotInside(f"start point {tuple(start)} is not strictly inside the pyramid")


def run_trajectory(domain, start, config, stream=None, trajectory=0):
    """Walk from ``start`` until the first crossing of the surface.

    Parameters
    ----------
    domain : PyramidDomain
    start : 3-sequence
        Strictly interior starting point.
    config : WalkConfig
    stream : object with ``next_deviates() -> (g1, g2, g3)``, optional
        Source of normal deviates. Defaults to
        ``NormalStream(config.seed, trajectory)``, which runs in the
        compiled kernel. Streams with only ``next_deviates()`` are replayed
        step by step.

    Returns
    -------
    ExitEvent
    """
    domain = config.apply(domain)
    start = tuple(float(v) for v in start)
    _check_start(domain, start)
    if stream is None:
        stream = NormalStream(config.seed, trajectory)
    if isinstance(stream, NormalStream):
        st, y0, y1, y2, code, theta, k = walk_kernel(
            stream.generator, domain.normals, domain.offsets, domain.vertices3, domain.h,
            start[0], start[1], start[2], config.nq, config.max_steps,
            domain.eps_surf, domain.eps_edge)
        if st != STEP_EXIT:
            _raise_for_status(st, f"trajectory {stream.trajectory}")
        return ExitEvent((y0, y1, y2), RegionLabel.from_code(code, domain.n), theta, k)

    x = start
    for k in range(config.max_steps):
        x_next = wiener_step(x, stream.next_deviates(), config.nq)
        event = geometry.intersect_step(domain, x, x_next, steps=k + 1)
        if event is not None:
            return event
        x = x_next
    raise MaxStepsExceeded(f"no exit within {config.max_steps} steps")


def trace_trajectory(domain, start, config, trajectory=0, stream=None):
    """Accepted points of one trajectory, followed by its exit event.

    Returns ``(points, event)`` with ``points`` of shape ``(steps, 3)``
    holding the start and every interior point visited.
    """
    domain = config.apply(domain)
    start = tuple(float(v) for v in start)
    _check_start(domain, start)
    stream = stream or NormalStream(config.seed, trajectory)
    pts = [start]
    x = start
    for k in range(config.max_steps):
        x_next = wiener_step(x, stream.next_deviates(), config.nq)
        event = geometry.intersect_step(domain, x, x_next, steps=k + 1)
        if event is not None:
            return np.array(pts), event
        pts.append(x_next)
        x = x_next
    raise MaxStepsExceeded(f"no exit within {config.max_steps} steps")

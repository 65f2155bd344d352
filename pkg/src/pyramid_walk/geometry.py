"""Analytic description of an irregular n-sided pyramid.

The pyramid has its apex at ``(0, 0, h)`` and its convex base polygon in the
plane ``x3 = 0``, listed counter-clockwise around the origin. Faces are
numbered ``1..n`` (face ``m`` spans ``A_m, A_{m+1}`` and the apex), the base
is region ``n + 1``. Edges ``1..n`` are base edges ``A_k -> A_{k+1}`` and
edges ``n+1..2n`` are lateral edges ``M -> A_{k-n}``.

Inside/outside decisions use signed distances to the ``n + 1`` bounding
planes (negative inside). The inclination-angle test is kept as
:func:`beta_inside` for cross-checking.
"""
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import (
    ClockwiseOrder,
    DegenerateDirection,
    DegenerateEdge,
    GeometryError,
    NoCandidateCrossing,
    NonConvexBase,
    NonPositiveHeight,
    OriginOutsideBase,
)

# Kernel status codes.
STEP_INSIDE = 0
STEP_EXIT = 1
STEP_NO_CANDIDATE = 2
STEP_DEGENERATE = 3


@dataclass(frozen=True)
class RegionLabel:
    """Part of the pyramid surface: a lateral face, the base, or an edge."""

    kind: str
    index: int = 0

    @classmethod
    def face(cls, m):
        return cls("face", m)

    @classmethod
    def base(cls):
        return cls("base", 0)

    @classmethod
    def edge(cls, k):
        return cls("edge", k)

    @property
    def is_edge(self):
        return self.kind == "edge"

    def code(self, n):
        """Integer code used by the compiled kernels."""
        if self.kind == "face":
            return self.index
        if self.kind == "base":
            return n + 1
        return n + 1 + self.index

    @classmethod
    def from_code(cls, code, n):
        code = int(code)
        if 1 <= code <= n:
            return cls.face(code)
        if code == n + 1:
            return cls.base()
        if n + 2 <= code <= 3 * n + 1:
            return cls.edge(code - n - 1)
        raise ValueError(f"region code {code} out of range for n={n}")

    def __str__(self):
        if self.kind == "base":
            return "Base"
        return f"{'LateralFace' if self.kind == 'face' else 'Edge'}({self.index})"


@dataclass(frozen=True)
class Location:
    """Result of :func:`classify_point`."""

    kind: str
    region: RegionLabel = None

    @property
    def inside(self):
        return self.kind == "inside"

    @property
    def outside(self):
        return self.kind == "outside"

    @property
    def on_surface(self):
        return self.kind == "surface"


INSIDE = Location("inside")
OUTSIDE = Location("outside")


def on_surface(region):
    return Location("surface", region)


@dataclass(frozen=True)
class ExitEvent:
    """First crossing of a trajectory with the pyramid surface.

    ``theta`` is the fraction of the final step at which the crossing occurs
    (1 when the step endpoint itself is on the surface).
    """

    point: tuple
    region: RegionLabel
    theta: float
    steps: int


@dataclass(frozen=True, eq=False)
class PyramidDomain:
    h: float
    base_vertices: np.ndarray
    # (p, q, r) with p*x1 + q*x2 + r = 0, p^2 + q^2 = 1, negative at the origin.
    edge_lines: np.ndarray
    # (k, c) of x2 = k*x1 + c; NaN for edges parallel to the x2 axis.
    edge_slopes: np.ndarray
    # Lateral face planes (A, B, C, D) in the raw three-point form,
    # oriented so the base centroid gives a negative value.
    face_planes: np.ndarray
    base_distances: np.ndarray
    inclination_angles: np.ndarray
    # Unit outward normals and offsets: signed distance = normal . x - offset.
    normals: np.ndarray
    offsets: np.ndarray
    diameter: float
    eps_surf: float
    eps_edge: float
    vertices3: np.ndarray = field(repr=False)

    @property
    def n(self):
        return len(self.base_vertices)

    @property
    def apex(self):
        return np.array([0.0, 0.0, self.h])

    def signed_distances(self, x):
        """Signed distances of ``x`` to the n lateral planes and the base."""
        x = np.asarray(x, dtype=float)
        lateral = self.normals @ x - self.offsets
        return np.append(lateral, -x[2])

    def with_tolerances(self, eps_surf=None, eps_edge=None):
        return build_domain(
            self.h, self.base_vertices,
            eps_surf=self.eps_surf if eps_surf is None else eps_surf,
            eps_edge=self.eps_edge if eps_edge is None else eps_edge,
        )


def build_domain(h, base_vertices, eps_surf=None, eps_edge=None):
    """Build a :class:`PyramidDomain` from its height and base vertices.

    Parameters
    ----------
    h : float
        Height of the apex above the base plane.
    base_vertices : sequence of (a, b)
        Counter-clockwise vertices of a convex polygon strictly containing
        the origin.
    eps_surf, eps_edge : float, optional
        Surface and edge attribution tolerances. Default to ``1e-12`` and
        ``1e-9`` times the domain diameter.
    """
    h = float(h)
    if not h > 0.0 or not math.isfinite(h):
        raise NonPositiveHeight(f"height must be positive, got {h}")
    verts = np.array(base_vertices, dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 2:
        raise GeometryError("base vertices must be a list of planar points")
    n = len(verts)
    if n < 3:
        raise GeometryError(f"need at least 3 base vertices, got {n}")
    nxt = np.roll(verts, -1, axis=0)
    edges = nxt - verts
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    if np.any(lengths == 0.0):
        m = int(np.argmin(lengths))
        raise DegenerateEdge(f"vertices {m + 1} and {(m + 1) % n + 1} coincide")

    area2 = float(np.sum(verts[:, 0] * nxt[:, 1] - nxt[:, 0] * verts[:, 1]))
    if area2 < 0.0:
        raise ClockwiseOrder("base vertices must be listed counter-clockwise")
    turns = edges[:, 0] * np.roll(edges[:, 1], -1) - edges[:, 1] * np.roll(edges[:, 0], -1)
    turn_angles = np.arctan2(turns, np.einsum("ij,ij->i", edges, np.roll(edges, -1, axis=0)))
    if np.any(turns <= 0.0) or not math.isclose(turn_angles.sum(), 2 * math.pi, rel_tol=1e-9):
        raise NonConvexBase("base polygon must be strictly convex")

    p = edges[:, 1] / lengths
    q = -edges[:, 0] / lengths
    d = p * verts[:, 0] + q * verts[:, 1]
    if np.any(d <= 0.0):
        raise OriginOutsideBase("the origin must lie strictly inside the base polygon")
    edge_lines = np.column_stack([p, q, -d])

    a, b = verts[:, 0], verts[:, 1]
    a1, b1 = nxt[:, 0], nxt[:, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        vertical = a == a1
        k = np.where(vertical, np.nan, (b - b1) / (a - a1))
        c = np.where(vertical, np.nan, (a * b1 - b * a1) / (a - a1))
    edge_slopes = np.column_stack([k, c])

    cross = a * b1 - a1 * b
    planes = np.column_stack([h * (b1 - b), -h * (a1 - a), cross, -cross * h])
    centroid = verts.mean(axis=0)
    at_centroid = planes[:, 0] * centroid[0] + planes[:, 1] * centroid[1] + planes[:, 3]
    planes *= np.where(at_centroid > 0.0, -1.0, 1.0)[:, None]

    raw = np.column_stack([h * p, h * q, d])
    norm = np.linalg.norm(raw, axis=1)
    normals = raw / norm[:, None]
    offsets = d * h / norm

    alphas = np.arctan(h / d)
    pts = np.vstack([verts, [[0.0, 0.0]]])
    span = np.ptp(pts, axis=0)
    diameter = float(math.sqrt(span[0] ** 2 + span[1] ** 2 + h * h))
    vertices3 = np.vstack([np.column_stack([verts, np.zeros(n)]), [[0.0, 0.0, h]]])
    return PyramidDomain(
        h=h,
        base_vertices=verts,
        edge_lines=edge_lines,
        edge_slopes=edge_slopes,
        face_planes=planes,
        base_distances=d,
        inclination_angles=alphas,
        normals=normals,
        offsets=offsets,
        diameter=diameter,
        eps_surf=1e-12 * diameter if eps_surf is None else float(eps_surf),
        eps_edge=1e-9 * diameter if eps_edge is None else float(eps_edge),
        vertices3=vertices3,
    )


# ---------------------------------------------------------------------------
# compiled kernels

@numba.njit(cache=True, nogil=True)
def _segment_distance(x0, x1, x2, p, q):
    # Distance from point x to segment [p, q] in 3D.
    d0 = q[0] - p[0]
    d1 = q[1] - p[1]
    d2 = q[2] - p[2]
    w0 = x0 - p[0]
    w1 = x1 - p[1]
    w2 = x2 - p[2]
    dd = d0 * d0 + d1 * d1 + d2 * d2
    t = (w0 * d0 + w1 * d1 + w2 * d2) / dd
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    e0 = w0 - t * d0
    e1 = w1 - t * d1
    e2 = w2 - t * d2
    return math.sqrt(e0 * e0 + e1 * e1 + e2 * e2)


@numba.njit(cache=True, nogil=True)
def _nearest_edge(vertices3, x0, x1, x2, eps_edge):
    # Returns the 1-based edge index within eps_edge of x, or 0.
    n = vertices3.shape[0] - 1
    apex = vertices3[n]
    best = eps_edge
    best_k = 0
    for j in range(n):
        dist = _segment_distance(x0, x1, x2, vertices3[j], vertices3[(j + 1) % n])
        if dist <= best:
            best = dist
            best_k = j + 1
    for j in range(n):
        dist = _segment_distance(x0, x1, x2, apex, vertices3[j])
        if dist <= best:
            best = dist
            best_k = n + j + 1
    return best_k


@numba.njit(cache=True, nogil=True)
def _surface_code(normals, offsets, vertices3, x0, x1, x2, face, eps_edge):
    # Region code of a surface point; `face` is the 0-based plane it lies on
    # (n for the base), or -1 to pick the closest plane.
    n = normals.shape[0]
    k = _nearest_edge(vertices3, x0, x1, x2, eps_edge)
    if k > 0:
        return n + 1 + k
    if face < 0:
        best = -x2
        face = n
        for m in range(n):
            s = normals[m, 0] * x0 + normals[m, 1] * x1 + normals[m, 2] * x2 - offsets[m]
            if s > best:
                best = s
                face = m
    return face + 1


@numba.njit(cache=True, nogil=True, inline="always")
def locate(normals, offsets, h, x0, x1, x2, eps_surf):
    # -1 outside, 0 inside, 1 on the surface (within eps_surf).
    n = normals.shape[0]
    smax = -x2
    for m in range(n):
        s = normals[m, 0] * x0 + normals[m, 1] * x1 + normals[m, 2] * x2 - offsets[m]
        if s > smax:
            smax = s
    if x2 - h > smax:
        smax = x2 - h
    if smax < -eps_surf:
        return 0
    if smax <= eps_surf:
        return 1
    return -1


@numba.njit(cache=True, nogil=True)
def locate_many(normals, offsets, h, points, eps_surf):
    out = np.empty(points.shape[0], dtype=np.int8)
    for i in range(points.shape[0]):
        out[i] = locate(normals, offsets, h, points[i, 0], points[i, 1], points[i, 2], eps_surf)
    return out


@numba.njit(cache=True, nogil=True)
def exit_kernel(normals, offsets, vertices3, h, p0, p1, p2, q0, q1, q2, eps_surf, eps_edge):
    """Crossing of the step ``p -> q`` with the surface.

    Returns ``(status, y0, y1, y2, region_code, theta)``. ``p`` must be
    strictly inside.
    """
    n = normals.shape[0]
    loc = locate(normals, offsets, h, q0, q1, q2, eps_surf)
    if loc == 0:
        return STEP_INSIDE, q0, q1, q2, 0, 0.0
    if loc == 1:
        code = _surface_code(normals, offsets, vertices3, q0, q1, q2, -1, eps_edge)
        return STEP_EXIT, q0, q1, q2, code, 1.0

    d0 = q0 - p0
    d1 = q1 - p1
    d2 = q2 - p2
    best_theta = np.inf
    best_plane = -1
    degenerate = False
    for m in range(n + 1):
        if m < n:
            s_next = normals[m, 0] * q0 + normals[m, 1] * q1 + normals[m, 2] * q2 - offsets[m]
            if s_next <= 0.0:
                continue
            # A* theta = B*, with the plane scaled to a unit normal.
            a_star = normals[m, 0] * d0 + normals[m, 1] * d1 + normals[m, 2] * d2
            b_star = offsets[m] - (normals[m, 0] * p0 + normals[m, 1] * p1 + normals[m, 2] * p2)
        else:
            if q2 >= 0.0:
                continue
            a_star = -d2
            b_star = p2
        if a_star <= 0.0:
            degenerate = True
            continue
        theta = b_star / a_star
        if theta < 0.0:
            theta = 0.0
        elif theta > 1.0:
            theta = 1.0
        if theta >= best_theta:
            continue
        y0 = p0 + theta * d0
        y1 = p1 + theta * d1
        y2 = p2 + theta * d2
        # The hit must lie in the closed face (or base polygon).
        ok = y2 >= -eps_edge or m == n
        if ok:
            for j in range(n):
                if j == m:
                    continue
                s = normals[j, 0] * y0 + normals[j, 1] * y1 + normals[j, 2] * y2 - offsets[j]
                if s > eps_edge:
                    ok = False
                    break
        if ok:
            best_theta = theta
            best_plane = m
    if best_plane < 0:
        if degenerate:
            return STEP_DEGENERATE, q0, q1, q2, 0, 0.0
        return STEP_NO_CANDIDATE, q0, q1, q2, 0, 0.0
    y0 = p0 + best_theta * d0
    y1 = p1 + best_theta * d1
    y2 = 0.0 if best_plane == n else p2 + best_theta * d2
    code = _surface_code(normals, offsets, vertices3, y0, y1, y2, best_plane, eps_edge)
    return STEP_EXIT, y0, y1, y2, code, best_theta


# ---------------------------------------------------------------------------
# python-facing operations

def classify_point(domain, x):
    """Classify ``x`` as inside, outside or on the surface of ``domain``."""
    x0, x1, x2 = (float(v) for v in x)
    loc = locate(domain.normals, domain.offsets, domain.h, x0, x1, x2, domain.eps_surf)
    if loc == 0:
        return INSIDE
    if loc < 0:
        return OUTSIDE
    code = _surface_code(domain.normals, domain.offsets, domain.vertices3,
                         x0, x1, x2, -1, domain.eps_edge)
    return on_surface(RegionLabel.from_code(code, domain.n))


def classify_points(domain, points):
    """Vectorized classification: -1 outside, 0 inside, 1 on the surface."""
    pts = np.ascontiguousarray(points, dtype=float).reshape(-1, 3)
    return locate_many(domain.normals, domain.offsets, domain.h, pts, domain.eps_surf)


def base_edge_offsets(domain, x):
    """Distances ``Delta_m`` from the projection of ``x`` to each base edge line."""
    x = np.asarray(x, dtype=float)
    lines = domain.edge_lines
    return np.abs(lines[:, 0] * x[..., 0, None] + lines[:, 1] * x[..., 1, None] + lines[:, 2])


def beta_angles(domain, x):
    """Inclination of the planes through ``x`` and each base edge.

    ``beta_m = arctan(x3 / Delta_m)``; ``pi / 2`` when ``Delta_m`` is zero.
    """
    x = np.asarray(x, dtype=float)
    delta = base_edge_offsets(domain, x)
    x3 = np.asarray(x[..., 2])[..., None]
    with np.errstate(divide="ignore"):
        return np.where(delta == 0.0, np.pi / 2, np.arctan(x3 / delta))


def beta_inside(domain, x):
    """Inclination-angle inside test: ``beta_m < alpha_m`` for all m and ``0 < x3 < h``.

    Only reliable where the base projection of ``x`` is inside the base
    polygon; far beyond an edge the absolute distance hides the side.
    """
    x = np.asarray(x, dtype=float)
    beta = beta_angles(domain, x)
    x3 = x[..., 2]
    return np.all(beta < domain.inclination_angles, axis=-1) & (x3 > 0.0) & (x3 < domain.h)


def intersect_step(domain, x_prev, x_next, steps=1):
    """First crossing of the step ``x_prev -> x_next`` with the surface.

    Returns ``None`` when ``x_next`` is still inside, otherwise an
    :class:`ExitEvent`. Of all planes the step crosses, the one hit at the
    smallest step fraction wins.
    """
    p = [float(v) for v in x_prev]
    q = [float(v) for v in x_next]
    status, y0, y1, y2, code, theta = exit_kernel(
        domain.normals, domain.offsets, domain.vertices3, domain.h,
        p[0], p[1], p[2], q[0], q[1], q[2], domain.eps_surf, domain.eps_edge,
    )
    if status == STEP_INSIDE:
        return None
    if status == STEP_NO_CANDIDATE:
        raise NoCandidateCrossing(f"step {p} -> {q} leaves the pyramid through no face")
    if status == STEP_DEGENERATE:
        raise DegenerateDirection(f"step {p} -> {q} is parallel to the only crossed plane")
    return ExitEvent((y0, y1, y2), RegionLabel.from_code(code, domain.n), theta, steps)


def region_plane(domain, region):
    """Plane ``(A, B, C, D)`` carrying ``region``; edges map to one adjacent face."""
    n = domain.n
    if region.kind == "face":
        return domain.face_planes[region.index - 1]
    if region.kind == "base":
        return np.array([0.0, 0.0, 1.0, 0.0])
    k = region.index
    if k <= n:
        return np.array([0.0, 0.0, 1.0, 0.0])
    return domain.face_planes[k - n - 1]


def plane_residual(domain, event):
    """Plane residual of an exit point, relative to the largest coefficient."""
    plane = region_plane(domain, event.region)
    y = np.asarray(event.point)
    return abs(plane[:3] @ y + plane[3]) / np.max(np.abs(plane))

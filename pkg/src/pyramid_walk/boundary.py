"""Boundary data on the pyramid surface."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import CoincidentPoints, GeometryError, RegionIndexOutOfRange, SpecMismatch
from .geometry import RegionLabel, classify_point


def exact_value(x, source):
    """Point-source potential ``1 / |x - source|``."""
    dist = math.dist(tuple(map(float, x)), tuple(map(float, source)))
    if dist == 0.0:
        raise CoincidentPoints(f"evaluation point coincides with the source {tuple(source)}")
    return 1.0 / dist


@dataclass(frozen=True)
class ExactSolution:
    """Harmonic field of a unit point source, defined away from the source."""

    source: tuple

    def __call__(self, x):
        return exact_value(x, self.source)

    def many(self, points):
        diff = np.asarray(points, dtype=float) - np.asarray(self.source, dtype=float)
        return 1.0 / np.sqrt(np.einsum("ij,ij->i", diff, diff))


@dataclass(frozen=True)
class PiecewiseConstant:
    """One constant per lateral face and one for the base; edges get ``edge_value``.

    Edges are treated as non-conducting, so ``edge_value`` is 0 unless a test
    needs a truly constant field.
    """

    face_values: tuple
    base_value: float
    edge_value: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "face_values", tuple(float(v) for v in self.face_values))
        object.__setattr__(self, "base_value", float(self.base_value))
        object.__setattr__(self, "edge_value", float(self.edge_value))

    @classmethod
    def constant(cls, value, n):
        return cls((value,) * n, value, value)

    def validate(self, domain):
        if len(self.face_values) != domain.n:
            raise SpecMismatch(
                f"{len(self.face_values)} face values given for a pyramid with {domain.n} faces")

    def region_value(self, region):
        if region.kind == "face":
            if not 1 <= region.index <= len(self.face_values):
                raise RegionIndexOutOfRange(f"no face {region.index}")
            return self.face_values[region.index - 1]
        if region.kind == "base":
            return self.base_value
        if region.kind == "edge":
            if not 1 <= region.index <= 2 * len(self.face_values):
                raise RegionIndexOutOfRange(f"no edge {region.index}")
            return self.edge_value
        raise RegionIndexOutOfRange(f"unknown region {region!r}")

    def bounds(self):
        values = self.face_values + (self.base_value, self.edge_value)
        return min(values), max(values)

    def _table(self, n):
        # Value for every region code 0..3n+1 (code 0 unused).
        return np.array([np.nan, *self.face_values, self.base_value] + [self.edge_value] * (2 * n))

    def evaluate_many(self, points, codes, n):
        return self._table(n)[codes]


@dataclass(frozen=True)
class PiecewiseFunction:
    """Continuous functions per face and base, vectorized over ``(k, 3)`` points."""

    face_functions: tuple
    base_function: object
    edge_value: float = 0.0

    def validate(self, domain):
        if len(self.face_functions) != domain.n:
            raise SpecMismatch(
                f"{len(self.face_functions)} face functions given for a pyramid with {domain.n} faces")

    def region_value(self, region, point):
        if region.kind == "face":
            if not 1 <= region.index <= len(self.face_functions):
                raise RegionIndexOutOfRange(f"no face {region.index}")
            fn = self.face_functions[region.index - 1]
        elif region.kind == "base":
            fn = self.base_function
        elif region.kind == "edge":
            return self.edge_value
        else:
            raise RegionIndexOutOfRange(f"unknown region {region!r}")
        return float(np.asarray(fn(np.asarray([point], dtype=float)))[0])

    def evaluate_many(self, points, codes, n):
        out = np.full(len(codes), self.edge_value, dtype=float)
        fns = list(self.face_functions) + [self.base_function]
        for code, fn in enumerate(fns, start=1):
            sel = codes == code
            if np.any(sel):
                out[sel] = fn(points[sel])
        return out


@dataclass(frozen=True)
class PointSource:
    """Boundary values ``1 / |y - source|`` with the source outside the pyramid."""

    source: tuple

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(float(v) for v in self.source))

    @property
    def exact(self):
        return ExactSolution(self.source)

    def validate(self, domain):
        if not classify_point(domain, self.source).outside:
            raise GeometryError(f"point source {self.source} must lie outside the closed pyramid")

    def region_value(self, region, point):
        return exact_value(point, self.source)

    def evaluate_many(self, points, codes, n):
        return self.exact.many(points)


def evaluate(spec, event):
    """Boundary value at the exit point of ``event``."""
    region = event.region
    if not isinstance(region, RegionLabel):
        raise RegionIndexOutOfRange(f"malformed region {region!r}")
    if isinstance(spec, PiecewiseConstant):
        return spec.region_value(region)
    return spec.region_value(region, event.point)

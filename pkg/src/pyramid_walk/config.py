"""Experiment configuration files.

Configurations are TOML documents with four sections::

    [domain]
    height = 2.0
    vertices = [[3, 0], [0, 2], [-2, -2]]

    [boundary]
    mode = "piecewise"            # or "point-source"
    faces = [3, 2, 1]             # one value per lateral face
    base = 4
    source = [0, 0, -4]           # needed for point-source runs

    [solve]
    points = [[0, 0, 0.2], [0, 0, 0.5]]
    nq = [400, 200]               # one per point, or a single integer
    N = [5E+3, 1E+4, 1E+5]        # integral floats are accepted
    seed = 12345
    max_steps = 10000000

    [output]
    csv = "results.csv"
    verbosity = 1
"""
import math
import re
from dataclasses import asdict, dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

from .boundary import PiecewiseConstant, PointSource
from .errors import (
    ArityMismatch,
    ConfigError,
    ConfigSyntaxError,
    GeometryError,
    InvalidDomain,
    UnknownKey,
)
from .geometry import build_domain, classify_point
from .walk import DEFAULT_MAX_STEPS

MODES = ("piecewise", "point-source")


@dataclass(frozen=True)
class DomainSection:
    height: float
    vertices: tuple


@dataclass(frozen=True)
class BoundarySection:
    mode: str
    faces: tuple = None
    base: float = None
    source: tuple = None


@dataclass(frozen=True)
class SolveSection:
    points: tuple
    nq: tuple
    N: tuple
    seed: int = 0
    max_steps: int = DEFAULT_MAX_STEPS


@dataclass(frozen=True)
class OutputSection:
    csv: str = None
    verbosity: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    domain: DomainSection
    boundary: BoundarySection
    solve: SolveSection
    output: OutputSection = OutputSection()

    def build_domain(self):
        return build_domain(self.domain.height, self.domain.vertices)

    def boundary_spec(self, mode=None):
        """Boundary data for ``mode`` (defaults to the configured mode)."""
        mode = mode or self.boundary.mode
        if mode == "point-source":
            if self.boundary.source is None:
                raise ConfigError("point-source mode needs boundary.source")
            return PointSource(self.boundary.source)
        if self.boundary.faces is None or self.boundary.base is None:
            raise ConfigError("piecewise mode needs boundary.faces and boundary.base")
        return PiecewiseConstant(self.boundary.faces, self.boundary.base)


_KEYS = {
    "domain": {"height", "vertices"},
    "boundary": {"mode", "faces", "base", "source"},
    "solve": {"points", "nq", "N", "seed", "max_steps"},
    "output": {"csv", "verbosity"},
}
_REQUIRED = {
    "domain": {"height", "vertices"},
    "boundary": {"mode"},
    "solve": {"points", "nq", "N"},
    "output": set(),
}


def _line_of(text, key, section=None):
    # Best-effort source line of `key` (or of `[section]` when key is None).
    pattern = rf"^\s*\[{re.escape(section)}\]" if key is None else rf"^\s*{re.escape(key)}\s*="
    for lineno, line in enumerate(text.splitlines(), start=1):
        if re.match(pattern, line):
            return lineno
    return None


def _number(value, what, text, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{what} must be a number, got {value!r}", _line_of(text, key))
    return float(value)


def _count(value, what, text, key):
    # Integers, or floats with integral value such as 5E+3.
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{what} must be an integer, got {value!r}", _line_of(text, key))
    if isinstance(value, float) and (not math.isfinite(value) or value != int(value)):
        raise ConfigError(f"{what} must be an integer, got {value!r}", _line_of(text, key))
    return int(value)


def _point(value, dim, what, text, key):
    if not isinstance(value, list) or len(value) != dim:
        raise ConfigError(f"{what} must have {dim} coordinates, got {value!r}", _line_of(text, key))
    return tuple(_number(v, what, text, key) for v in value)


def _list(value, what, text, key):
    if not isinstance(value, list):
        raise ConfigError(f"{what} must be an array", _line_of(text, key))
    return value


def parse_config(text):
    """Parse and validate an experiment configuration document."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigSyntaxError(getattr(exc, "msg", str(exc)),
                                getattr(exc, "lineno", None), getattr(exc, "colno", None)) from None

    for section in raw:
        if section not in _KEYS:
            raise UnknownKey(f"unknown section [{section}]", _line_of(text, None, section))
    for section in ("domain", "boundary", "solve"):
        if section not in raw:
            raise ConfigSyntaxError(f"missing [{section}] section")
    for section, body in raw.items():
        if not isinstance(body, dict):
            raise ConfigSyntaxError(f"[{section}] must be a table", _line_of(text, section))
        for key in body:
            if key not in _KEYS[section]:
                raise UnknownKey(f"unknown key '{key}' in [{section}]", _line_of(text, key))
        missing = _REQUIRED[section] - set(body)
        if missing:
            raise ConfigSyntaxError(f"[{section}] is missing {', '.join(sorted(missing))}",
                                    _line_of(text, None, section))

    d = raw["domain"]
    height = _number(d["height"], "domain.height", text, "height")
    vertices = tuple(_point(v, 2, "base vertex", text, "vertices")
                     for v in _list(d["vertices"], "domain.vertices", text, "vertices"))
    try:
        domain = build_domain(height, vertices)
    except GeometryError as exc:
        raise InvalidDomain(str(exc), _line_of(text, None, "domain")) from exc

    b = raw["boundary"]
    mode = b["mode"]
    if mode not in MODES:
        raise ConfigError(f"boundary.mode must be one of {MODES}, got {mode!r}", _line_of(text, "mode"))
    faces = base = source = None
    if "faces" in b:
        faces = tuple(_number(v, "face value", text, "faces")
                      for v in _list(b["faces"], "boundary.faces", text, "faces"))
        if len(faces) != domain.n:
            raise ArityMismatch(f"{len(faces)} face values for a pyramid with {domain.n} faces",
                                _line_of(text, "faces"))
    if "base" in b:
        base = _number(b["base"], "boundary.base", text, "base")
    if "source" in b:
        source = _point(b["source"], 3, "boundary.source", text, "source")
        if not classify_point(domain, source).outside:
            raise InvalidDomain(f"point source {source} must lie outside the pyramid",
                                _line_of(text, "source"))
    if mode == "piecewise" and (faces is None or base is None):
        raise ConfigSyntaxError("piecewise mode needs boundary.faces and boundary.base",
                                _line_of(text, None, "boundary"))
    if mode == "point-source" and source is None:
        raise ConfigSyntaxError("point-source mode needs boundary.source",
                                _line_of(text, None, "boundary"))

    s = raw["solve"]
    points = tuple(_point(p, 3, "evaluation point", text, "points")
                   for p in _list(s["points"], "solve.points", text, "points"))
    if not points:
        raise ConfigError("solve.points is empty", _line_of(text, "points"))
    if isinstance(s["nq"], list):
        nq = tuple(_count(v, "nq", text, "nq") for v in s["nq"])
        if len(nq) != len(points):
            raise ArityMismatch(f"{len(nq)} nq values for {len(points)} points", _line_of(text, "nq"))
    else:
        nq = (_count(s["nq"], "nq", text, "nq"),) * len(points)
    if any(v < 1 for v in nq):
        raise ConfigError("nq must be positive", _line_of(text, "nq"))
    n_values = s["N"] if isinstance(s["N"], list) else [s["N"]]
    N = tuple(sorted({_count(v, "N", text, "N") for v in n_values}))
    if not N or N[0] < 1:
        raise ConfigError("N values must be positive", _line_of(text, "N"))
    seed = _count(s.get("seed", 0), "seed", text, "seed")
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer", _line_of(text, "seed"))
    max_steps = _count(s.get("max_steps", DEFAULT_MAX_STEPS), "max_steps", text, "max_steps")
    if max_steps < 1:
        raise ConfigError("max_steps must be positive", _line_of(text, "max_steps"))

    o = raw.get("output", {})
    csv_path = o.get("csv")
    if csv_path is not None and not isinstance(csv_path, str):
        raise ConfigError("output.csv must be a string", _line_of(text, "csv"))
    verbosity = _count(o.get("verbosity", 1), "verbosity", text, "verbosity")

    return ExperimentConfig(
        DomainSection(height, vertices),
        BoundarySection(mode, faces, base, source),
        SolveSection(points, nq, N, seed, max_steps),
        OutputSection(csv_path, verbosity),
    )


def _plain(value):
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


def serialize_config(config):
    """TOML text that :func:`parse_config` maps back to ``config``."""
    doc = {}
    for section, body in asdict(config).items():
        doc[section] = {k: _plain(v) for k, v in body.items() if v is not None}
    return tomli_w.dumps(doc)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())

class PyramidWalkError(Exception):
    pass


class GeometryError(PyramidWalkError, ValueError):
    pass


class NonPositiveHeight(GeometryError):
    pass


class DegenerateEdge(GeometryError):
    pass


class ClockwiseOrder(GeometryError):
    pass


class NonConvexBase(GeometryError):
    pass


class OriginOutsideBase(GeometryError):
    pass


class NoCandidateCrossing(PyramidWalkError):
    """The step left the pyramid but crossed none of its faces."""


class DegenerateDirection(PyramidWalkError):
    """The only crossed plane is parallel to the step."""


class StartNotInside(PyramidWalkError, ValueError):
    pass


class MaxStepsExceeded(PyramidWalkError):
    pass


class RegionIndexOutOfRange(PyramidWalkError, IndexError):
    pass


class CoincidentPoints(PyramidWalkError, ValueError):
    pass


class SpecMismatch(PyramidWalkError, ValueError):
    pass


class ConfigError(PyramidWalkError, ValueError):
    """Invalid experiment configuration, with an optional source position."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" if column is None else f"line {line}, column {column}"
            message = f"{message} ({where})"
        super().__init__(message)


class ConfigSyntaxError(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class ArityMismatch(ConfigError):
    pass


class InvalidDomain(ConfigError):
    pass

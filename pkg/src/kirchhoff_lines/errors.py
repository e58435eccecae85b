"""Exception hierarchy shared across the package."""


class KirchhoffLinesError(Exception):
    """Base class for all package errors."""


class ParameterError(KirchhoffLinesError):
    """A measure or parameter bundle is malformed (kind mismatch, bad mass, ...)."""


class UnsupportedModelError(KirchhoffLinesError):
    """The requested model family is outside what the package supports."""


class ImpossibleEventError(KirchhoffLinesError):
    """A crossing kernel was requested at a sum the model cannot produce."""


class SimulationError(KirchhoffLinesError):
    """Internal consistency failure during a sweep (intensity left its support)."""


class MalformedDrawingError(KirchhoffLinesError):
    """A drawing violates structural invariants (adjacency, balance, parse)."""


class PotentialError(KirchhoffLinesError):
    """The potential is inconsistent: some node breaks the conservation law."""


class ConfigError(KirchhoffLinesError):
    """A run configuration or expression could not be parsed."""

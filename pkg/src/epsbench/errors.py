"""Exception types shared across the package."""


class EpsbenchError(Exception):
    """Base class for package-specific failures."""


class NotIrreducible(EpsbenchError):
    """Machine has transient states or more than one recurrent class."""


class ParseError(EpsbenchError):
    """Malformed machine or predictor text."""

    def __init__(self, message, line=None, field=None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.line = line
        self.field = field


class CapExceeded(EpsbenchError):
    """Requested word length exceeds the configured enumeration cap."""


class UnsupportedAlphabet(EpsbenchError):
    """Exact enumeration refused for this alphabet size at this length."""


class DomainError(EpsbenchError, ValueError):
    """Argument outside the mathematical domain of the function."""


class DegenerateSpec(EpsbenchError):
    """Survival specification induces an invalid hazard rate."""


class InsufficientData(EpsbenchError):
    """Too few samples per context for a trustworthy plug-in estimate."""


class NonFiniteFeature(EpsbenchError):
    """NaN or infinity in a training feature matrix."""


class DivergenceDetected(EpsbenchError):
    """Training loss became non-finite."""


class EmptyRange(EpsbenchError):
    """Evaluation range selects no positions."""


class ConvergenceError(EpsbenchError):
    """Iterative solver hit its cap without reaching tolerance."""

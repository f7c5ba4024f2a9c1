"""Exception types shared across the package."""


class RicciConcError(Exception):
    """Base class for all package-specific errors."""


class Disconnected(RicciConcError):
    """No path exists between the requested states."""


class NotErgodic(RicciConcError):
    """The walk kernel is not ergodic (not strongly connected or periodic)."""


class NotAnEdge(RicciConcError):
    """The requested state pair is not an edge of the graph."""


class NotDistinct(RicciConcError):
    """The requested state pair must consist of two distinct states."""


class IsolatedState(RicciConcError):
    """A state has no neighbors, so the requested walk is undefined."""


class BadGrid(RicciConcError):
    """A laziness grid does not satisfy the required shape."""


class OutOfRange(RicciConcError):
    """A numeric argument lies outside its admissible range."""


class TooLarge(RicciConcError):
    """The requested enumeration exceeds the configured state cap."""


class BadParams(RicciConcError):
    """Model parameters are degenerate or inconsistent."""


class InputNotLipschitz(RicciConcError):
    """A function fails the Lipschitz precondition it was declared with."""


class LipschitzViolation(RicciConcError):
    """An observable exceeded its claimed Lipschitz constant on an edge."""

    def __init__(self, message, witness=None, diff=None):
        super().__init__(message)
        self.witness = witness
        self.diff = diff


class LemmaViolation(RicciConcError):
    """A sampled pair curvature fell below the edge minimum (bug signal)."""


class BoundViolation(RicciConcError):
    """A structural curvature bound failed (bug signal)."""


class ContractionViolation(RicciConcError):
    """Averaging failed to contract a Lipschitz function as required."""


class InequalityViolation(RicciConcError):
    """A moment-generating or variance inequality failed (bug signal)."""


class IncompatiblePair(RicciConcError):
    """The observable is not defined on the given configuration space."""


class PatternTooLarge(RicciConcError):
    """The pattern exceeds the supported size for exact counting."""


class UnsupportedModel(RicciConcError):
    """The requested operation is not available for this model."""


class MissingKappa(RicciConcError):
    """No curvature lower bound is available for this space."""


class CouplingConstructionError(RicciConcError):
    """The explicit neighbor matching could not be completed (bug signal)."""

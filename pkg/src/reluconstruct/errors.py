"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Input dimensions do not match what an operation requires."""


class CompositionError(ValueError):
    """Two networks cannot be chained at their shared interface."""


class ParseError(ValueError):
    """A serialized document is malformed.

    ``offset`` is the byte/character position in the stream where parsing
    failed, when known.
    """

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class CertificateError(ValueError):
    """A target's declared smoothness certificate is inconsistent."""


class DegenerateGridError(ValueError):
    """Construction parameters lead to a grid too coarse to carry samples."""


class ResolutionError(ValueError):
    """Requested configuration would push grid spacing below f64 resolution."""


class ResourceError(ValueError):
    """A measurement grid exceeds the configured point cap."""


class RegistryError(LookupError):
    """An identifier does not name a registered target family or suite."""


class ConstructionInfeasibleError(RuntimeError):
    """No representable don't-care width meets the requested error budget.

    ``achieved`` is the error measured at the smallest admissible width and
    ``delta`` is that width.
    """

    def __init__(self, message, achieved=None, delta=None):
        super().__init__(message)
        self.achieved = achieved
        self.delta = delta

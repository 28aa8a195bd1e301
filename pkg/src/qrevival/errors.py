"""Exception types shared across the package.

Every failure mode a caller is expected to handle gets its own class so the
CLI can map it onto a stable exit code (see cli.EXIT_*).
"""


class QrevivalError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(QrevivalError):
    """Malformed configuration file or invalid parameter combination."""


class InputShapeError(QrevivalError):
    """Input array has the wrong dimensionality or too few samples."""


class InputRangeError(QrevivalError):
    """A requested point lies outside the usable range of the input data."""


class NumericalQualityError(QrevivalError):
    """A numerical estimate failed its convergence criterion.

    Carries the best available estimate so callers can decide whether to
    proceed anyway.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class BranchDegeneracyError(QrevivalError):
    """Two Mathieu branches are indistinguishable by their m=0 weight.

    Raised when the two leading eigenvectors carry m=0 weights within the
    tie threshold of each other while their eigenvalues differ materially,
    so silently returning either would be a hidden branch choice.
    """

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


class StencilError(QrevivalError):
    """A finite-difference stencil point hit a branch degeneracy."""


class ResourceLimitError(QrevivalError):
    """Truncation grew past the hard cap without meeting the tolerance."""


class UnsupportedRegimeError(QrevivalError):
    """The requested operation has no meaning in this parameter regime
    (e.g. the Mathieu mapping requires a nonzero nonlinearity)."""


class BasisSizeError(QrevivalError):
    """The wave packet does not fit in the requested ladder truncation.

    ``suggested`` is a half-bandwidth large enough to satisfy the
    truncation-safety criterion.
    """

    def __init__(self, message, suggested=None):
        super().__init__(message)
        self.suggested = suggested


class UnresolvedPeriodError(QrevivalError):
    """The autocorrelation trace does not resolve a classical period."""

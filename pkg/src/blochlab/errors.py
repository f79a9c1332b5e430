"""Exception hierarchy shared by all blochlab modules.

Every error that a pipeline can surface maps to exactly one class here, so
the CLI can translate failures into stable exit codes (input error,
precision failure, internal assertion).
"""


class BlochLabError(Exception):
    """Base class for all library errors."""


# --- input / domain errors (CLI exit code 1) ---------------------------------

class BranchCutError(BlochLabError):
    """Dilogarithm evaluated on its cut [1, oo)."""


class DegenerateArgumentError(BlochLabError):
    """Special function evaluated at 0 or 1 where it is undefined."""


class DependentRowsError(BlochLabError):
    """Lattice basis rows are linearly dependent over Q."""


class ReduciblePolynomialError(BlochLabError):
    """Defining polynomial factors over Q."""


class UnsupportedDegreeError(BlochLabError):
    """Field degree beyond the supported desk scale."""


class DivisionByZeroError(BlochLabError, ZeroDivisionError):
    """Inversion of the zero field element."""


class NotStableError(BlochLabError):
    """Embedded field is not stable under complex conjugation."""


class TotallyRealError(BlochLabError):
    """Operation requires at least one complex place (r2 >= 1)."""


class DegenerateConfigurationError(BlochLabError):
    """A derived five-term argument landed in {0, 1}."""

    def __init__(self, term, message=None):
        self.term = term
        super().__init__(message or f"degenerate five-term argument: {term}")


class MuNonzeroError(BlochLabError):
    """Operation requires an exact mu-kernel element."""


class CoincidentPointsError(BlochLabError):
    """Cross ratio of a degenerate point quadruple."""


class DegenerateShapeError(BlochLabError):
    """Tetrahedron shape is real (flat) or in {0, 1} at the embedding."""


class ThurstonViolationError(BlochLabError):
    """Shape list fails the gluing relation; carries the wedge coordinates."""

    def __init__(self, wedge_coords, message=None):
        self.wedge_coords = wedge_coords
        super().__init__(message or "gluing relation violated")


class NotValidatedError(BlochLabError):
    """Manifold record used before (or after failing) validation."""


# --- precision / search failures (CLI exit code 2) ---------------------------

class PrecisionError(BlochLabError):
    """Base class for precision-related failures."""


class PrecisionOverflowError(PrecisionError):
    """Internal working precision would exceed the hard cap."""


class InsufficientPrecisionError(PrecisionError):
    """Requested detection is meaningless at the given precision."""


class RecognitionFailedError(PrecisionError):
    """A value that must be rational was not recognized at max precision."""


class CertificationFailedError(PrecisionError):
    """A numerically found relation failed exact verification."""


# --- internal assertions (CLI exit code 3) -----------------------------------

class InternalAssertionError(BlochLabError):
    """An invariant the implementation guarantees was violated: a bug."""

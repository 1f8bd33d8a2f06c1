"""Exception types raised by the bound computations."""


class SparseBoundsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(SparseBoundsError, ValueError):
    """An argument fails a precondition (shape, range, or sparsity)."""


class DegenerateModelError(SparseBoundsError):
    """The equivalent noise variance is zero, so no likelihood exists."""


class SingularMatrixError(SparseBoundsError):
    """A required Gram matrix is singular or numerically rank deficient."""


class NoUnbiasedEstimatorError(SparseBoundsError):
    """The Fisher information is singular: no finite-variance unbiased
    estimator exists for this signal."""


class WrongRegimeError(InvalidInputError):
    """The signal's sparsity does not match the requested bound regime."""


class UnsupportedSizeError(SparseBoundsError):
    """The exact combinatorial computation is too large to enumerate."""


class AssumptionViolatedError(SparseBoundsError):
    """A restricted-eigenvalue assumption fails for the given matrix."""


class DivergentTestPointError(SparseBoundsError):
    """A test-point pair makes the bound's defining integral diverge."""


class ExcessiveFailureError(SparseBoundsError):
    """More than the tolerated share of Monte Carlo trials failed."""


class InfeasibleOffsetError(InvalidInputError):
    """A test-point offset leaves the sparse parameter set."""


class UnsupportedMatrixError(InvalidInputError):
    """The operation has a closed form only for the identity matrix."""

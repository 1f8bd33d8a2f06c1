"""Measurement model with a randomly perturbed sensing matrix.

The observation is y = (A + E)x + n where E has iid N(0, sigma_e^2)
entries, n ~ N(0, sigma_n^2 I), and x is sparse.  Conditioned on x the
measurement obeys the exact equivalent law

    y - Ax ~ N(0, sigma_x^2 I),   sigma_x^2 = sigma_e^2 ||x||^2 + sigma_n^2,

which is what the sampler and every likelihood expression here use.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AssumptionViolatedError,
    InvalidInputError,
    UnsupportedSizeError,
)

__all__ = [
    "ProblemModel",
    "SparseSignal",
    "Measurement",
    "sigma_x_squared",
    "sample_measurement",
    "generate_gaussian_matrix",
    "generate_bernoulli_signal",
    "spark_exceeds",
]

# Exhaustive spark verification enumerates column subsets; beyond this
# many columns the count is unreasonable and the caller must not rely on it.
SPARK_ENUMERATION_LIMIT = 20


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class ProblemModel:
    """Sensing matrix plus noise levels and the sparsity budget s.

    Parameters
    ----------
    A : (m, n) array
        Nominal (unperturbed) sensing matrix.
    sigma_e : float
        Standard deviation of each entry of the matrix perturbation.
    sigma_n : float
        Standard deviation of the additive measurement noise.
    s : int
        Sparsity budget; signals live in {x : ||x||_0 <= s}.
    verify_spark : bool
        When True, verify spark(A) > 2s on construction.  Only possible
        for n <= SPARK_ENUMERATION_LIMIT.
    """

    A: np.ndarray
    sigma_e: float
    sigma_n: float
    s: int
    verify_spark: bool = field(default=False, compare=False)

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 2 or A.size == 0:
            raise InvalidInputError("A must be a nonempty 2-d array")
        if not np.all(np.isfinite(A)):
            raise InvalidInputError("A must be finite")
        if not (self.sigma_e >= 0.0 and self.sigma_n >= 0.0):
            raise InvalidInputError("noise deviations must be nonnegative")
        s = int(self.s)
        if s < 1 or s > A.shape[1]:
            raise InvalidInputError(
                f"sparsity budget s={self.s} must lie in [1, n={A.shape[1]}]"
            )
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "sigma_e", float(self.sigma_e))
        object.__setattr__(self, "sigma_n", float(self.sigma_n))
        object.__setattr__(self, "s", s)
        if self.verify_spark and not spark_exceeds(self.A, 2 * s):
            raise AssumptionViolatedError(
                f"spark(A) must exceed 2s = {2 * s} for identifiability"
            )

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True, eq=False)
class SparseSignal:
    """A parameter vector together with its support.

    The support defaults to the indices of the nonzero entries.  A larger
    declared support is accepted (entries on it may be zero, which some
    reference points need), but entries off the declared support must be
    exactly zero.
    """

    x: np.ndarray
    support: tuple[int, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1 or x.size == 0:
            raise InvalidInputError("x must be a nonempty 1-d array")
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("x must be finite")
        nonzero = tuple(int(i) for i in np.flatnonzero(x))
        if self.support is None:
            support = nonzero
        else:
            support = tuple(int(i) for i in self.support)
            if list(support) != sorted(set(support)):
                raise InvalidInputError("support must be sorted and duplicate free")
            if support and not (0 <= support[0] and support[-1] < x.size):
                raise InvalidInputError("support indices out of range")
            if not set(nonzero) <= set(support):
                raise InvalidInputError("x has nonzero entries off the declared support")
        object.__setattr__(self, "x", _frozen(x))
        object.__setattr__(self, "support", support)

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.x))


@dataclass(frozen=True, eq=False)
class Measurement:
    """An observed measurement vector."""

    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.ndim != 1 or y.size == 0:
            raise InvalidInputError("y must be a nonempty 1-d array")
        object.__setattr__(self, "y", _frozen(y))

    @property
    def m(self) -> int:
        return self.y.size


def measurement_vector(y) -> np.ndarray:
    """Accept either a Measurement or a plain 1-d array and return the array."""
    if isinstance(y, Measurement):
        return y.y
    arr = np.asarray(y, dtype=float)
    if arr.ndim != 1:
        raise InvalidInputError("measurement must be a 1-d vector")
    return arr


def _check_signal(model: ProblemModel, signal: SparseSignal) -> None:
    if signal.n != model.n:
        raise InvalidInputError(
            f"signal length {signal.n} does not match model n={model.n}"
        )


def sigma_x_squared(model: ProblemModel, signal: SparseSignal) -> float:
    """Equivalent noise variance sigma_e^2 ||x||^2 + sigma_n^2."""
    _check_signal(model, signal)
    x = signal.x
    return float(model.sigma_e**2 * (x @ x) + model.sigma_n**2)


def sample_measurement(
    model: ProblemModel, signal: SparseSignal, rng: np.random.Generator
) -> Measurement:
    """Draw one measurement y = (A + E)x + n.

    Uses the equivalent law y = Ax + sigma_x z with z standard normal,
    which matches the joint perturbation-plus-noise distribution exactly
    and never materializes the m-by-n perturbation.
    """
    _check_signal(model, signal)
    sx = math.sqrt(sigma_x_squared(model, signal))
    z = rng.standard_normal(model.m)
    return Measurement(model.A @ signal.x + sx * z)


def generate_gaussian_matrix(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Random m-by-n matrix with iid N(0, 1/m) entries.

    Columns then have expected squared norm 1; no explicit normalization
    is applied.
    """
    if m < 1 or n < 1:
        raise InvalidInputError("matrix dimensions must be positive")
    return rng.normal(0.0, 1.0 / math.sqrt(m), size=(m, n))


def generate_bernoulli_signal(n: int, s: int, rng: np.random.Generator) -> SparseSignal:
    """s-sparse signal with a uniform random support and +-1 entries."""
    if not 1 <= s <= n:
        raise InvalidInputError(f"need 1 <= s <= n, got s={s}, n={n}")
    support = np.sort(rng.choice(n, size=s, replace=False))
    x = np.zeros(n)
    x[support] = rng.integers(0, 2, size=s) * 2.0 - 1.0
    return SparseSignal(x, tuple(int(i) for i in support))


def spark_exceeds(A: np.ndarray, k: int, limit: int = SPARK_ENUMERATION_LIMIT) -> bool:
    """Decide by enumeration whether spark(A) > k.

    spark(A) is the size of the smallest linearly dependent column subset
    (n + 1 when the columns are in general position).  Every subset of
    size <= k is independent iff every subset of size min(k, n) is, so one
    subset size suffices.

    Raises UnsupportedSizeError when A has more than `limit` columns.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise InvalidInputError("A must be 2-d")
    m, n = A.shape
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    if n > limit:
        raise UnsupportedSizeError(
            f"exhaustive spark verification supports at most {limit} columns, got {n}"
        )
    if k > n:
        return False  # spark never exceeds n + 1
    j = min(k, n)
    if j > m:
        return False  # any j > m columns in R^m are dependent
    for cols in itertools.combinations(range(n), j):
        if np.linalg.matrix_rank(A[:, cols]) < j:
            return False
    return True

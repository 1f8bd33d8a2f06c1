"""Constrained Cramer-Rao bounds for sparse estimation under perturbation.

For a signal with full support (||x||_0 = s) the bound on the MSE of any
unbiased estimator is

    CCRB = sigma_x^2 tr(G) - d,
    d    = sigma_x^2 * 2 m sigma_e^4 ||G x_S||^2
           / (sigma_x^2 + 2 m sigma_e^4 x_S^T G x_S),

with G = (A_S^T A_S)^{-1}.  The first term is the classical oracle bound;
d is the reduction created by the signal-dependent noise, and
gamma = d / first quantifies it.  For ||x||_0 < s the bound is tr(J^{-1})
with J the full Fisher information, when J is invertible.

The gamma ratio admits matrix-free two-sided bounds from restricted
eigenvalue extremes and is approximated by a function of two scalar noise
levels c_e and c_n alone.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    AssumptionViolatedError,
    DegenerateModelError,
    InvalidInputError,
    NoUnbiasedEstimatorError,
    SingularMatrixError,
    WrongRegimeError,
)
from .fisher import fim_closed_form
from .model import ProblemModel, SparseSignal, sigma_x_squared

__all__ = [
    "CcrbReport",
    "RipConstants",
    "NoiseLevels",
    "ccrb_maximal",
    "ccrb_nonmaximal",
    "oracle_mse_theoretical",
    "rip_constants",
    "noise_levels",
    "sigmas_for_levels",
    "gamma_bounds",
    "gamma_approx",
    "transition_ce",
]

# Relative eigenvalue threshold below which a Gram or information matrix
# is declared singular.
SINGULARITY_RTOL = 1e-12

# Support-enumeration budget above which rip_constants falls back to
# sampling in "auto" mode.
RIP_ENUMERATION_LIMIT = 100_000
RIP_DEFAULT_SAMPLES = 2000


@dataclass(frozen=True)
class CcrbReport:
    """Bound value with its decomposition into first term and reduction."""

    bound: float
    first_term: float
    d_ccrb: float
    gamma_ccrb: float
    regime: str

    def __post_init__(self):
        for name in ("bound", "first_term", "d_ccrb", "gamma_ccrb"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.regime not in ("maximal", "nonmaximal"):
            raise InvalidInputError(f"unknown regime {self.regime!r}")


@dataclass(frozen=True)
class RipConstants:
    """Extremes of the restricted Gram spectrum over size-s supports.

    theta_upper = max lambda_max(A_S^T A_S) - 1 and
    theta_lower = 1 - min lambda_min(A_S^T A_S); either may be <= 0 for
    well-conditioned matrices (exactly 0 for the identity).  `exact` marks
    whether every support was enumerated or only a sample.
    """

    theta_lower: float
    theta_upper: float
    s: int
    exact: bool


@dataclass(frozen=True)
class NoiseLevels:
    """Scalar noise levels c_e (matrix) and c_n (additive)."""

    c_e: float
    c_n: float

    def __post_init__(self):
        if self.c_e < 0.0 or self.c_n < 0.0:
            raise InvalidInputError("noise levels must be nonnegative")
        object.__setattr__(self, "c_e", float(self.c_e))
        object.__setattr__(self, "c_n", float(self.c_n))


def _checked_positive_sigma_x2(model: ProblemModel, signal: SparseSignal) -> float:
    sx2 = sigma_x_squared(model, signal)
    if sx2 <= 0.0:
        raise DegenerateModelError(
            "equivalent noise variance is zero; the bound is degenerate"
        )
    return sx2


def _gram_eig_guard(gram: np.ndarray, what: str) -> None:
    w = scipy.linalg.eigvalsh(gram)
    if w[-1] <= 0.0 or w[0] <= SINGULARITY_RTOL * w[-1]:
        raise SingularMatrixError(f"{what} is numerically singular")


def _reduction_term(sx2: float, m: int, sigma_e: float, u: np.ndarray, quad: float) -> float:
    # d = sx2 * 2 m se^4 ||u||^2 / (sx2 + 2 m se^4 quad), u = G x_S
    c = 2.0 * m * sigma_e**4
    if c == 0.0:
        return 0.0
    return float(sx2 * c * (u @ u) / (sx2 + c * quad))


def ccrb_maximal(model: ProblemModel, signal: SparseSignal) -> CcrbReport:
    """CCRB for a signal with exactly s nonzero entries.

    Raises WrongRegimeError when ||x||_0 != s, SingularMatrixError when
    A_S is rank deficient, DegenerateModelError when sigma_x^2 = 0.
    """
    if signal.n != model.n:
        raise InvalidInputError("signal length does not match model")
    if signal.nonzero_count != model.s or len(signal.support) != model.s:
        raise WrongRegimeError(
            f"maximal-support bound needs ||x||_0 = s = {model.s}, "
            f"got {signal.nonzero_count}"
        )
    sx2 = _checked_positive_sigma_x2(model, signal)
    S = list(signal.support)
    A_S = model.A[:, S]
    gram = A_S.T @ A_S
    _gram_eig_guard(gram, "A_S^T A_S")
    cho = scipy.linalg.cho_factor(gram)
    G = scipy.linalg.cho_solve(cho, np.eye(len(S)))
    x_S = signal.x[S]
    u = G @ x_S
    first = float(sx2 * np.trace(G))
    d = _reduction_term(sx2, model.m, model.sigma_e, u, float(x_S @ u))
    return CcrbReport(
        bound=first - d,
        first_term=first,
        d_ccrb=d,
        gamma_ccrb=d / first,
        regime="maximal",
    )


def ccrb_nonmaximal(model: ProblemModel, signal: SparseSignal) -> CcrbReport:
    """CCRB for a signal with fewer than s nonzero entries.

    Equals tr(J^{-1}) for the unconstrained Fisher information J.  When A
    has full column rank this is evaluated through the same rank-one
    update form as the maximal bound (with the full matrix and signal);
    otherwise, if J is still invertible, by a direct solve with the
    decomposition reported as (bound, 0).

    Raises NoUnbiasedEstimatorError when J is singular: no unbiased
    estimator of such a signal has finite variance.
    """
    if signal.n != model.n:
        raise InvalidInputError("signal length does not match model")
    if signal.nonzero_count >= model.s:
        raise WrongRegimeError(
            f"non-maximal bound needs ||x||_0 < s = {model.s}, "
            f"got {signal.nonzero_count}"
        )
    sx2 = _checked_positive_sigma_x2(model, signal)
    fim = fim_closed_form(model, signal)
    w = scipy.linalg.eigvalsh(fim.J)
    if w[-1] <= 0.0 or w[0] <= SINGULARITY_RTOL * w[-1]:
        raise NoUnbiasedEstimatorError(
            "Fisher information is singular: no unbiased estimator of this "
            "signal has finite variance"
        )
    gram = model.A.T @ model.A
    wg = scipy.linalg.eigvalsh(gram)
    if wg[0] > SINGULARITY_RTOL * wg[-1] and wg[-1] > 0.0:
        cho = scipy.linalg.cho_factor(gram)
        G = scipy.linalg.cho_solve(cho, np.eye(model.n))
        u = G @ signal.x
        first = float(sx2 * np.trace(G))
        d = _reduction_term(sx2, model.m, model.sigma_e, u, float(signal.x @ u))
    else:
        first = float(np.trace(scipy.linalg.solve(fim.J, np.eye(model.n), assume_a="pos")))
        d = 0.0
    return CcrbReport(
        bound=first - d,
        first_term=first,
        d_ccrb=d,
        gamma_ccrb=d / first,
        regime="nonmaximal",
    )


def oracle_mse_theoretical(model: ProblemModel, support, signal: SparseSignal) -> float:
    """Exact MSE of the support-aware least-squares estimator.

    sigma_x^2 tr((A_S^T A_S)^{-1}) for a known support S covering the
    signal's nonzeros.
    """
    S = sorted(int(i) for i in support)
    if len(S) != len(set(S)) or not S:
        raise InvalidInputError("support must be nonempty and duplicate free")
    if S[0] < 0 or S[-1] >= model.n:
        raise InvalidInputError("support indices out of range")
    if not set(np.flatnonzero(signal.x)) <= set(S):
        raise InvalidInputError("support must cover the signal's nonzero entries")
    sx2 = _checked_positive_sigma_x2(model, signal)
    A_S = model.A[:, S]
    gram = A_S.T @ A_S
    _gram_eig_guard(gram, "A_S^T A_S")
    cho = scipy.linalg.cho_factor(gram)
    G = scipy.linalg.cho_solve(cho, np.eye(len(S)))
    return float(sx2 * np.trace(G))


def rip_constants(
    A: np.ndarray,
    s: int,
    mode: str = "auto",
    samples: int = RIP_DEFAULT_SAMPLES,
    rng: np.random.Generator | None = None,
    enumeration_limit: int = RIP_ENUMERATION_LIMIT,
) -> RipConstants:
    """Restricted eigenvalue extremes over supports of size s.

    mode "exhaustive" enumerates all supports, "sampled" draws `samples`
    uniform supports, and "auto" enumerates iff C(n, s) fits within
    `enumeration_limit`.  Raises AssumptionViolatedError when a visited
    support has lambda_min <= 0.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise InvalidInputError("A must be 2-d")
    n = A.shape[1]
    if not 1 <= s <= n:
        raise InvalidInputError(f"need 1 <= s <= n, got s={s}")
    if mode not in ("auto", "exhaustive", "sampled"):
        raise InvalidInputError(f"unknown mode {mode!r}")
    total = math.comb(n, s)
    exhaustive = mode == "exhaustive" or (mode == "auto" and total <= enumeration_limit)
    if exhaustive and mode == "exhaustive" and total > enumeration_limit:
        raise InvalidInputError(
            f"exhaustive enumeration of {total} supports exceeds the limit "
            f"{enumeration_limit}"
        )
    if exhaustive:
        supports = itertools.combinations(range(n), s)
    else:
        if rng is None:
            rng = np.random.default_rng(0)
        supports = (
            np.sort(rng.choice(n, size=s, replace=False)) for _ in range(samples)
        )
    lo = math.inf
    hi = -math.inf
    for S in supports:
        gram = A[:, list(S)].T @ A[:, list(S)]
        w = scipy.linalg.eigvalsh(gram)
        if w[0] <= 0.0:
            raise AssumptionViolatedError(
                f"support {tuple(int(i) for i in S)} has lambda_min <= 0"
            )
        lo = min(lo, w[0])
        hi = max(hi, w[-1])
    return RipConstants(theta_lower=1.0 - lo, theta_upper=hi - 1.0, s=s, exact=exhaustive)


def noise_levels(model: ProblemModel, signal: SparseSignal) -> NoiseLevels:
    """Scalar noise levels of an instance.

    c_e = m s sigma_e^2 / tr(A_S^T A_S) and c_n = m sigma_n^2 / ||x||^2.
    """
    if signal.n != model.n:
        raise InvalidInputError("signal length does not match model")
    S = list(signal.support)
    if not S:
        raise InvalidInputError("signal support is empty")
    x = signal.x
    energy = float(x @ x)
    if energy == 0.0:
        raise InvalidInputError("noise levels are undefined for the zero signal")
    A_S = model.A[:, S]
    tr_gram = float(np.einsum("ij,ij->", A_S, A_S))
    if tr_gram <= 0.0:
        raise InvalidInputError("A_S has zero energy")
    c_e = model.m * model.s * model.sigma_e**2 / tr_gram
    c_n = model.m * model.sigma_n**2 / energy
    return NoiseLevels(c_e=c_e, c_n=c_n)


def sigmas_for_levels(
    A: np.ndarray, signal: SparseSignal, c_e: float, c_n: float, s: int
) -> tuple[float, float]:
    """Invert noise_levels: deviations (sigma_e, sigma_n) hitting (c_e, c_n)."""
    if c_e < 0.0 or c_n < 0.0:
        raise InvalidInputError("noise levels must be nonnegative")
    A = np.asarray(A, dtype=float)
    S = list(signal.support)
    if not S:
        raise InvalidInputError("signal support is empty")
    energy = float(signal.x @ signal.x)
    if energy == 0.0:
        raise InvalidInputError("zero signal")
    A_S = A[:, S]
    tr_gram = float(np.einsum("ij,ij->", A_S, A_S))
    m = A.shape[0]
    sigma_e = math.sqrt(c_e * tr_gram / (m * s))
    sigma_n = math.sqrt(c_n * energy / m)
    return sigma_e, sigma_n


def gamma_bounds(rip: RipConstants, levels: NoiseLevels, s: int) -> tuple[float, float]:
    """Two-sided matrix-free bounds on gamma from restricted eigenvalues.

    Each side is (1/s) (1+t_a)^3/(1+t_b)^2 * 2 c_e /
    (2 (1+t_b) c_e + (1+t_a) + c_n/c_e) where the upper bound takes
    t_a = theta_upper, t_b = -theta_lower and the lower bound swaps them.
    Both collapse to gamma_approx when the thetas vanish.
    """
    if s < 1:
        raise InvalidInputError("s must be positive")
    if rip.theta_lower >= 1.0:
        raise AssumptionViolatedError(
            "theta_lower >= 1 leaves no positive restricted eigenvalue floor"
        )
    c_e, c_n = levels.c_e, levels.c_n
    if c_e == 0.0:
        return 0.0, 0.0
    tp = 1.0 + rip.theta_upper
    tm = 1.0 - rip.theta_lower
    upper = (tp**3 / tm**2) * 2.0 * c_e / (2.0 * tm * c_e + tp + c_n / c_e) / s
    lower = (tm**3 / tp**2) * 2.0 * c_e / (2.0 * tp * c_e + tm + c_n / c_e) / s
    return lower, upper


def gamma_approx(c_e: float, c_n: float, s: int) -> float:
    """Scalar approximation gamma = (1/s) 2 c_e / (2 c_e + 1 + c_n/c_e).

    Vanishes as c_e -> 0 and saturates at 1/s as c_e -> infinity.
    """
    if s < 1:
        raise InvalidInputError("s must be positive")
    if c_e < 0.0 or c_n < 0.0:
        raise InvalidInputError("noise levels must be nonnegative")
    if c_e == 0.0:
        return 0.0
    return 2.0 * c_e / (2.0 * c_e + 1.0 + c_n / c_e) / s


def transition_ce(c_n: float) -> float:
    """Matrix-noise level where gamma_approx reaches half its ceiling.

    The positive root of 2 c^2 - c - c_n = 0, i.e. (1 + sqrt(1 + 8 c_n))/4;
    equals 1/2 at c_n = 0 and 1 at c_n = 1.
    """
    if c_n < 0.0:
        raise InvalidInputError("c_n must be nonnegative")
    return (1.0 + math.sqrt(1.0 + 8.0 * c_n)) / 4.0

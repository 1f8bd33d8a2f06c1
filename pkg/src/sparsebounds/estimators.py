"""Reference estimators used to validate the bounds by simulation.

Four estimators appear in the experiments:

* oracle: least squares on a known support;
* maximum likelihood for a unit sensing matrix: keep the s largest
  magnitudes of y;
* a locally unbiased estimator built around a 1-sparse reference point,
  whose off-support components damp y by a likelihood ratio in the
  reference coordinate;
* a biased "noise exploiting" estimator for s = 1 that averages the
  perturbation energy into the peak coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateModelError,
    InvalidInputError,
    SingularMatrixError,
)
from .model import Measurement, ProblemModel, SparseSignal, measurement_vector

__all__ = [
    "EstimatorSpec",
    "estimate_oracle",
    "estimate_ml_unit",
    "estimate_locally_unbiased",
    "estimate_noise_exploiting",
    "apply_estimator",
]


_SHORT_NAMES = {
    "oracle": "oracle",
    "maximum_likelihood": "ml",
    "locally_unbiased": "unbiased",
    "noise_exploiting": "noise",
}


@dataclass(frozen=True, eq=False)
class EstimatorSpec:
    """Declarative description of one reference estimator.

    Use the factory classmethods; `kind` selects the estimator and the
    remaining fields carry its parameters.
    """

    kind: str
    support: tuple[int, ...] | None = None
    s: int | None = None
    x0: SparseSignal | None = None

    _KINDS = ("oracle", "maximum_likelihood", "locally_unbiased", "noise_exploiting")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise InvalidInputError(f"unknown estimator kind {self.kind!r}")
        if self.kind == "oracle":
            if not self.support:
                raise InvalidInputError("oracle estimator needs a support")
            object.__setattr__(
                self, "support", tuple(sorted(int(i) for i in self.support))
            )
        elif self.kind == "maximum_likelihood":
            if self.s is None or self.s < 1:
                raise InvalidInputError("maximum_likelihood estimator needs s >= 1")
        elif self.kind == "locally_unbiased":
            if self.x0 is None or len(self.x0.support) != 1:
                raise InvalidInputError(
                    "locally_unbiased estimator needs a 1-sparse reference point"
                )

    @classmethod
    def oracle(cls, support) -> "EstimatorSpec":
        return cls(kind="oracle", support=tuple(support))

    @classmethod
    def maximum_likelihood(cls, s: int) -> "EstimatorSpec":
        return cls(kind="maximum_likelihood", s=int(s))

    @classmethod
    def locally_unbiased(cls, x0: SparseSignal) -> "EstimatorSpec":
        return cls(kind="locally_unbiased", x0=x0)

    @classmethod
    def noise_exploiting(cls) -> "EstimatorSpec":
        return cls(kind="noise_exploiting")

    @property
    def name(self) -> str:
        # short ids shared with the command line --estimators vocabulary
        return _SHORT_NAMES[self.kind]


def estimate_oracle(model: ProblemModel, y, support) -> SparseSignal:
    """Least squares restricted to a known support.

    Raises SingularMatrixError when A_S^T A_S is singular.
    """
    S = sorted(int(i) for i in support)
    if not S or len(S) != len(set(S)) or S[0] < 0 or S[-1] >= model.n:
        raise InvalidInputError("invalid oracle support")
    yv = measurement_vector(y)
    if yv.size != model.m:
        raise InvalidInputError("measurement length does not match model m")
    A_S = model.A[:, S]
    gram = A_S.T @ A_S
    try:
        cho = scipy.linalg.cho_factor(gram)
    except scipy.linalg.LinAlgError as exc:
        raise SingularMatrixError("A_S^T A_S is singular") from exc
    coeffs = scipy.linalg.cho_solve(cho, A_S.T @ yv)
    x = np.zeros(model.n)
    x[S] = coeffs
    return SparseSignal(x, tuple(S))


def estimate_ml_unit(y, s: int) -> SparseSignal:
    """Maximum likelihood for a unit sensing matrix: keep the s largest
    magnitudes of y (ties broken toward the lowest index)."""
    yv = measurement_vector(y)
    if not 1 <= s <= yv.size:
        raise InvalidInputError(f"need 1 <= s <= len(y), got s={s}")
    if s == 1:
        # argmax keeps the lowest index on ties, like the stable sort below
        keep = np.array([np.argmax(np.abs(yv))])
    else:
        order = np.argsort(-np.abs(yv), kind="stable")
        keep = np.sort(order[:s])
    x = np.zeros(yv.size)
    x[keep] = yv[keep]
    return SparseSignal(x, tuple(int(i) for i in keep))


def estimate_locally_unbiased(model: ProblemModel, y, x0: SparseSignal) -> np.ndarray:
    """Unbiased estimator anchored at a 1-sparse reference point x0.

    The reference coordinate q passes y_q through; every other coordinate
    is damped by exp(-(2 y_q x0q + x0q^2) / (2 sigma_x0^2)), the
    likelihood ratio between -x0q and 0 at coordinate q.  The output is
    dense: it is not projected onto a sparse support.
    """
    if len(x0.support) != 1:
        raise InvalidInputError("reference point must have a single-index support")
    if x0.n != model.n:
        raise InvalidInputError("reference point length does not match model")
    yv = measurement_vector(y)
    if yv.size != model.n:
        raise InvalidInputError("this estimator requires m = n measurements")
    q = x0.support[0]
    x0q = float(x0.x[q])
    s0sq = model.sigma_e**2 * x0q**2 + model.sigma_n**2
    if s0sq <= 0.0:
        raise DegenerateModelError("reference noise variance is zero")
    damp = np.exp(-(2.0 * yv[q] * x0q + x0q**2) / (2.0 * s0sq))
    out = yv * damp
    out[q] = yv[q]
    return out


def estimate_noise_exploiting(y) -> SparseSignal:
    """Biased s = 1 estimator that folds perturbation energy into the peak.

    Places sum(y^2) / (2 y_k) on the largest-magnitude coordinate k.
    Raises InvalidInputError when y is identically zero.
    """
    yv = measurement_vector(y)
    if not np.any(yv):
        raise InvalidInputError("zero measurement has no identifiable support")
    k = int(np.argmax(np.abs(yv)))
    x = np.zeros(yv.size)
    x[k] = float(yv @ yv) / (2.0 * yv[k])
    return SparseSignal(x, (k,))


def apply_estimator(model: ProblemModel, y, spec: EstimatorSpec) -> np.ndarray:
    """Run one estimator and return a dense estimate of length n."""
    if spec.kind == "oracle":
        out = estimate_oracle(model, y, spec.support).x
    elif spec.kind == "maximum_likelihood":
        out = estimate_ml_unit(y, spec.s).x
    elif spec.kind == "locally_unbiased":
        return estimate_locally_unbiased(model, y, spec.x0)
    else:
        out = estimate_noise_exploiting(y).x
    if out.size != model.n:
        raise InvalidInputError("estimate length does not match model n")
    return out

"""Likelihood, score, and Fisher information for the perturbed model.

With r = y - Ax and sigma_x^2 = sigma_e^2 ||x||^2 + sigma_n^2 the
log-likelihood is

    ln p(y; x) = -(m/2) ln(2 pi sigma_x^2) - ||r||^2 / (2 sigma_x^2),

its gradient in x is

    score(y; x) = [A^T r + sigma_e^2 ||r||^2 x / sigma_x^2] / sigma_x^2
                  - m sigma_e^2 x / sigma_x^2,

and the Fisher information matrix has the closed form

    J(x) = [A^T A + 2 m sigma_e^4 x x^T / sigma_x^2] / sigma_x^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModelError, InvalidInputError
from .model import (
    ProblemModel,
    SparseSignal,
    measurement_vector,
    sigma_x_squared,
)

__all__ = [
    "FisherMatrix",
    "fim_closed_form",
    "fim_monte_carlo",
    "log_likelihood",
    "score",
]

# Fixed sampling chunk so the Monte Carlo estimate is reproducible
# regardless of how chunks would be scheduled.
DEFAULT_SAMPLE_CHUNK = 1 << 15


@dataclass(frozen=True, eq=False)
class FisherMatrix:
    """Fisher information matrix together with the variance it was built at."""

    J: np.ndarray
    sigma_x2: float

    def __post_init__(self):
        J = np.asarray(self.J, dtype=float)
        if J.ndim != 2 or J.shape[0] != J.shape[1]:
            raise InvalidInputError("J must be square")
        if not np.all(np.isfinite(J)):
            raise InvalidInputError("J must be finite")
        out = np.array(J)
        out.flags.writeable = False
        object.__setattr__(self, "J", out)
        object.__setattr__(self, "sigma_x2", float(self.sigma_x2))


def _positive_sigma_x2(model: ProblemModel, signal: SparseSignal) -> float:
    sx2 = sigma_x_squared(model, signal)
    if sx2 <= 0.0:
        raise DegenerateModelError(
            "equivalent noise variance is zero; the likelihood is degenerate"
        )
    return sx2


def log_likelihood(model: ProblemModel, signal: SparseSignal, y) -> float:
    """Exact log-density of a measurement under the equivalent noise law."""
    sx2 = _positive_sigma_x2(model, signal)
    r = measurement_vector(y) - model.A @ signal.x
    if r.size != model.m:
        raise InvalidInputError("measurement length does not match model m")
    return float(-0.5 * model.m * math.log(2.0 * math.pi * sx2) - (r @ r) / (2.0 * sx2))


def score(model: ProblemModel, signal: SparseSignal, y) -> np.ndarray:
    """Gradient of log_likelihood with respect to the signal.

    Both the residual and the x-dependence of sigma_x^2 contribute; the
    second and third terms below are the latter.
    """
    sx2 = _positive_sigma_x2(model, signal)
    x = signal.x
    r = measurement_vector(y) - model.A @ x
    if r.size != model.m:
        raise InvalidInputError("measurement length does not match model m")
    se2 = model.sigma_e**2
    return model.A.T @ r / sx2 + (se2 * ((r @ r) - model.m * sx2) / sx2**2) * x


def fim_closed_form(model: ProblemModel, signal: SparseSignal) -> FisherMatrix:
    """Fisher information J(x) in closed form."""
    sx2 = _positive_sigma_x2(model, signal)
    x = signal.x
    J = model.A.T @ model.A + (2.0 * model.m * model.sigma_e**4 / sx2) * np.outer(x, x)
    J /= sx2
    J = 0.5 * (J + J.T)
    return FisherMatrix(J, sx2)


def fim_monte_carlo(
    model: ProblemModel,
    signal: SparseSignal,
    samples: int,
    rng: np.random.Generator,
    chunk: int = DEFAULT_SAMPLE_CHUNK,
) -> FisherMatrix:
    """Estimate J(x) as the sample second moment of the score.

    Residuals are drawn in fixed-size chunks directly from the equivalent
    law r ~ N(0, sigma_x^2 I) and the score is evaluated vectorized, so
    the estimate is deterministic for a given generator state.
    """
    if samples < 1:
        raise InvalidInputError("samples must be positive")
    sx2 = _positive_sigma_x2(model, signal)
    sx = math.sqrt(sx2)
    se2 = model.sigma_e**2
    x = signal.x
    m = model.m
    acc = np.zeros((model.n, model.n))
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        r = sx * rng.standard_normal((k, m))
        # rows of S are score vectors for each sampled residual
        S = r @ model.A / sx2
        if se2 > 0.0:
            rr = np.einsum("ij,ij->i", r, r)
            S += ((se2 / sx2**2) * (rr - m * sx2))[:, None] * x[None, :]
        acc += S.T @ S
        done += k
    J = acc / samples
    J = 0.5 * (J + J.T)
    return FisherMatrix(J, sx2)

"""Monte Carlo harness validating the bounds against reference estimators.

Every trial draws from its own random stream derived from the master
seed and the trial index, so results do not depend on chunking or on how
many workers execute the chunks.  Partial sums are always reduced in
chunk-index order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import PCG64, Generator, SeedSequence

from .ccrb import ccrb_maximal, ccrb_nonmaximal
from .errors import ExcessiveFailureError, InvalidInputError, SparseBoundsError
from .estimators import EstimatorSpec, apply_estimator
from .hcrb import hcrb_unit_closed_form
from .model import ProblemModel, SparseSignal, sample_measurement

__all__ = ["TrialSummary", "trial_stream", "run_trials", "sweep"]

TRIAL_CHUNK = 4096
FAILURE_BUDGET = 0.01


def trial_stream(seed: int, index: int, key: tuple[int, ...] = ()) -> Generator:
    """Independent generator for one trial of one experiment cell."""
    return Generator(PCG64(SeedSequence(entropy=seed, spawn_key=(*key, index))))


@dataclass(frozen=True, eq=False)
class TrialSummary:
    """Empirical MSE, bias vector, and the MSE's Monte Carlo standard error."""

    mse: float
    bias: np.ndarray
    trials: int
    seed: int
    std_error_mse: float
    failures: int = 0

    def __post_init__(self):
        b = np.array(self.bias, dtype=float)
        b.flags.writeable = False
        object.__setattr__(self, "bias", b)


def _chunk_sums(model, signal, estimator, seed, key, start, stop):
    x = signal.x
    sum_sq = 0.0
    sum_sq2 = 0.0
    sum_err = np.zeros(model.n)
    failures = 0
    first_error = None
    for t in range(start, stop):
        rng = trial_stream(seed, t, key)
        y = sample_measurement(model, signal, rng)
        try:
            xhat = apply_estimator(model, y, estimator)
        except SparseBoundsError as exc:
            failures += 1
            if first_error is None:
                first_error = f"trial {t}: {exc}"
            continue
        err = xhat - x
        q = float(err @ err)
        sum_sq += q
        sum_sq2 += q * q
        sum_err += err
    return sum_sq, sum_sq2, sum_err, failures, first_error


def run_trials(
    model: ProblemModel,
    signal: SparseSignal,
    estimator: EstimatorSpec,
    trials: int,
    seed: int,
    workers: int = 1,
    stream_key: tuple[int, ...] = (),
) -> TrialSummary:
    """Estimate the MSE and bias of one estimator over independent trials.

    Trials whose estimator raises are counted as failures; more than
    FAILURE_BUDGET of them aborts the run with the first diagnostic.
    The result is bit-identical for a given (seed, stream_key) no matter
    how many workers are used.
    """
    if trials < 1:
        raise InvalidInputError("trials must be positive")
    spans = [
        (lo, min(lo + TRIAL_CHUNK, trials)) for lo in range(0, trials, TRIAL_CHUNK)
    ]
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(
                pool.map(
                    lambda span: _chunk_sums(
                        model, signal, estimator, seed, stream_key, *span
                    ),
                    spans,
                )
            )
    else:
        partials = [
            _chunk_sums(model, signal, estimator, seed, stream_key, *span)
            for span in spans
        ]
    sum_sq = 0.0
    sum_sq2 = 0.0
    sum_err = np.zeros(model.n)
    failures = 0
    first_error = None
    for p_sq, p_sq2, p_err, p_fail, p_msg in partials:
        sum_sq += p_sq
        sum_sq2 += p_sq2
        sum_err += p_err
        failures += p_fail
        if first_error is None:
            first_error = p_msg
    if failures > FAILURE_BUDGET * trials:
        raise ExcessiveFailureError(
            f"{failures}/{trials} trials failed (budget {FAILURE_BUDGET:.0%}); "
            f"first failure: {first_error}"
        )
    ok = trials - failures
    mse = sum_sq / ok
    if ok > 1:
        var = max(sum_sq2 - ok * mse * mse, 0.0) / (ok - 1)
        std_error = math.sqrt(var / ok)
    else:
        std_error = 0.0
    return TrialSummary(
        mse=mse,
        bias=sum_err / ok,
        trials=trials,
        seed=seed,
        std_error_mse=std_error,
        failures=failures,
    )


def _analytic_bounds(model: ProblemModel, signal: SparseSignal) -> dict:
    out = {"ccrb": None, "hcrb": None, "oracle_theory": None}
    try:
        if signal.nonzero_count == model.s:
            rep = ccrb_maximal(model, signal)
            out["oracle_theory"] = rep.first_term
        else:
            rep = ccrb_nonmaximal(model, signal)
        out["ccrb"] = rep.bound
    except SparseBoundsError:
        pass
    try:
        out["hcrb"] = hcrb_unit_closed_form(model, signal).bound
    except SparseBoundsError:
        pass
    return out


def sweep(
    instances,
    estimators: list[EstimatorSpec],
    trials: int,
    seed: int,
    workers: int = 1,
) -> list[dict]:
    """Run every estimator on every instance of a parameter grid.

    `instances` yields (point, model, signal) where point is a dict of
    grid coordinates.  Returns one row per (point, estimator) carrying
    the trial summary next to the analytic bound values; with no
    estimators, one bounds-only row per point.  Each cell uses the
    stream key (point index, estimator index) so the whole sweep is
    reproducible from the single seed.
    """
    rows: list[dict] = []
    for idx, (point, model, signal) in enumerate(instances):
        bounds = _analytic_bounds(model, signal)
        if not estimators:
            rows.append(
                {
                    **point,
                    "estimator": "",
                    "mse": None,
                    "std_error": None,
                    "bias_l2": None,
                    "trials": 0,
                    "failures": 0,
                    **bounds,
                }
            )
            continue
        for j, est in enumerate(estimators):
            summary = run_trials(
                model,
                signal,
                est,
                trials,
                seed,
                workers=workers,
                stream_key=(idx, j),
            )
            rows.append(
                {
                    **point,
                    "estimator": est.name,
                    "mse": summary.mse,
                    "std_error": summary.std_error_mse,
                    "bias_l2": float(np.linalg.norm(summary.bias)),
                    "trials": summary.trials,
                    "failures": summary.failures,
                    **bounds,
                }
            )
    return rows

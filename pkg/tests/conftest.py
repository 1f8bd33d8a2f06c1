import re

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

CRITERIA = {
    1: "Monte Carlo FIM matches the closed form within 2% (10^6 samples, <30s)",
    2: "oracle MSE matches theory within 3 stderr and sits above the CCRB",
    3: "measured gamma inside the sandwich on all exhaustive-RIP instances",
    4: "log-log slope of gamma vs s in [-1.25, -0.75] for all noise pairs (<5min)",
    5: "gamma at the transition point equals 1/(2s) to 1e-12",
    6: "HCRB >= CCRB, gap < 1e-3 at x_q = 1e-6, g(beta) in [0, 1)",
    7: "general HCRB recovers the CCRB within 0.1% (identity) / 1% (random A)",
    8: "H entries match the density-ratio sampling oracle within 3 MC stderr",
    9: "high-dimension table: LS in [0.9, 1.1]e-4, noise-exploiting in [4.5, 5.5]e-5 (<2min)",
    10: "HCRB gap grows 10x over the sigma_e^2 sweep, monotone per sparsity",
    11: "unbiased MSE >= HCRB - 3 stderr everywhere; ML dips below at strong noise",
    12: "figure commands are byte-identical across reruns with one seed",
}

settings.register_profile(
    "suite",
    derandomize=True,
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion, independent of capture."""
    verdicts = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            m = re.search(r"test_criterion_(\d+)", getattr(rep, "nodeid", ""))
            if m:
                num = int(m.group(1))
                verdicts[num] = verdicts.get(num, True) and status == "passed"
    if not verdicts:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num in sorted(verdicts):
        word = "PASS" if verdicts[num] else "FAIL"
        terminalreporter.write_line(f"{word} criterion {num}: {CRITERIA[num]}")


def numerical_gradient(f, x, h=1e-6):
    """Central finite differences of a scalar function of a vector."""
    g = np.zeros_like(x, dtype=float)
    for i in range(x.size):
        xp = np.array(x, dtype=float)
        xm = np.array(x, dtype=float)
        xp[i] += h
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2.0 * h)
    return g

import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SEED = int(os.environ.get("SPECTRATOPE_SEED", 0xC0FFEE))


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def random_stochastic(rng, n, sparsity=0.0):
    A = rng.random((n, n)) * (rng.random((n, n)) >= sparsity)
    A[np.arange(n), rng.integers(n, size=n)] += 1e-3
    return A / A.sum(axis=1, keepdims=True)


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(ACCEPTANCE_RESULTS[number])

import os
import sys

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ci", max_examples=60, deadline=None)
settings.register_profile("stress", max_examples=2000, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def blobs(rng, n_per=20, K=3, d=2, sep=10.0):
    """Well-separated Gaussian clouds; returns (X, y)."""
    centers = rng.standard_normal((K, d)) * sep
    X = np.vstack([c + rng.standard_normal((n_per, d)) * 0.3 for c in centers])
    y = np.repeat(np.arange(K), n_per)
    return X, y


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

import numpy as np
import pytest

from migrasim.graph import random_graph


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def mutual_pair(weight=1.0):
    return np.array([[0.0, weight], [weight, 0.0]])


def random_weights(rng, n, sparse=0.0, upper=0.1):
    return random_graph(n, upper, sparse, rng=rng)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

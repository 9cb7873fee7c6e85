import time

import numpy as np
import pytest

from secnet.config import NetworkConfig
from secnet.montecarlo import simulate

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def fig2():
    """Reference scenario parameters with the eavesdropper at (0, 60 m)."""
    return NetworkConfig()


@pytest.fixture(scope="session")
def fig2_batch_1e6():
    """One million simulated trials at the reference parameters, eavesdropper at (0, 60 m).

    The wall time of the run is attached as ``elapsed``.
    """
    start = time.perf_counter()
    batch = simulate(NetworkConfig(seed=11), 1_000_000)
    batch.elapsed = time.perf_counter() - start
    return batch


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

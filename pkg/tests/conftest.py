import math

import numpy as np
import pytest

from haarbench import PureState, RandomStream

BELL = PureState(np.array([1, 0, 0, 1]) / math.sqrt(2))
GAMMA06 = PureState(np.array([math.sqrt(0.8), 0, 0, math.sqrt(0.2)]))


@pytest.fixture
def rng():
    return RandomStream(seed=1234)


def brute_partial_trace(rho, d, keep):
    """Loop-based partial trace, independent of the einsum path."""
    out = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for k in range(d):
            for j in range(d):
                if keep == "A":
                    out[i, k] += rho[i * d + j, k * d + j]
                else:
                    out[i, k] += rho[j * d + i, j * d + k]
    return out


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

from fractions import Fraction

import numpy as np
import pytest

from eda_lab import LevelDistribution

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def fdist(levels, mass):
    """Exact (Fraction) level distribution from string/int masses."""
    return LevelDistribution(np.asarray(levels), [Fraction(m) for m in mass])


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)

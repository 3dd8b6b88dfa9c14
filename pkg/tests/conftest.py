import numpy as np
import pytest

from threepoint import CoefficientPair, random_in_ball


@pytest.fixture(scope="session")
def zero():
    return CoefficientPair.zero(4)


@pytest.fixture(scope="session")
def small():
    """A fixed pair with ||u||_1 = 0.05 and four modes."""
    u = random_in_ball(0.1, 4, seed=11)
    return u * (0.05 / u.norm1())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)

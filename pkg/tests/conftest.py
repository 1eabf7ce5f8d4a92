from fractions import Fraction

import pytest

from dirichlet_spectrum import construct, make_schedule
from dirichlet_spectrum.schedule import ParameterSchedule, StepParams

HALF = Fraction(1, 2)
EPS = Fraction(1, 100)


@pytest.fixture(scope="session")
def run_half():
    """theorem2, lambda = 1/2, eps = 1/100, eight steps."""
    return construct(make_schedule("theorem2", HALF, 8, epsilon=EPS))


@pytest.fixture(scope="session")
def run_case2():
    return construct(make_schedule("theorem2", Fraction(11, 10), 6, epsilon=EPS))


@pytest.fixture(scope="session")
def run_theorem1():
    return construct(make_schedule("theorem1", HALF, 6))


def coarse_schedule(k=4, alpha=Fraction(1, 4), omega=Fraction(3, 8), steps=6):
    """eps = 1/8, far outside the admissible range, so q stays small enough to enumerate."""
    eps = omega - alpha
    return ParameterSchedule("theorem2", (alpha + omega) / 2,
                             tuple(StepParams(n, "case1", eps, alpha, omega, k) for n in range(1, steps + 1)),
                             eps * 4)


@pytest.fixture(scope="session")
def coarse_run():
    return construct(coarse_schedule(), enum_limit=10 ** 5)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])

from fractions import Fraction

import pytest

from gasket_si.gasket import GasketParams
from gasket_si.kernel import KernelSpec

LAMBDAS = [Fraction(1, 4), Fraction(1, 5), Fraction(3, 10)]

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def quarter():
    return GasketParams(Fraction(1, 4))


@pytest.fixture(scope="session")
def quarter_spec(quarter):
    return KernelSpec.build(quarter)


@pytest.fixture(scope="session", params=LAMBDAS, ids=lambda f: f"lam={f}")
def spec(request):
    return KernelSpec.build(GasketParams(request.param))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import pytest

from bgls.quadrature import QuadratureConfig
from bgls.radial import DeltaModel, DomainSpec, PoincareParams

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def quad():
    return QuadratureConfig()


@pytest.fixture(scope="session")
def params2():
    return PoincareParams(alpha=0.0, d=2)


@pytest.fixture(scope="session")
def ball2():
    return DomainSpec.ball(2, DeltaModel.ORIGIN)


@pytest.fixture(scope="session")
def exterior2():
    return DomainSpec.exterior(2)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

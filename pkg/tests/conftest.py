import pytest

from jetfield import ChartSpec, LagrangianSystem, parse


def pytest_terminal_summary(terminalreporter):
    """One visible line per acceptance guarantee, if that module ran."""
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get(
        "tests.test_acceptance"
    )
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)


@pytest.fixture
def chart21():
    return ChartSpec(2, 1)


@pytest.fixture
def chart11():
    return ChartSpec(1, 1)


@pytest.fixture
def kg(chart21):
    """Klein-Gordon scalar field on a 2d base."""
    return LagrangianSystem(
        chart21, parse("1/2*(v1_1^2 - v1_2^2) - 1/2*y1^2", chart21)
    )


@pytest.fixture
def laplace(chart21):
    return LagrangianSystem(chart21, parse("1/2*(v1_1^2 + v1_2^2)", chart21))


@pytest.fixture
def free_mechanics(chart11):
    return LagrangianSystem(chart11, parse("1/2*v1_1^2", chart11))


@pytest.fixture
def singular_n2():
    """One kinetic term, two fields: rank-deficient Hessian."""
    chart = ChartSpec(1, 2)
    return LagrangianSystem(chart, parse("1/2*v1_1^2", chart))


@pytest.fixture
def incompatible_n2():
    """L = v1_1 * y2: the second coefficient equation reads 0 = v1_1."""
    chart = ChartSpec(1, 2)
    return LagrangianSystem(chart, parse("v1_1*y2", chart))

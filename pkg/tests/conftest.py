import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from starproc import fixtures
from starproc.expr import ONE, ZERO, Act, Prod, Star, Sum

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

LETTERS = ["a", "b", "c"]

exprs = st.recursive(
    st.sampled_from([ZERO, ONE] + [Act(x) for x in LETTERS]),
    lambda sub: st.one_of(
        st.builds(Sum, sub, sub),
        st.builds(Prod, sub, sub),
        st.builds(Star, sub),
    ),
    max_leaves=6,
)

seeds = st.integers(min_value=0, max_value=10_000)


@pytest.fixture
def fig1():
    return fixtures.load("fig1")


@pytest.fixture
def fig4():
    return fixtures.load("fig4")


@pytest.fixture
def fig5():
    return fixtures.load("fig5")


@pytest.fixture
def fig5_witness():
    return fixtures.load_witness("fig5_witness")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)

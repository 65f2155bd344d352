import pytest

from pyramid_walk import PiecewiseConstant, PointSource, build_domain

TRI_VERTICES = [(3.0, 0.0), (0.0, 2.0), (-2.0, -2.0)]
OCT_VERTICES = [(2.0, 0.0), (1.5, 1.0), (0.0, 2.0), (-1.0, 2.0),
                (-2.0, 0.0), (-1.5, -1.0), (0.0, -2.0), (1.0, -1.5)]
SOURCE = (0.0, 0.0, -4.0)


@pytest.fixture(scope="session")
def tri():
    return build_domain(2.0, TRI_VERTICES)


@pytest.fixture(scope="session")
def octo():
    return build_domain(2.0, OCT_VERTICES)


@pytest.fixture(scope="session")
def tri_spec():
    return PiecewiseConstant((3, 2, 1), 4)


@pytest.fixture(scope="session")
def oct_spec():
    return PiecewiseConstant((1, 0, 2, 1, 3, 0, 1, 2), 4)


@pytest.fixture(scope="session")
def source_spec():
    return PointSource(SOURCE)


# One line per acceptance criterion, repeated in the terminal summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

import pytest

from cascadelab import ModelParams, UniformCost


@pytest.fixture
def params():
    return ModelParams()


@pytest.fixture
def uniform():
    return UniformCost(1.0)


# one summary line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("#")[1].split()[0])):
            terminalreporter.write_line(line)

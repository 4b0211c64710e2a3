import pytest
from hypothesis import settings

from advshape import GridConfig, train_teacher

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_teacher():
    return train_teacher(GridConfig(4, 4), episodes=2_000, seed=11)

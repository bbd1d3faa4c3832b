import random

import pytest


@pytest.fixture
def rng():
    return random.Random(20240611)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    def emit(line):
        ACCEPTANCE_LINES.append(line)
        print(line)

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

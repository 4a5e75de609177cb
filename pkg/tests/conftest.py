import os

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

BEAR = [[1, -2], [1, 0]]
TWO_DIGITS = [(0, 0), (1, 0)]
THREEDIG1 = [[1, -2], [1, 1]]
THREEDIG2 = [[1, -1], [1, 2]]
THREE_DIGITS = [(0, 0), (1, 0), (0, 1)]
DRAGON = [[1, -1], [1, 1]]
CUBE = [[0, 0, 2], [1, 0, 0], [0, 1, 0]]
CUBE_DIGITS = [(0, 0, 0), (1, 0, 0)]
DIAG32 = [[3, 0], [0, 2]]
SQUARE6 = [(i, j) for j in range(2) for i in range(3)]
MODIFIED6 = [(0, 0), (1, 0), (2, 0), (3, 1), (1, 1), (2, 1)]
BEAR_CYLINDER = [[2, 0, 0], [0, 1, -2], [0, 1, 0]]
CYLINDER_DIGITS = [(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 0)]

CORPUS = {
    "haar": ([[2]], [(0,), (1,)]),
    "triadic": ([[3]], [(0,), (1,), (2,)]),
    "square": ([[2, 0], [0, 2]], [(0, 0), (1, 0), (0, 1), (1, 1)]),
    "bear": (BEAR, TWO_DIGITS),
    "dragon": (DRAGON, TWO_DIGITS),
    "threedig1": (THREEDIG1, THREE_DIGITS),
    "threedig2": (THREEDIG2, THREE_DIGITS),
    "diag32": (DIAG32, MODIFIED6),
}

_acceptance_lines = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)

import random

import pytest
from hypothesis import strategies as st

from lynperm.perm import Permutation


@st.composite
def permutations(draw, min_size=0, max_size=7):
    n = draw(st.integers(min_size, max_size))
    return Permutation(draw(st.permutations(range(1, n + 1))))


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)

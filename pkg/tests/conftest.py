import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import _acceptance_log  # noqa: E402
from hilbertdim import generators  # noqa: E402


@pytest.fixture
def chsh():
    return generators.chsh_optimal()


@pytest.fixture
def magic():
    return generators.magic_square()


@pytest.fixture
def rng():
    return np.random.default_rng(20160101)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_log.LINES:
            terminalreporter.write_line(line)

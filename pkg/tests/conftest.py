import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rlga_pfsp.pfsp import Instance  # noqa: E402
from rlga_pfsp.taillard import ta20_5  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny():
    # rows are machines, columns jobs
    return Instance("tiny", ((3, 2), (2, 4)))


@pytest.fixture(scope="session")
def ta001():
    return ta20_5(1)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

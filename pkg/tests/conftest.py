import sys
from pathlib import Path

import pytest

from fastpolar.code import read_spec

TESTS = Path(__file__).resolve().parent
CODES = TESTS.parent / "codes"
sys.path.insert(0, str(TESTS))


def code_path(n: int, k: int) -> Path:
    return CODES / f"polar_{n}_{k}.spec"


@pytest.fixture(scope="session")
def spec_8_5():
    return read_spec(code_path(8, 5))


@pytest.fixture(scope="session")
def spec_2048_1024():
    return read_spec(code_path(2048, 1024))


@pytest.fixture(scope="session")
def spec_2048_1707():
    return read_spec(code_path(2048, 1707))


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)

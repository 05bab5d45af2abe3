from fractions import Fraction
from pathlib import Path

import pytest

from segforge.market import validate_market

MARKETS = Path(__file__).resolve().parent.parent / "markets"

ACCEPTANCE_LINES: list[str] = []


def vertical():
    """Two firms, superior and inferior; half the consumers value the superior good at 7, half at 3."""
    return validate_market(
        {
            "firms": 2,
            "costs": ["0", "0"],
            "value_cap": "7",
            "types": [
                {"values": ["7", "1"], "mass": "1/2"},
                {"values": ["3", "1"], "mass": "1/2"},
            ],
        }
    )


def horizontal():
    return validate_market(
        {
            "firms": 2,
            "costs": ["0", "0"],
            "value_cap": "7",
            "types": [{"values": v, "mass": "1/4"} for v in (["7", "1"], ["3", "1"], ["1", "3"], ["1", "7"])],
        }
    )


@pytest.fixture
def vertical_market():
    return vertical()


@pytest.fixture
def horizontal_market():
    return horizontal()


@pytest.fixture
def markets_dir():
    return MARKETS


F = Fraction


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

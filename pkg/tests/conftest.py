import sys
from fractions import Fraction
from pathlib import Path

import pytest

from skalc.model import HypergraphSource

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> (description, passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def triangle(active="123", w=1):
    return HypergraphSource.build("123", [("12", w), ("13", w), ("23", w)], active)


def path3(active="123"):
    return HypergraphSource.build("123", [("12", 1), ("23", 1)], active)


def two_users():
    return HypergraphSource.build("12", [("12", 1)])


def independent_users():
    return HypergraphSource.build("123", [("1", 1), ("2", 1), ("3", Fraction(1, 2))])


def cycle4():
    return HypergraphSource.build("1234", [("12", 1), ("23", 1), ("34", 1), ("14", 1)])


@pytest.fixture
def tri():
    return triangle()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        desc, ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {desc}  [{detail}]")

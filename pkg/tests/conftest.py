from __future__ import annotations

import sys
from pathlib import Path

import pytest

from gwsd.formats import load

GOLDEN = Path(__file__).parent / "golden"


def golden(name: str):
    return load(GOLDEN / name).payload


@pytest.fixture
def gold():
    return golden


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])

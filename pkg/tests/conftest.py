import json
import sys
from pathlib import Path

import pytest

from possibility.cli import document_to_frame

DATA = Path(__file__).parent / "data"


def load_frame(name: str):
    return document_to_frame(json.loads((DATA / "frames" / f"{name}.json").read_text()))


@pytest.fixture(scope="session")
def corpus():
    return {p.stem: load_frame(p.stem) for p in sorted((DATA / "frames").glob("*.json"))}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

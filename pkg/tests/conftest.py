import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ehorm_sim.radio_model import RadioParams  # noqa: E402


@pytest.fixture
def radio():
    return RadioParams()


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one verdict line per acceptance criterion; echoed in the terminal summary."""

    def emit(number, verdict, text, details=()):
        ACCEPTANCE_LINES.append(f"criterion {number}: {verdict:4s} {text}")
        ACCEPTANCE_LINES.extend(f"    {line}" for line in details)
        print(ACCEPTANCE_LINES[-1 - len(details)])
        for line in details:
            print(f"    {line}")

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

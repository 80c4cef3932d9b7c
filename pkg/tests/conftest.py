from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

# (criterion, passed, detail) tuples appended by test_acceptance.py
ACCEPTANCE_RESULTS = []


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: int(r[0].split()[0])):
        terminalreporter.write_line(f"[{status}] {name}: {detail}")

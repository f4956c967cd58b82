import pytest

from locverify.scenario import preset


@pytest.fixture
def bs4():
    return preset("bs4")


@pytest.fixture
def bs6():
    return preset("bs6")


ACCEPTANCE_LINES = []


@pytest.fixture
def record():
    """Collect a one-line pass/fail verdict for the terminal summary."""

    def _record(criterion, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import pytest

ACCEPTANCE_LINES = []


def record(line: str) -> None:
    """Queue an acceptance verdict line for the terminal summary."""
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.fixture
def report():
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

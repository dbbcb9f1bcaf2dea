import pytest

_LINES = []


@pytest.fixture
def verdict_line():
    """Record the one-line acceptance summary of a criterion."""
    def record(number, title, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {title} ({detail})"
        _LINES.append((number, line))
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)

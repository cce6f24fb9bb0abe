import pytest

_ACCEPTANCE = []


@pytest.fixture
def acceptance_log():
    """Append ``(number, line)`` for the end-of-session criterion summary."""
    return lambda num, line: _ACCEPTANCE.append((num, line))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{num:2d}] {line}")

import pytest

_ACCEPTANCE: dict[str, str] = {}


@pytest.fixture
def report():
    """Record one summary line per acceptance criterion."""

    def record(key: str, passed: bool, detail: str) -> None:
        line = f"criterion {key}: {'PASS' if passed else 'FAIL'}  {detail}"
        _ACCEPTANCE[key] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: (len(k), k)):
        terminalreporter.write_line(_ACCEPTANCE[key])

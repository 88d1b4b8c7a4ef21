import pytest

_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def record():
    """Store one verdict per acceptance criterion for the terminal summary."""

    def _record(criterion, ok, detail):
        prev_ok, prev_detail = _ACCEPTANCE.get(criterion, (True, ""))
        joined = f"{prev_detail}; {detail}" if prev_detail else detail
        _ACCEPTANCE[criterion] = (prev_ok and bool(ok), joined)
        return bool(ok)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[criterion]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")

import pytest

# criterion number -> list of (label, passed, detail)
ACCEPTANCE = {}


@pytest.fixture
def record():
    def _record(number, label, passed, detail=""):
        ACCEPTANCE.setdefault(number, []).append((label, bool(passed), detail))
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        for label, passed, detail in ACCEPTANCE[number]:
            status = "PASS" if passed else "FAIL"
            terminalreporter.write_line(f"[{status}] {number}. {label}: {detail}")

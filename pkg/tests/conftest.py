import os

import pytest

# Filled by tests/test_acceptance.py: (criterion id, title, passed, detail)
ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    def record(cid, title, passed, detail=""):
        ACCEPTANCE_LINES.append((cid, title, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for cid, title, passed, detail in sorted(ACCEPTANCE_LINES, key=lambda x: x[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {cid:<4} {title}" + (f"  ({detail})" if detail else ""))
    terminalreporter.write_line(f"kernels: {os.environ.get('HOLOSEM_DISABLE_NUMBA') and 'numpy fallback' or 'default'}")

import pytest
from mpmath import mp

# acceptance criterion -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture(autouse=True)
def _precision_guard():
    # tests must not leak mpmath precision into each other
    prec = mp.prec
    yield
    mp.prec = prec


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")

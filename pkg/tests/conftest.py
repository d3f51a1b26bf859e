import time

import pytest

from lattice_bec.potential import PeriodicPotential

SUITE_BUDGET = 300.0
_START = time.perf_counter()
ACCEPTANCE_LINES = {}


def record(criterion, ok, detail):
    line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[criterion] = line
    print(line)
    return ok


@pytest.fixture
def sin2():
    return PeriodicPotential.sin2(1.0, 0.05)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    elapsed = time.perf_counter() - _START
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        line = ACCEPTANCE_LINES[key]
        if key == 12:
            ok = elapsed < SUITE_BUDGET and "PASS" in line
            line = line.replace("PASS", "PASS" if ok else "FAIL") + f"; suite wall time {elapsed:.1f} s (< {SUITE_BUDGET:.0f} s)"
        tr.write_line(line)

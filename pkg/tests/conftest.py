import re

import numpy as np
import pytest

from bbt_lab.minsupport import support_census

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def record(criterion, passed: bool, detail: str) -> None:
    line = f"[criterion {criterion}] {'PASS' if passed else 'FAIL'}: {detail}"
    ACCEPTANCE.setdefault(criterion, []).append((passed, detail))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE, key=lambda c: (int(re.match(r"\d+", str(c)).group()), str(c))):
        for passed, detail in ACCEPTANCE[crit]:
            terminalreporter.write_line(f"criterion {crit:<5} {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def n3_census():
    return support_census(3)


@pytest.fixture(scope="session")
def n4_census():
    # full certified census, about 20 s
    return support_census(4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

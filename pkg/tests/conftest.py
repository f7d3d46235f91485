from __future__ import annotations

import pytest

from pathcount.instance import parse_instance

WORKED = """\
p edge 4 5
e 1 2
e 2 3
e 3 4
e 1 4
e 2 4
l 2
t 1 3
"""

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def worked():
    return parse_instance(WORKED)


@pytest.fixture
def worked_pca(worked):
    return worked.with_terminals(None)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")

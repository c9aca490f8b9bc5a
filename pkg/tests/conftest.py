from __future__ import annotations

import numpy as np
import pytest

from xicensus.argtrack import audit_traces

# acceptance results keyed by criterion number: (passed, detail)
ACCEPTANCE: dict[int, tuple[bool, str]] = {}
SESSION_AUDIT = {}


@pytest.fixture(scope="session", autouse=True)
def session_trace_audit():
    """Audit every argument trace produced by any test in the session."""
    with audit_traces() as audit:
        SESSION_AUDIT["audit"] = audit
        yield audit
    assert audit.ok, f"sign-change inequality violated on {len(audit.violations)} traces: {audit.violations[:5]}"


@pytest.fixture
def criterion():
    def record(number: int, passed: bool, detail: str) -> bool:
        ACCEPTANCE[number] = (bool(passed), detail)
        print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
        return bool(passed)

    return record


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
    audit = SESSION_AUDIT.get("audit")
    if audit is not None:
        terminalreporter.write_line(
            f"session trace audit: {audit.traces} traces, {len(audit.violations)} violations, "
            f"worst slack {audit.worst_slack:.3g}")

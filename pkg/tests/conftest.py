import os
import tempfile
from collections import defaultdict

import pytest

# keep Monte Carlo moment records out of the user's cache during tests
os.environ.setdefault("ROBUST_PB_CACHE", os.path.join(tempfile.mkdtemp(prefix="robust-pb-test-"), "moments.json"))

_ACCEPTANCE = defaultdict(list)


@pytest.fixture
def record_acceptance():
    """Record ``(passed, detail)`` for an acceptance criterion; a criterion passes if all its records do."""

    def record(criterion: int, passed: bool, detail: str = ""):
        _ACCEPTANCE[criterion].append((bool(passed), detail))
        print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'} {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(_ACCEPTANCE):
        recs = _ACCEPTANCE[c]
        ok = all(p for p, _ in recs)
        failed = [d for p, d in recs if not p]
        note = f"{len(recs)} check(s)" + (f"; failing: {'; '.join(failed)}" if failed else "")
        terminalreporter.write_line(f"criterion {c:2d}: {'PASS' if ok else 'FAIL'} ({note})")

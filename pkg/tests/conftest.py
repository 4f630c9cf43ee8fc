from __future__ import annotations

import re
import time
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "data" / "corpus.json"

SUITE_LIMIT_SECONDS = 300.0
N_CRITERIA = 12

# criterion number -> list of (label, ok, detail)
_RESULTS: dict[int, list] = {}
_START = [0.0]


def pytest_sessionstart(session):
    _START[0] = time.perf_counter()


class GateFailure(AssertionError):
    pass


def _record(num: int, label: str, ok: bool, detail: str = ""):
    _RESULTS.setdefault(num, []).append((label, bool(ok), detail))


@pytest.fixture
def gate():
    """Record a criterion sub-check, then assert it."""

    def _gate(num: int, label: str, ok: bool, detail: str = ""):
        _record(num, label, ok, detail)
        if not ok:
            raise GateFailure(f"criterion {num} [{label}] failed: {detail}")

    return _gate


@pytest.fixture(scope="session")
def corpus_path():
    return CORPUS


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    # a criterion test that dies before reaching its gate must not look green
    m = re.match(r"test_c(\d+)_", item.name)
    if m and "test_acceptance" in str(item.fspath) and rep.failed:
        if call.excinfo is None or not call.excinfo.errisinstance(GateFailure):
            err = call.excinfo.typename if call.excinfo else rep.when
            _record(int(m.group(1)), item.name, False, f"raised {err}")


def _acceptance_ran(session) -> bool:
    return any("test_acceptance" in str(item.fspath) for item in session.items)


def pytest_sessionfinish(session, exitstatus):
    if not _acceptance_ran(session):
        return
    elapsed = time.perf_counter() - _START[0]
    ok = elapsed < SUITE_LIMIT_SECONDS
    _record(12, "suite runtime", ok, f"{elapsed:.1f} s (limit {SUITE_LIMIT_SECONDS:.0f} s)")
    if not ok and session.exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    passed = 0
    for num in range(1, N_CRITERIA + 1):
        subs = _RESULTS.get(num)
        if not subs:
            tr.write_line(f"criterion {num:2d}: FAIL (not evaluated)")
            continue
        ok = all(s[1] for s in subs)
        passed += ok
        failed = [f"{lab}: {det}" for lab, good, det in subs if not good]
        tail = "; ".join(failed) if failed else "; ".join(f"{lab}: {det}" for lab, _, det in subs if det)
        tr.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} ({len(subs)} checks) {tail}")
    tr.write_line(f"{passed}/{N_CRITERIA} criteria pass")

from __future__ import annotations

import pytest

from botwatch.config import fixture_root
from botwatch.corpus import load_dataset

ACCEPTANCE = pytest.StashKey[dict]()

CRITERIA = {
    1: "Table 2 replica (survivability)",
    2: "Table 3 replica (effects and significance)",
    3: "Table 4 replica (crowd accuracies)",
    4: "Table 7 consistency audit",
    5: "DNA detector property suite",
    6: "statistical kernels",
    7: "graph detector oracle",
    8: "CLI determinism",
}


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


@pytest.fixture
def acceptance(request):
    """Record an acceptance sub-check: ``acceptance(criterion, check, ok, detail)``."""
    log = request.config.stash[ACCEPTANCE]

    def record(criterion: int, check: str, ok: bool, detail: str = "") -> bool:
        log.setdefault(criterion, []).append((check, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(ACCEPTANCE, {})
    if not log:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(CRITERIA):
        checks = log.get(c)
        if not checks:
            tr.write_line(f"SKIP  {c}. {CRITERIA[c]}: not run")
            continue
        failed = [(name, detail) for name, ok, detail in checks if not ok]
        status = "FAIL" if failed else "PASS"
        summary = f"{len(checks) - len(failed)}/{len(checks)} checks"
        if failed:
            summary += "; failing: " + "; ".join(
                f"{name} ({detail})" if detail else name for name, detail in failed
            )
        tr.write_line(f"{status}  {c}. {CRITERIA[c]}: {summary}")


@pytest.fixture(scope="session")
def fixtures():
    return fixture_root()


@pytest.fixture(scope="session")
def genuine(fixtures):
    return load_dataset(fixtures / "genuine_accounts")


@pytest.fixture(scope="session")
def social1(fixtures):
    return load_dataset(fixtures / "social_spambots_1")

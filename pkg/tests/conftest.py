import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lyapnum import cli  # noqa: E402
from lyapnum.estimators import EstimatorConfig  # noqa: E402
from lyapnum.report import RunManifest  # noqa: E402

_STASH = pytest.StashKey[dict]()


class DeskRuns:
    """Desk-preset runs shared by every test in the session (they take
    seconds to a minute each)."""

    def __init__(self):
        self._cache = {}

    def get(self, name: str, jobs: int = 1):
        if name not in self._cache:
            manifest = RunManifest(name, EstimatorConfig.preset("desk"))
            t0 = time.perf_counter()
            spec, rep, theorems = cli._run(manifest, jobs)
            self._cache[name] = (spec, rep, theorems, time.perf_counter() - t0)
        return self._cache[name]


@pytest.fixture(scope="session")
def desk():
    return DeskRuns()


@pytest.fixture
def acceptance(request):
    """``record(number, passed, detail)`` for the acceptance summary."""
    store = request.config.stash.setdefault(_STASH, {})

    def record(number: int, passed: bool, detail: str):
        store[number] = (passed, detail)
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_STASH, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        passed, detail = store[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")

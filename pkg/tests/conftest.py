import json
import pathlib
import time

import pytest
from hypothesis import settings

from kirchhoff_gs import (Affine, CriticalExponential, CriticalSobolev, LocalProblem, NonlinearitySpec,
                          find_ground_state, lift, rational_well)
from kirchhoff_gs.semiclassical import continuation_sweep, limit_state

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

DATA = pathlib.Path(__file__).parent / "data"
SWEEP_EPS = [0.5, 0.2, 0.1, 0.05]

# criterion number -> list of (check name, passed); filled by test_acceptance
ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def oracles():
    return json.loads((DATA / "oracles.json").read_text())


@pytest.fixture(scope="session")
def prob3():
    return LocalProblem(NonlinearitySpec(3, CriticalSobolev(1.0, 5.0)), 1.0)


@pytest.fixture(scope="session")
def prob2():
    return LocalProblem(NonlinearitySpec(2, CriticalExponential(1.0)), 1.0)


@pytest.fixture(scope="session")
def affine():
    return Affine(1.0, 0.5)


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


@pytest.fixture(scope="session")
def gs3_timed(prob3):
    return _timed(find_ground_state, prob3)


@pytest.fixture(scope="session")
def gs2_timed(prob2):
    return _timed(find_ground_state, prob2)


@pytest.fixture(scope="session")
def gs3(gs3_timed):
    return gs3_timed[0]


@pytest.fixture(scope="session")
def gs2(gs2_timed):
    return gs2_timed[0]


@pytest.fixture(scope="session")
def lift3(gs3, affine):
    return lift(gs3, affine)


@pytest.fixture(scope="session")
def lift2(gs2, affine):
    return lift(gs2, affine)


@pytest.fixture(scope="session")
def well():
    return rational_well(1.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def limit3_timed(gs3, affine):
    return _timed(limit_state, gs3, affine)


@pytest.fixture(scope="session")
def limit3(limit3_timed):
    return limit3_timed[0]


@pytest.fixture(scope="session")
def sweep_timed(limit3, affine, well):
    """(sweep, seconds); the limit state's own time is in limit3_timed."""
    return _timed(continuation_sweep, well, limit3.spec, affine, SWEEP_EPS, limit3)


@pytest.fixture(scope="session")
def sweep(sweep_timed):
    return sweep_timed[0]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[k]
        ok = bool(checks) and all(p for _, p in checks)
        failed = [name for name, p in checks if not p]
        detail = "" if ok else f"  failed: {', '.join(failed)}"
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} ({len(checks)} checks){detail}")

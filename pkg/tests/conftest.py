import os

import numpy as np
import pytest

LONG = os.environ.get("SYMDEFECT_LONG", "") in ("1", "true", "yes")


def pytest_collection_modifyitems(config, items):
    if LONG:
        return
    skip = pytest.mark.skip(reason="long-running; set SYMDEFECT_LONG=1")
    for item in items:
        if "long_running" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def union_of_bases(d: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """``m`` Haar-random orthonormal bases side by side: a unit-norm tight
    frame with ``N = m d`` (a rank-one POVM after scaling by ``d/N``)."""
    return np.hstack([haar_unitary(d, rng) for _ in range(m)])


#: Filled by test_acceptance.py: (criterion id, passed, message)
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, msg in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {cid}: {msg}")

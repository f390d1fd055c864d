import sys

import numpy as np
import pytest

from dirmeas.wavefield import WaveFunction, make_grid, normalize


def random_state(n, seed=0, half_range=1.0):
    rng = np.random.default_rng(seed)
    g = make_grid(n, half_range)
    return normalize(WaveFunction(g, rng.normal(size=n) + 1j * rng.normal(size=n)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

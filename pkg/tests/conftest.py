import sys

import numpy as np
import pytest

from cpisim.grid import make_grid
from cpisim.pulse import PulseSpec
from cpisim.units import wavelength_to_omega

OMEGA_800 = float(wavelength_to_omega(800.0))


@pytest.fixture(scope="session")
def ref_grid():
    return make_grid(2**19, 400_000.0, OMEGA_800)


@pytest.fixture(scope="session")
def small_grid():
    # 40 ps window at 0.61 fs steps: enough for ~10 ps chirped pulses
    return make_grid(2**16, 40_000.0, OMEGA_800)


@pytest.fixture(scope="session")
def pulse10():
    return PulseSpec(10.0, 800.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def reference_setups(ref_grid, pulse10):
    from cpisim.interferometer import CpiSetup
    from cpisim.pulse import REFERENCE_CHIRPS
    return {kind: CpiSetup(chirp, pulse10, ref_grid) for kind, chirp in REFERENCE_CHIRPS.items()}


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "CRITERIA", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])

import math

import numpy as np
import pytest

from combnoise.cavity import CavityParams
from combnoise.comb import FrequencyGrid, collective_modes, gaussian_envelope, partition

CENTER = 795e-9
FWHM = 6e-9


@pytest.fixture(scope="session")
def gauss_envelope():
    # ten 1.5 nm bands over a 15 nm window of a 6 nm FWHM spectrum
    return gaussian_envelope(CENTER, FWHM, FrequencyGrid.around(CENTER, 15e-9, 512))


@pytest.fixture(scope="session")
def gauss_zones(gauss_envelope):
    return partition(gauss_envelope, 10)


@pytest.fixture(scope="session")
def gauss_modes(gauss_envelope, gauss_zones):
    return collective_modes(gauss_envelope, gauss_zones)


@pytest.fixture(scope="session")
def flat_zones():
    env = gaussian_envelope(CENTER, math.inf, FrequencyGrid.around(CENTER, 15e-9, 500))
    return partition(env, 10)


@pytest.fixture(scope="session")
def ref_cavity():
    return CavityParams.from_finesse(420.0, 76e6)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])

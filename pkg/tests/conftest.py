import sys

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

SQ2 = np.sqrt(0.5)


def random_state(rng, dim=8):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def random_unitary2(rng):
    q, r = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


@pytest.fixture
def ghz():
    psi = np.zeros(8, dtype=complex)
    psi[0] = psi[7] = SQ2  # (|eee> + |ggg>)/sqrt2
    return psi


@pytest.fixture
def w_state():
    psi = np.zeros(8, dtype=complex)
    psi[[3, 5, 6]] = 1 / np.sqrt(3)  # |egg>, |geg>, |gge>
    return psi


@pytest.fixture
def bell_vec():
    phi = np.zeros(4, dtype=complex)
    phi[0] = phi[3] = SQ2  # (|ee> + |gg>)/sqrt2
    return phi


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.RESULTS):
        terminalreporter.write_line(line)

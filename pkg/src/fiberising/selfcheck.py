"""Quick oracle battery behind ``fiberising validate``."""
from __future__ import annotations

import numpy as np

from . import numerics as nx
from .entanglement import concurrence, pair_concurrence, tangle_one_rest, three_tangle
from .experiments import PRESETS
from .spin_dynamics import build_hamiltonian, evolve, evolve_rk4, ground_state

SQ2 = np.sqrt(0.5)


def ghz_state():
    psi = np.zeros(8, dtype=complex)
    psi[0] = psi[7] = SQ2
    return psi


def w_state():
    psi = np.zeros(8, dtype=complex)
    psi[[3, 5, 6]] = 1 / np.sqrt(3)  # |egg>, |geg>, |gge>
    return psi


def bell_projector():
    phi = np.zeros(4, dtype=complex)
    phi[0] = phi[3] = SQ2
    return np.outer(phi, phi.conj())


def run_checks() -> list[tuple[str, bool, str]]:
    out = []

    def add(name, err, tol):
        out.append((name, bool(err < tol), f"err={err:.2e}, tol={tol:g}"))

    add("Bell concurrence = 1", abs(concurrence(bell_projector()) - 1), 1e-10)
    ghz, w = ghz_state(), w_state()
    add("GHZ tangle and three-tangle = 1",
        max(abs(tangle_one_rest(ghz) - 1), abs(three_tangle(ghz) - 1)), 1e-10)
    add("W pair concurrence = 2/3", abs(pair_concurrence(w, (1, 2)) - 2 / 3), 1e-10)
    add("W tangle = 8/9, three-tangle = 0",
        max(abs(tangle_one_rest(w) - 8 / 9), abs(three_tangle(w))), 1e-10)

    spec = PRESETS["fig7"].runs["main"].spec
    exact = evolve(spec, ground_state(), 5.0, 1e-3)
    rk4 = evolve_rk4(spec, ground_state(), 5.0, 1e-3)
    add("RK4 vs spectral propagation (t <= 5/g)",
        float(np.max(np.linalg.norm(exact.states - rk4.states, axis=1))), 1e-6)
    u = nx.expm_hermitian(build_hamiltonian(spec), 3.7)
    add("propagator unitarity", float(np.max(np.abs(u.conj().T @ u - np.eye(8)))), 1e-10)
    return out

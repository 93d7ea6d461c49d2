"""Three-spin Ising chain with transverse local drives, propagated exactly."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics as nx
from .cavity_model import SystemParams, Thresholds, DEFAULT_THRESHOLDS, coupling_coefficients
from .errors import ConfigError, NumericalBreakdown, StepTooLarge

DIM = 2 ** nx.N_ATOMS
GROUND_INDEX = DIM - 1  # |ggg>
RK4_GUARD = 0.1

_ZZ12 = nx.tensor_chain(nx.SIGMA_Z, nx.SIGMA_Z, nx.IDENTITY2).real
_ZZ23 = nx.tensor_chain(nx.IDENTITY2, nx.SIGMA_Z, nx.SIGMA_Z).real
_ZZ31 = nx.tensor_chain(nx.SIGMA_Z, nx.IDENTITY2, nx.SIGMA_Z).real
_X = tuple(nx.site_operator(nx.SIGMA_PLUS + nx.SIGMA_MINUS, k).real for k in (1, 2, 3))


@dataclass(frozen=True)
class HamiltonianSpec:
    j12: float
    j23: float
    j31: float
    gamma_local: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "gamma_local", tuple(float(x) for x in self.gamma_local))
        values = (self.j12, self.j23, self.j31) + self.gamma_local
        if len(self.gamma_local) != 3 or not all(math.isfinite(v) for v in values):
            raise ConfigError("HamiltonianSpec needs finite j12, j23, j31 and three drives")
        if min(self.gamma_local) < 0:
            raise ConfigError("local drive magnitudes must be >= 0")

    @classmethod
    def from_params(cls, p: SystemParams, thresholds: Thresholds = DEFAULT_THRESHOLDS
                    ) -> "HamiltonianSpec":
        j = coupling_coefficients(p, thresholds)
        return cls(j.j12, j.j23, j.j31, p.gamma_local)

    def reversed_couplings(self) -> "HamiltonianSpec":
        return HamiltonianSpec(-self.j12, -self.j23, -self.j31, self.gamma_local)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (len(times), 8)

    def __post_init__(self):
        if self.states.shape != (len(self.times), DIM):
            raise ValueError(f"states shape {self.states.shape} does not match {len(self.times)} times")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    @property
    def norm_error(self) -> np.ndarray:
        return np.abs(np.linalg.norm(self.states, axis=1) - 1.0)


def build_hamiltonian(spec: HamiltonianSpec) -> np.ndarray:
    """Real symmetric 8x8 matrix of the effective Hamiltonian."""
    h = spec.j12 * _ZZ12 + spec.j23 * _ZZ23 + spec.j31 * _ZZ31
    for gamma, x in zip(spec.gamma_local, _X):
        h = h + gamma * x
    return h.astype(complex)


def ground_state() -> np.ndarray:
    psi = np.zeros(DIM, dtype=complex)
    psi[GROUND_INDEX] = 1.0
    return psi


def basis_state(label: str) -> np.ndarray:
    """Product basis state from a label such as ``"egg"``."""
    if len(label) != nx.N_ATOMS or set(label) - {"e", "g"}:
        raise ValueError(f"label must be {nx.N_ATOMS} characters of 'e'/'g', got {label!r}")
    idx = int("".join("0" if c == "e" else "1" for c in label), 2)
    psi = np.zeros(DIM, dtype=complex)
    psi[idx] = 1.0
    return psi


def time_grid(t_max: float, dt: float) -> np.ndarray:
    if not (t_max > 0 and 0 < dt <= t_max):
        raise ConfigError(f"need t_max > 0 and 0 < dt <= t_max, got t_max={t_max}, dt={dt}")
    q = t_max / dt
    n = round(q) if abs(q - round(q)) < 1e-9 * max(1.0, q) else math.floor(q)
    return dt * np.arange(n + 1)


def _check_psi(psi0) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (DIM,):
        raise ValueError(f"initial state must have {DIM} amplitudes")
    if abs(np.linalg.norm(psi0) - 1.0) > nx.NORM_ATOL:
        raise ValueError("initial state is not normalized")
    return psi0


def evolve_at(spec: HamiltonianSpec, psi0, times) -> Trajectory:
    """Exact states at arbitrary (strictly increasing) times."""
    psi0 = _check_psi(psi0)
    times = np.asarray(times, dtype=float)
    w, v = nx.spectral_decomposition(build_hamiltonian(spec))
    traj = Trajectory(times, nx.propagate_spectral(w, v, psi0, times))
    drift = traj.norm_error.max(initial=0.0)
    if drift > nx.NORM_ATOL:
        raise NumericalBreakdown(f"norm drift {drift:.2e} during exact propagation")
    return traj


def evolve(spec: HamiltonianSpec, psi0, t_max: float, dt: float) -> Trajectory:
    """``psi(t) = exp(-iHt) psi0`` on ``t = 0, dt, ..., t_max``."""
    return evolve_at(spec, psi0, time_grid(t_max, dt))


def evolve_rk4(spec: HamiltonianSpec, psi0, t_max: float, dt: float) -> Trajectory:
    """Classical RK4 stepping of ``dpsi/dt = -i H psi``, no renormalization.

    Independent of the spectral path; used as a cross-check.
    """
    psi0 = _check_psi(psi0)
    h = build_hamiltonian(spec)
    hnorm = np.linalg.norm(h, 2)
    if dt * hnorm > RK4_GUARD:
        raise StepTooLarge(f"dt*||H|| = {dt * hnorm:.3g} exceeds {RK4_GUARD}")
    times = time_grid(t_max, dt)
    a = -1j * h
    states = np.empty((len(times), DIM), dtype=complex)
    psi = psi0.copy()
    states[0] = psi
    half = 0.5 * dt
    for n in range(1, len(times)):
        k1 = a @ psi
        k2 = a @ (psi + half * k1)
        k3 = a @ (psi + half * k2)
        k4 = a @ (psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        states[n] = psi
    return Trajectory(times, states)


def energy(spec: HamiltonianSpec, traj: Trajectory) -> np.ndarray:
    h = build_hamiltonian(spec)
    return np.einsum("ti,ij,tj->t", traj.states.conj(), h, traj.states).real

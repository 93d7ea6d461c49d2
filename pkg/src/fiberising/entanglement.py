"""Pairwise concurrence, one-vs-rest tangle and residual three-atom tangle.

Every measure is computed on stacks of pure states at once; the single-state
functions are thin wrappers over the batched ones.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import numerics as nx
from .errors import MonogamyViolation, NumericalBreakdown
from .spin_dynamics import Trajectory

log = logging.getLogger(__name__)

BOUND_ATOL = 1e-9
MONOGAMY_FLOOR = -1e-6
TANGLE_FORMS_ATOL = 1e-10
PIVOT_ATOL = 1e-8

PAIRS = ((1, 2), (2, 3), (1, 3))


class PivotWarning(RuntimeWarning):
    """Residual tangle depends on the pivot atom beyond tolerance."""


def _clamp_unit(x: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x < -BOUND_ATOL) or np.any(x > 1 + BOUND_ATOL):
        raise NumericalBreakdown(f"{name} left [0, 1]: range [{x.min():.3e}, {x.max():.3e}]")
    return np.clip(x, 0.0, 1.0)


def concurrence(rho: np.ndarray):
    """Wootters concurrence of a two-qubit density matrix (or a stack of them)."""
    rho = np.asarray(rho, dtype=complex)
    lam = nx.sorted_sqrt_eigvals_rr(rho, nx.spin_flip(rho))
    c = np.maximum(0.0, lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3])
    c = _clamp_unit(c, "concurrence")
    return float(c) if c.ndim == 0 else c


def _pair_concurrence_batch(psis, pair) -> np.ndarray:
    lam = nx.pair_sqrt_eigvals_pure(psis, pair)
    return _clamp_unit(np.maximum(0.0, lam[..., 0] - lam[..., 1]), "concurrence")


def _tangle_batch(psis, which: int) -> np.ndarray:
    rho = nx.reduced_density_batch(psis, (which,))
    purity = np.einsum("...ij,...ji->...", rho, rho).real
    from_purity = 2.0 * (1.0 - purity)
    from_det = 4.0 * np.linalg.det(rho).real
    if np.any(np.abs(from_det - from_purity) > TANGLE_FORMS_ATOL):
        raise NumericalBreakdown("4 det(rho) and 2(1 - Tr rho^2) disagree")
    return _clamp_unit(from_purity, "tangle")


def _residual(tangle, ca, cb) -> np.ndarray:
    raw = tangle - ca**2 - cb**2
    if np.any(raw < MONOGAMY_FLOOR):
        raise MonogamyViolation(f"residual tangle {raw.min():.3e} below {MONOGAMY_FLOOR:g}")
    if np.any(raw < -BOUND_ATOL):
        log.warning("residual tangle %.3e clamped to 0", raw.min())
    return np.clip(raw, 0.0, 1.0)


def _single(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > nx.NORM_ATOL:
        raise ValueError("state is not normalized")
    return psi[None, :]


def pair_concurrence(psi, pair) -> float:
    return float(_pair_concurrence_batch(_single(psi), pair)[0])


def tangle_one_rest(psi, which: int = 1) -> float:
    """Tangle between atom ``which`` and the other two, ``2(1 - Tr rho^2)``."""
    return float(_tangle_batch(_single(psi), which)[0])


def three_tangle(psi, pivot: int = 1) -> float:
    """Residual three-atom entanglement ``C_p(rest) - C_pa^2 - C_pb^2``.

    The atom-1 pivot is the reported value; other pivots are diagnostics.
    """
    psis = _single(psi)
    a, b = (k for k in (1, 2, 3) if k != pivot)
    return float(_residual(_tangle_batch(psis, pivot),
                           _pair_concurrence_batch(psis, (pivot, a)),
                           _pair_concurrence_batch(psis, (pivot, b)))[0])


class EntanglementSample(NamedTuple):
    t: float
    c12: float
    c23: float
    c13: float
    c1_23: float
    c123: float


@dataclass(frozen=True)
class EntanglementSeries:
    t: np.ndarray
    c12: np.ndarray
    c23: np.ndarray
    c13: np.ndarray
    c1_23: np.ndarray
    c123: np.ndarray
    norm_error: np.ndarray
    pivot_spread: np.ndarray

    COLUMNS = ("c12", "c23", "c13", "c1_23", "c123")

    def __len__(self):
        return len(self.t)

    def __iter__(self):
        for row in zip(self.t, *(getattr(self, c) for c in self.COLUMNS)):
            yield EntanglementSample(*map(float, row))

    @property
    def samples(self) -> list[EntanglementSample]:
        return list(self)

    def peak(self, column: str) -> tuple[float, float]:
        """``(max value, time of max)`` of one measure."""
        values = getattr(self, column)
        i = int(np.argmax(values))
        return float(values[i]), float(self.t[i])


def measures(psis: np.ndarray) -> dict[str, np.ndarray]:
    """All measures for a stack of pure states ``(N, 8)``."""
    psis = np.asarray(psis, dtype=complex)
    c = {pair: _pair_concurrence_batch(psis, pair) for pair in PAIRS}
    tau = {k: _tangle_batch(psis, k) for k in (1, 2, 3)}
    res = np.stack([_residual(tau[1], c[(1, 2)], c[(1, 3)]),
                    _residual(tau[2], c[(1, 2)], c[(2, 3)]),
                    _residual(tau[3], c[(1, 3)], c[(2, 3)])])
    return {
        "c12": c[(1, 2)], "c23": c[(2, 3)], "c13": c[(1, 3)],
        "c1_23": tau[1], "c123": res[0], "pivot_spread": res.max(axis=0) - res.min(axis=0),
    }


def entanglement_series(traj: Trajectory) -> EntanglementSeries:
    m = measures(traj.states)
    if np.any(m["pivot_spread"] > PIVOT_ATOL):
        warnings.warn(f"residual tangle differs between pivots by up to "
                      f"{m['pivot_spread'].max():.2e}", PivotWarning, stacklevel=2)
    return EntanglementSeries(t=np.asarray(traj.times, dtype=float),
                              norm_error=traj.norm_error, **m)

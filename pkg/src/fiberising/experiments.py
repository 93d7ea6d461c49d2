"""Coupling-map sweeps, figure presets and the fiber-loss study.

Dynamics presets take the couplings straight from the figure captions
("direct-J mode") and always start from ``|ggg>``.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.ndimage import maximum_filter1d, uniform_filter1d
from scipy.signal import find_peaks

from .cavity_model import (DEFAULT_THRESHOLDS, SystemParams, Thresholds, _cavity_core,
                           coupling_coefficients, effective_phases, optimal_line_delta)
from .entanglement import EntanglementSeries, entanglement_series
from .errors import ConfigError
from .spin_dynamics import HamiltonianSpec, evolve, ground_state

THREADS_ENV = "FIBERISING_THREADS"

SWEEP_AXIS = np.linspace(1.0, 30.0, 200)
FIG_DT = 0.01
NN_J = -2.4
NNN_J = 1.2

ENVELOPE_WINDOW = 2.5       # 1/g; wider than the fastest Ising beat (~0.9/g)
ENVELOPE_PROMINENCE = 0.2   # fraction of envelope range


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1, got {n}")
    return n


# --- coupling maps -------------------------------------------------------

@dataclass(frozen=True)
class SweepGrid:
    """Per-cell couplings on a (delta, gamma0) grid, indexed ``[i_delta, i_gamma]``."""

    delta_axis: np.ndarray
    gamma_axis: np.ndarray
    j12: np.ndarray
    j23: np.ndarray
    j31: np.ndarray
    pole_distance: np.ndarray
    status: np.ndarray

    @property
    def shape(self):
        return self.status.shape

    def __len__(self):
        return self.status.size

    def cells(self):
        """Rows ``(delta, gamma0, j12, j23, j31, pole_distance, status)``, delta-major."""
        for i, d in enumerate(self.delta_axis):
            for k, g0 in enumerate(self.gamma_axis):
                yield (float(d), float(g0), float(self.j12[i, k]), float(self.j23[i, k]),
                       float(self.j31[i, k]), float(self.pole_distance[i, k]),
                       str(self.status[i, k]))

    def argmax_ok(self, column: str = "j12") -> tuple[int, int]:
        mag = np.where(self.status == "ok", np.abs(getattr(self, column)), -np.inf)
        i, k = np.unravel_index(int(np.argmax(mag)), mag.shape)
        return int(i), int(k)

    def adjacent_to_diagonal(self, i: int, k: int) -> bool:
        """True if the 3x3 block around cell (i, k) touches or straddles delta = gamma0."""
        ds = self.delta_axis[max(i - 1, 0):i + 2]
        gs = self.gamma_axis[max(k - 1, 0):k + 2]
        diff = ds[:, None] - gs[None, :]
        return bool(diff.min() <= 0 <= diff.max())


def _check_axis(axis, name):
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size == 0:
        raise ConfigError(f"{name} must be a non-empty 1-D axis")
    if axis.size > 1 and np.any(np.diff(axis) <= 0):
        raise ConfigError(f"{name} must be strictly increasing")
    return axis


def sweep_couplings(template: SystemParams, delta_axis, gamma_axis,
                    thresholds: Thresholds = DEFAULT_THRESHOLDS) -> SweepGrid:
    """Evaluate the three couplings on every (delta, gamma0) cell of ``template``.

    Pole cells keep ``status="pole"`` and NaN couplings; cells with
    ``delta = 0`` or non-finite results are ``"invalid"``.
    """
    delta_axis = _check_axis(delta_axis, "delta_axis")
    gamma_axis = _check_axis(gamma_axis, "gamma_axis")
    d, g0 = np.meshgrid(delta_axis, gamma_axis, indexing="ij")
    _, _, _, den, _, js = _cavity_core(d, g0, template.g, template.eps,
                                       effective_phases(template))
    dist = np.abs(den)
    pole = dist <= thresholds.pole * g0**2
    stacked = np.stack(js)
    invalid = (d == 0) | (g0 < 0) | ~np.all(np.isfinite(stacked), axis=0)
    status = np.where(pole, "pole", np.where(invalid, "invalid", "ok"))
    bad = status != "ok"
    j12, j23, j31 = (np.where(bad, np.nan, j) for j in js)
    return SweepGrid(delta_axis, gamma_axis, j12, j23, j31, dist, status.astype("<U7"))


def coupling_profile(template: SystemParams, gamma0: float, ratios) -> np.ndarray:
    """|J12| at fixed gamma0 for delta = ratio * gamma0."""
    return np.array([abs(coupling_coefficients(replace(template, delta=r * gamma0,
                                                       gamma0=gamma0)).j12)
                     for r in ratios])


# --- dynamics presets ----------------------------------------------------

@dataclass(frozen=True)
class DynamicsRun:
    spec: HamiltonianSpec
    t_max: float
    dt: float = FIG_DT


@dataclass(frozen=True)
class FigurePreset:
    id: str
    description: str
    template: SystemParams | None = None
    delta_axis: np.ndarray | None = None
    gamma_axis: np.ndarray | None = None
    runs: dict[str, DynamicsRun] = field(default_factory=dict)

    @property
    def is_sweep(self) -> bool:
        return self.template is not None


def _spec(j31, gammas):
    return HamiltonianSpec(NN_J, NN_J, j31, gammas)


_G01 = (0.1, 0.1, 0.1)
_G02 = (0.2, 0.2, 0.2)
_MAP_TEMPLATE = SystemParams(delta=1.0, gamma0=1.0, eps=(2.0, 2.0, 2.0))

PRESETS: dict[str, FigurePreset] = {
    "fig2": FigurePreset("fig2", "NN coupling |J12| over (delta/g, gamma0/g)",
                         _MAP_TEMPLATE, SWEEP_AXIS, SWEEP_AXIS),
    "fig3": FigurePreset("fig3", "NNN coupling |J31| over (delta/g, gamma0/g)",
                         _MAP_TEMPLATE, SWEEP_AXIS, SWEEP_AXIS),
    "fig4": FigurePreset("fig4", "C12(t), Gamma0 = 0.1g, J31 = +1.2g (A) / -1.2g (B)", runs={
        "A": DynamicsRun(_spec(NNN_J, _G01), 100.0),
        "B": DynamicsRun(_spec(-NNN_J, _G01), 100.0),
        "A_reversed": DynamicsRun(_spec(NNN_J, _G01).reversed_couplings(), 100.0),
        "B_reversed": DynamicsRun(_spec(-NNN_J, _G01).reversed_couplings(), 100.0),
    }),
    "fig5": FigurePreset("fig5", "as fig4 with Gamma0 = 0.2g", runs={
        "A": DynamicsRun(_spec(NNN_J, _G02), 50.0),
        "B": DynamicsRun(_spec(-NNN_J, _G02), 50.0),
        "A_fig4": DynamicsRun(_spec(NNN_J, _G01), 100.0),
        "B_fig4": DynamicsRun(_spec(-NNN_J, _G01), 100.0),
    }),
    "fig6": FigurePreset("fig6", "C13(t) with the C2 drive off, Gamma = (0.3, 0, 0.3)g", runs={
        "main": DynamicsRun(_spec(NNN_J, (0.3, 0.0, 0.3)), 50.0),
        "fig4_A": DynamicsRun(_spec(NNN_J, _G01), 100.0),
    }),
    "fig7": FigurePreset("fig7", "C123, C1(23), C12 with J31 = -1.2g, Gamma0 = 0.2g", runs={
        "main": DynamicsRun(_spec(-NNN_J, _G02), 50.0),
        "long": DynamicsRun(_spec(-NNN_J, _G02), 2500.0, 0.05),
    }),
}

FIGURE_IDS = tuple(PRESETS)


def get_preset(preset_id) -> FigurePreset:
    key = preset_id if str(preset_id).startswith("fig") else f"fig{preset_id}"
    try:
        return PRESETS[key]
    except KeyError:
        raise ConfigError(f"unknown figure preset {preset_id!r}; choose from "
                          f"{', '.join(FIGURE_IDS)}") from None


def run_dynamics(run: DynamicsRun, psi0=None) -> EntanglementSeries:
    psi0 = ground_state() if psi0 is None else psi0
    return entanglement_series(evolve(run.spec, psi0, run.t_max, run.dt))


def run_preset(preset_id, workers: int | None = None):
    """``SweepGrid`` for map presets, ``{label: EntanglementSeries}`` otherwise.

    Dynamics variants run concurrently; the returned dict keeps preset order.
    """
    preset = get_preset(preset_id)
    if preset.is_sweep:
        return sweep_couplings(preset.template, preset.delta_axis, preset.gamma_axis)
    workers = worker_count() if workers is None else workers
    labels = list(preset.runs)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run_dynamics, (preset.runs[k] for k in labels)))
    return dict(zip(labels, results))


def envelope_peaks(t, values, window: float = ENVELOPE_WINDOW,
                   prominence: float = ENVELOPE_PROMINENCE) -> np.ndarray:
    """Times of the prominent maxima of the slow envelope of ``values``.

    The envelope is a running maximum over ``window`` followed by a running
    mean of the same width, which removes the fast Ising-frequency ripple.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    n = max(1, int(round(window / (t[1] - t[0]))))
    env = uniform_filter1d(maximum_filter1d(values, n, mode="nearest"), n, mode="nearest")
    span = env.max() - env.min()
    if span == 0:
        return np.array([])
    idx, _ = find_peaks(env, prominence=prominence * span)
    return t[idx]


def recurrence_period(series: EntanglementSeries, column: str = "c12", **kw) -> float:
    """Spacing between the first two envelope peaks; NaN if fewer than two."""
    peaks = envelope_peaks(series.t, getattr(series, column), **kw)
    return float(peaks[1] - peaks[0]) if len(peaks) >= 2 else math.nan


def max_series_difference(a: EntanglementSeries, b: EntanglementSeries) -> float:
    return max(float(np.max(np.abs(getattr(a, c) - getattr(b, c)))) for c in a.COLUMNS)


# --- fiber loss ----------------------------------------------------------

@dataclass(frozen=True)
class DissipationStudy:
    gamma0: float
    delta_axis: np.ndarray
    pole_distance: np.ndarray
    modulus_mismatch: np.ndarray
    j12: np.ndarray
    j31: np.ndarray
    optimal_line: float
    argmin_pole: float
    argmin_modulus: float

    @property
    def grid_step(self) -> float:
        return float(np.max(np.diff(self.delta_axis))) if len(self.delta_axis) > 1 else math.inf

    @property
    def deviation(self) -> float:
        """argmin of |M^2 - W^2| minus the closed-form line."""
        return self.argmin_pole - self.optimal_line

    @property
    def modulus_deviation(self) -> float:
        return self.argmin_modulus - self.optimal_line


def default_dissipation_axis(gamma0: float, n: int = 400) -> np.ndarray:
    return np.linspace(2.0 / n, 2.0, n) * gamma0


def dissipation_study(gamma0: float, nu: float, l12: float, l23: float,
                      delta_axis=None, template: SystemParams | None = None
                      ) -> DissipationStudy:
    """Scan delta at fixed gamma0 with lossy fibers.

    Reports two locators next to the closed-form line: the argmin of
    ``|M^2 - W^2|`` and the argmin of ``| |M^2| - |W^2| |``.
    """
    line = optimal_line_delta(gamma0, nu, l12, l23)
    axis = default_dissipation_axis(gamma0) if delta_axis is None else delta_axis
    axis = _check_axis(axis, "delta_axis")
    base = template or _MAP_TEMPLATE
    p = replace(base, delta=float(axis[0]) or 1.0, gamma0=gamma0, nu=nu, l12=l12, l23=l23)
    f = effective_phases(p)
    _, m, w2, den, _, (j12, _, j31) = _cavity_core(axis, gamma0, p.g, p.eps, f)
    dist = np.abs(den)
    mismatch = np.abs(np.abs(m * m) - np.abs(w2))
    return DissipationStudy(
        gamma0=gamma0, delta_axis=axis, pole_distance=dist, modulus_mismatch=mismatch,
        j12=np.abs(j12), j31=np.abs(j31), optimal_line=line,
        argmin_pole=float(axis[np.argmin(dist)]),
        argmin_modulus=float(axis[np.argmin(mismatch)]),
    )


# --- figure claim checks -------------------------------------------------

def _check(name, value, passed):
    return {"claim": name, "value": value, "pass": bool(passed)}


def _peaks(series: dict[str, EntanglementSeries]) -> dict:
    out = {}
    for label, s in series.items():
        out[label] = {}
        for col in s.COLUMNS:
            v, t = s.peak(col)
            out[label][col] = {"max": v, "t_at_max": t}
    return out


def summarize(preset_id, result) -> dict:
    """Peak values and pass/fail of the qualitative claims for one figure."""
    preset = get_preset(preset_id)
    checks = []
    summary = {"figure": preset.id, "description": preset.description}

    if preset.is_sweep:
        grid: SweepGrid = result
        col = "j12" if preset.id == "fig2" else "j31"
        i, k = grid.argmax_ok(col)
        summary["max_ok_cell"] = {"delta": float(grid.delta_axis[i]),
                                  "gamma0": float(grid.gamma_axis[k]),
                                  col: float(getattr(grid, col)[i, k])}
        summary["status_counts"] = {s: int(np.sum(grid.status == s))
                                    for s in ("ok", "pole", "invalid")}
        checks.append(_check(f"max |{col}| ok-cell adjacent to delta = gamma0",
                             [i, k], grid.adjacent_to_diagonal(i, k)))
        if preset.id == "fig2":
            prof = coupling_profile(preset.template, 10.0, (1.2, 1.5, 2.0))
            checks.append(_check("|j12| strictly decreasing at delta/gamma0 = 1.2, 1.5, 2.0 "
                                 "(gamma0 = 10g)", prof.tolist(),
                                 bool(np.all(np.diff(prof) < 0))))
        else:
            ok = grid.status == "ok"
            ratio = np.abs(grid.j31[ok]) / np.abs(grid.j12[ok])
            frac = float(np.mean(ratio < 1))
            checks.append(_check("|j31| < |j12| on at least 90% of ok cells", frac, frac >= 0.9))
        summary["checks"] = checks
        return summary

    series: dict[str, EntanglementSeries] = result
    summary["peaks"] = _peaks(series)
    pk = lambda label, col: series[label].peak(col)[0]
    if preset.id == "fig4":
        checks.append(_check("opposite-sign case (A, J12*J31 < 0) peak c12 > same-sign case (B)",
                             [pk("A", "c12"), pk("B", "c12")], pk("A", "c12") > pk("B", "c12")))
        for lab in ("A", "B"):
            diff = max_series_difference(series[lab], series[f"{lab}_reversed"])
            checks.append(_check(f"case {lab}: all-J-reversed series identical within 1e-9",
                                 diff, diff < 1e-9))
            checks.append(_check(f"case {lab}: overall c12 weak (peak < 0.5)",
                                 pk(lab, "c12"), pk(lab, "c12") < 0.5))
    elif preset.id == "fig5":
        for lab in ("A", "B"):
            big, small = pk(lab, "c12"), pk(f"{lab}_fig4", "c12")
            checks.append(_check(f"case {lab}: peak c12 at Gamma0=0.2g > at 0.1g",
                                 [big, small], big > small))
            ratio = recurrence_period(series[lab]) / recurrence_period(series[f"{lab}_fig4"])
            checks.append(_check(f"case {lab}: recurrence period ratio in [0.4, 0.6]",
                                 ratio, 0.4 <= ratio <= 0.6))
    elif preset.id == "fig6":
        ratio = pk("main", "c13") / pk("fig4_A", "c12")
        checks.append(_check("peak c13 / fig4 peak c12 in [0.5, 2.0]", ratio, 0.5 <= ratio <= 2.0))
    elif preset.id == "fig7":
        for lab in ("main", "long"):
            s = series[lab]
            checks.append(_check(f"{lab} (t <= {s.t[-1]:g}/g): max c123 > 0.9",
                                 pk(lab, "c123"), pk(lab, "c123") > 0.9))
            gap = float(np.max(np.abs(s.c1_23 - s.c123)))
            checks.append(_check(f"{lab}: max |c1_23 - c123| < 0.15", gap, gap < 0.15))
        checks.append(_check("long: peak c12 small next to peak c123 (< 0.5x)",
                             [pk("long", "c12"), pk("long", "c123")],
                             pk("long", "c12") < 0.5 * pk("long", "c123")))
    summary["checks"] = checks
    return summary

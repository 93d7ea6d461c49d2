"""Cavity parameters -> steady-state fields -> effective Ising couplings.

All rates are in units of the atom-cavity coupling ``g``; with the default
``g = 1`` every number is directly "in units of g".

Fibers connect C1-C2 and C2-C3. ``phi = (phi12, phi21, phi23, phi32)`` where
``phi_ij`` is the phase picked up travelling from cavity j to cavity i.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, NoOptimalLine, PoleProximity

QUARTER_PI = math.pi / 4
RADICAND_ATOL = 1e-12


@dataclass(frozen=True)
class Thresholds:
    detuning: float = 5.0       # minimum |delta| / g
    adiabatic: float = 5.0      # minimum min|J| / max Gamma
    pole: float = 1e-6          # minimum |M^2 - W^2| / gamma0^2


DEFAULT_THRESHOLDS = Thresholds()


@dataclass(frozen=True)
class SystemParams:
    delta: float
    gamma0: float
    g: float = 1.0
    eps: tuple[float, float, float] = (2.0, 2.0, 2.0)
    phi: tuple[float, float, float, float] = (QUARTER_PI,) * 4
    gamma_local: tuple[float, float, float] = (0.0, 0.0, 0.0)
    nu: float = 0.0
    l12: float = 0.0
    l23: float = 0.0
    literal_dissipation: bool = False

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(float(x) for x in self.eps))
        object.__setattr__(self, "phi", tuple(float(x) for x in self.phi))
        object.__setattr__(self, "gamma_local", tuple(float(x) for x in self.gamma_local))
        if len(self.eps) != 3 or len(self.gamma_local) != 3 or len(self.phi) != 4:
            raise ConfigError("eps and gamma_local need 3 entries, phi needs 4")
        scalars = (self.delta, self.gamma0, self.g, self.nu, self.l12, self.l23)
        if not all(math.isfinite(x) for x in scalars + self.eps + self.phi + self.gamma_local):
            raise ConfigError("all parameters must be finite")
        if self.g <= 0:
            raise ConfigError(f"g must be > 0, got {self.g}")
        if self.gamma0 < 0:
            raise ConfigError(f"gamma0 must be >= 0, got {self.gamma0}")
        if self.delta == 0:
            raise ConfigError("delta must be nonzero (chi = g^2/delta)")
        if min(self.gamma_local) < 0:
            raise ConfigError("local drive magnitudes must be >= 0")
        if self.nu < 0 or self.l12 < 0 or self.l23 < 0:
            raise ConfigError("nu and fiber lengths must be >= 0")


class TraversalFactors(NamedTuple):
    f12: complex
    f21: complex
    f23: complex
    f32: complex


class Couplings(NamedTuple):
    j12: float
    j23: float
    j31: float


@dataclass(frozen=True)
class DerivedModel:
    chi: float
    m: complex
    w2: complex
    alpha: tuple[complex, complex, complex]
    couplings: Couplings
    pole_distance: float


@dataclass(frozen=True)
class ValidityReport:
    large_detuning_ratio: float
    adiabatic_ratio: float
    pole_distance: float
    regime_ok: bool
    reasons: tuple[str, ...] = field(default=())


def effective_phases(p: SystemParams) -> TraversalFactors:
    """Per-direction fiber factors ``exp(i phi_ij - nu L)``.

    Both directions of a fiber are attenuated unless
    ``p.literal_dissipation`` is set, in which case only the 2->1 and 3->2
    factors carry the loss.
    """
    p12, p21, p23, p32 = p.phi
    loss12 = p.nu * p.l12
    loss23 = p.nu * p.l23
    back12 = 0.0 if p.literal_dissipation else loss12
    back23 = 0.0 if p.literal_dissipation else loss23
    return TraversalFactors(
        f12=complex(np.exp(1j * p12 - loss12)),
        f21=complex(np.exp(1j * p21 - back12)),
        f23=complex(np.exp(1j * p23 - loss23)),
        f32=complex(np.exp(1j * p32 - back23)),
    )


def _cavity_core(delta, gamma0, g, eps, f: TraversalFactors):
    """Vectorized closed forms; ``delta`` and ``gamma0`` may be arrays."""
    delta = np.asarray(delta, dtype=float)
    gamma0 = np.asarray(gamma0, dtype=float)
    e1, e2, e3 = eps
    chi = g * g / delta
    m = 1j * delta + gamma0
    w2 = gamma0**2 * (f.f21 * f.f12 + f.f32 * f.f23)
    den = m * m - w2
    with np.errstate(divide="ignore", invalid="ignore"):
        a1 = (e1 * m * m + e2 * m * gamma0 * f.f12
              + gamma0**2 * (e3 * f.f12 * f.f23 - e1 * f.f23 * f.f32)) / (m * den)
        a2 = (e2 * m + gamma0 * (e1 * f.f21 + e3 * f.f23)) / den
        a3 = (e3 * m * m + e2 * m * gamma0 * f.f32
              + gamma0**2 * (e1 * f.f32 * f.f21 - e3 * f.f21 * f.f12)) / (m * den)
        pref = 2 * gamma0 * chi**2
        j12 = pref * np.imag(a1 * np.conj(a2) * f.f21 / den)
        j23 = pref * np.imag(a3 * np.conj(a2) * f.f32 / den)
        j31 = pref * np.imag(gamma0 * a3 * np.conj(a1) * f.f23 * f.f12 / (m * den))
    return chi, m, w2, den, (a1, a2, a3), (j12, j23, j31)


def m_and_w2(p: SystemParams) -> tuple[complex, complex]:
    f = effective_phases(p)
    m = complex(1j * p.delta + p.gamma0)
    w2 = complex(p.gamma0**2 * (f.f21 * f.f12 + f.f32 * f.f23))
    return m, w2


def pole_distance(p: SystemParams) -> float:
    m, w2 = m_and_w2(p)
    return abs(m * m - w2)


def _guard_pole(p: SystemParams, thresholds: Thresholds) -> None:
    dist = pole_distance(p)
    if dist <= thresholds.pole * p.gamma0**2:
        raise PoleProximity(
            f"|M^2 - W^2| = {dist:.3e} is within {thresholds.pole:g}*gamma0^2 of the pole "
            f"(delta={p.delta}, gamma0={p.gamma0})")


def steady_states(p: SystemParams, thresholds: Thresholds = DEFAULT_THRESHOLDS
                  ) -> tuple[complex, complex, complex]:
    _guard_pole(p, thresholds)
    *_, alpha, _ = _cavity_core(p.delta, p.gamma0, p.g, p.eps, effective_phases(p))
    return tuple(complex(a) for a in alpha)


def coupling_coefficients(p: SystemParams, thresholds: Thresholds = DEFAULT_THRESHOLDS
                          ) -> Couplings:
    _guard_pole(p, thresholds)
    *_, js = _cavity_core(p.delta, p.gamma0, p.g, p.eps, effective_phases(p))
    return Couplings(*(float(j) for j in js))


def derive(p: SystemParams, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> DerivedModel:
    """Evaluate every derived quantity at once. Raises PoleProximity on the pole."""
    _guard_pole(p, thresholds)
    chi, m, w2, den, alpha, js = _cavity_core(p.delta, p.gamma0, p.g, p.eps,
                                              effective_phases(p))
    return DerivedModel(
        chi=float(chi), m=complex(m), w2=complex(w2),
        alpha=tuple(complex(a) for a in alpha),
        couplings=Couplings(*(float(j) for j in js)),
        pole_distance=float(abs(den)),
    )


def validity_check(p: SystemParams, d: DerivedModel | None = None,
                   thresholds: Thresholds = DEFAULT_THRESHOLDS) -> ValidityReport:
    """Check the large-detuning, weak-drive and off-pole conditions.

    ``d`` may be omitted; on the pole the couplings are undefined and the
    adiabatic ratio is reported as NaN.
    """
    detuning_ratio = abs(p.delta) / p.g
    dist = pole_distance(p)
    if d is None:
        try:
            d = derive(p, thresholds)
        except PoleProximity:
            d = None

    max_drive = max(p.gamma_local)
    if d is None:
        adiabatic = math.nan
    elif max_drive == 0:
        adiabatic = math.inf
    else:
        adiabatic = min(abs(j) for j in d.couplings) / max_drive

    reasons = []
    if detuning_ratio < thresholds.detuning:
        reasons.append(f"|delta|/g = {detuning_ratio:.4g} < {thresholds.detuning:g}")
    if not adiabatic >= thresholds.adiabatic:
        reasons.append(f"min|J|/max(Gamma) = {adiabatic:.4g} < {thresholds.adiabatic:g}")
    if p.gamma0 > 0 and dist / p.gamma0**2 < thresholds.pole:
        reasons.append(f"|M^2 - W^2|/gamma0^2 = {dist / p.gamma0**2:.3e} < {thresholds.pole:g}")
    elif p.gamma0 == 0 and dist == 0:
        reasons.append("|M^2 - W^2| = 0")
    return ValidityReport(
        large_detuning_ratio=detuning_ratio,
        adiabatic_ratio=adiabatic,
        pole_distance=dist,
        regime_ok=not reasons,
        reasons=tuple(reasons),
    )


def optimal_line_delta(gamma0: float, nu: float, l12: float, l23: float) -> float:
    """Detuning of the large-coupling line once fiber loss is included.

    ``sqrt(2 exp(-nu (l12 + l23)) - 1) * gamma0``. This is the locus where
    ``|M^2| = |W^2|`` for equal fiber lengths under symmetric attenuation.
    """
    radicand = 2.0 * math.exp(-nu * (l12 + l23)) - 1.0
    if radicand < -RADICAND_ATOL:
        raise NoOptimalLine(
            f"fiber loss nu*(l12+l23) = {nu * (l12 + l23):.4g} exceeds ln 2; no resonance line")
    return math.sqrt(max(radicand, 0.0)) * gamma0

"""Run configuration: flat ``key = value`` text or an equivalent JSON object.

Keys mirror the field names of :class:`SystemParams` and
:class:`HamiltonianSpec` plus run controls. Example::

    # golden cavity point
    delta = 10.5
    gamma0 = 10
    eps = 2, 2, 2
    phi = 0.7853981633974483
    gamma_local = 0.2

A scalar given for ``eps``, ``gamma_local`` or ``phi`` is repeated for every
entry.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cavity_model import DEFAULT_THRESHOLDS, SystemParams, Thresholds
from .errors import ConfigError
from .experiments import SWEEP_AXIS
from .spin_dynamics import HamiltonianSpec, basis_state

PHYSICAL_KEYS = ("g", "delta", "gamma0", "eps", "phi", "nu", "l12", "l23")
DIRECT_KEYS = ("j12", "j23", "j31")
SHARED_KEYS = ("gamma_local", "literal_dissipation")
RUN_KEYS = ("t_max", "dt", "delta_range", "gamma_range", "out", "initial_state",
            "threshold_detuning", "threshold_adiabatic", "threshold_pole")
KNOWN_KEYS = frozenset(PHYSICAL_KEYS + DIRECT_KEYS + SHARED_KEYS + RUN_KEYS)
VECTOR_LENGTHS = {"eps": 3, "gamma_local": 3, "phi": 4}


@dataclass
class RunConfig:
    params: SystemParams | None = None
    spec: HamiltonianSpec | None = None
    t_max: float = 50.0
    dt: float = 0.01
    delta_axis: np.ndarray = field(default_factory=lambda: SWEEP_AXIS.copy())
    gamma_axis: np.ndarray = field(default_factory=lambda: SWEEP_AXIS.copy())
    out: str | None = None
    initial_state: str = "ggg"
    thresholds: Thresholds = DEFAULT_THRESHOLDS
    raw: dict = field(default_factory=dict)

    @property
    def mode(self) -> str | None:
        if self.spec is not None and self.params is None:
            return "direct"
        if self.params is not None:
            return "physical"
        return None

    def psi0(self):
        return basis_state(self.initial_state)

    def hamiltonian(self) -> HamiltonianSpec:
        """Spin Hamiltonian for the active mode (physical mode derives the J's)."""
        if self.spec is not None:
            return self.spec
        if self.params is None:
            raise ConfigError("dynamics needs either j12/j23/j31 or physical parameters")
        return HamiltonianSpec.from_params(self.params, self.thresholds)


def parse_range(text: str) -> np.ndarray:
    """``"a:b:n"`` -> ``linspace(a, b, n)``."""
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise ConfigError(f"range must look like a:b:n, got {text!r}") from None
    if n < 1 or (n > 1 and b <= a):
        raise ConfigError(f"range {text!r} must have n >= 1 and b > a")
    return np.linspace(a, b, n)


def _parse_scalar(text: str):
    low = text.strip().lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    try:
        return float(text)
    except ValueError:
        return text.strip()


def parse_text(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        parts = [p for p in value.replace(",", " ").split() if p]
        if key in VECTOR_LENGTHS and len(parts) > 1:
            out[key] = [_parse_scalar(p) for p in parts]
        else:
            out[key] = _parse_scalar(value)
    return out


def load(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad JSON in {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("JSON config must be an object")
        return data
    return parse_text(text)


def _number(raw, key):
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    return float(value)


def _vector(raw, key):
    value = raw[key]
    n = VECTOR_LENGTHS[key]
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value] * n
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise ConfigError(f"{key} needs {n} numbers (or one to repeat), got {value!r}")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        raise ConfigError(f"{key} entries must be numbers, got {value!r}")
    return tuple(float(v) for v in value)


def build(raw: dict, require_physical: bool = False) -> RunConfig:
    unknown = set(raw) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    physical = any(k in raw for k in PHYSICAL_KEYS)
    direct = any(k in raw for k in DIRECT_KEYS)
    if physical and direct:
        raise ConfigError("config mixes physical parameters with direct j12/j23/j31")

    cfg = RunConfig(raw=dict(raw))
    thr = {}
    for key, attr in (("threshold_detuning", "detuning"), ("threshold_adiabatic", "adiabatic"),
                      ("threshold_pole", "pole")):
        if key in raw:
            thr[attr] = _number(raw, key)
    cfg.thresholds = Thresholds(**{**DEFAULT_THRESHOLDS.__dict__, **thr})

    gamma_local = _vector(raw, "gamma_local") if "gamma_local" in raw else (0.0, 0.0, 0.0)
    if direct:
        missing = [k for k in DIRECT_KEYS if k not in raw]
        if missing:
            raise ConfigError(f"direct-J mode needs all of j12, j23, j31 (missing {missing})")
        cfg.spec = HamiltonianSpec(*(_number(raw, k) for k in DIRECT_KEYS), gamma_local)
    elif physical or require_physical:
        kw = {k: _number(raw, k) for k in ("g", "nu", "l12", "l23") if k in raw}
        for k in ("eps", "phi"):
            if k in raw:
                kw[k] = _vector(raw, k)
        if "literal_dissipation" in raw:
            if not isinstance(raw["literal_dissipation"], bool):
                raise ConfigError("literal_dissipation must be true or false")
            kw["literal_dissipation"] = raw["literal_dissipation"]
        if not require_physical:
            for k in ("delta", "gamma0"):
                if k not in raw:
                    raise ConfigError(f"physical-parameter mode needs {k}")
        cfg.params = SystemParams(delta=_number(raw, "delta") if "delta" in raw else 1.0,
                                  gamma0=_number(raw, "gamma0") if "gamma0" in raw else 1.0,
                                  gamma_local=gamma_local, **kw)

    for key in ("t_max", "dt"):
        if key in raw:
            setattr(cfg, key, _number(raw, key))
    if "delta_range" in raw:
        cfg.delta_axis = parse_range(str(raw["delta_range"]))
    if "gamma_range" in raw:
        cfg.gamma_axis = parse_range(str(raw["gamma_range"]))
    if "out" in raw:
        cfg.out = str(raw["out"])
    if "initial_state" in raw:
        cfg.initial_state = str(raw["initial_state"])
        try:
            basis_state(cfg.initial_state)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return cfg

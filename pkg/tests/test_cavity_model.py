import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import brentq

from fiberising.cavity_model import (SystemParams, coupling_coefficients, derive,
                                     effective_phases, m_and_w2, optimal_line_delta,
                                     steady_states, validity_check)
from fiberising.errors import ConfigError, NoOptimalLine, PoleProximity

Q = math.pi / 4

# Frozen from tests/oracles/cavity_golden.py (50-digit mpmath evaluation).
GOLDEN = dict(
    alpha1=complex(0.0071415597394319409, -3.4215336611060128),
    alpha2=complex(-0.010099690640002318, -4.8180749418401877),
    alpha3=complex(0.0071415597394319409, -3.4215336611060128),
    j12=-0.20882864806263161,
    j23=-0.20882864806263161,
    j31=-0.10220938433672144,
    pole_distance=14.320003491619686,
)


@pytest.fixture
def golden_params():
    return SystemParams(delta=10.5, gamma0=10.0, g=1.0, eps=(2, 2, 2), phi=(Q, Q, Q, Q))


def mirror(p: SystemParams) -> SystemParams:
    p12, p21, p23, p32 = p.phi
    e1, e2, e3 = p.eps
    return replace(p, eps=(e3, e2, e1), phi=(p32, p23, p21, p12), l12=p.l23, l23=p.l12)


# --- params --------------------------------------------------------------

@pytest.mark.parametrize("kw", [dict(g=0), dict(gamma0=-1), dict(delta=0),
                                dict(gamma_local=(-0.1, 0, 0)), dict(nu=-1), dict(l12=-2),
                                dict(eps=(1, 2))])
def test_invalid_params(kw):
    base = dict(delta=10.0, gamma0=10.0)
    with pytest.raises(ConfigError):
        SystemParams(**{**base, **kw})


# --- effective_phases ----------------------------------------------------

def test_lossless_factors_have_unit_modulus():
    f = effective_phases(SystemParams(delta=1, gamma0=1, phi=(0.1, 0.2, 0.3, 0.4), l12=4, l23=7))
    assert np.allclose(np.abs(f), 1.0, atol=0)


def test_attenuation_ln2_halves_factor():
    f = effective_phases(SystemParams(delta=1, gamma0=1, nu=math.log(2), l12=1.0))
    assert abs(abs(f.f12) - 0.5) < 1e-15
    assert abs(abs(f.f21) - 0.5) < 1e-15


def test_zero_length_fiber_is_unattenuated():
    p = SystemParams(delta=1, gamma0=1, nu=0.3, l12=2.0, l23=0.0, phi=(0.1, 0.2, 0.3, 0.4))
    f = effective_phases(p)
    assert f.f23 == complex(np.exp(0.3j))
    assert f.f32 == complex(np.exp(0.4j))


def test_literal_dissipation_attenuates_only_two_factors():
    p = SystemParams(delta=1, gamma0=1, nu=0.1, l12=2.0, l23=3.0, literal_dissipation=True)
    f = effective_phases(p)
    assert abs(f.f12) == pytest.approx(math.exp(-0.2))
    assert abs(f.f23) == pytest.approx(math.exp(-0.3))
    assert abs(f.f21) == pytest.approx(1.0) and abs(f.f32) == pytest.approx(1.0)


# --- M and W^2 -----------------------------------------------------------

def test_m_arithmetic():
    m, _ = m_and_w2(SystemParams(delta=1, gamma0=1))
    assert m == 1 + 1j


def test_w2_at_quarter_phases():
    _, w2 = m_and_w2(SystemParams(delta=3, gamma0=2))
    assert abs(w2 - 8j) < 1e-14


def test_pole_line_cancels():
    m, w2 = m_and_w2(SystemParams(delta=2, gamma0=2))
    assert abs(m * m - w2) < 1e-14


# --- steady states and couplings -----------------------------------------

def test_zero_drive_zero_fields(golden_params):
    p = replace(golden_params, eps=(0, 0, 0))
    assert steady_states(p) == (0, 0, 0)
    assert tuple(coupling_coefficients(p)) == (0, 0, 0)


def test_zero_leakage_zero_couplings():
    assert tuple(coupling_coefficients(SystemParams(delta=10, gamma0=0))) == (0, 0, 0)


def test_mirror_configuration_has_equal_end_fields():
    p = SystemParams(delta=7.0, gamma0=5.0, eps=(1.5, 0.4, 1.5), phi=(0.3, 1.1, 1.1, 0.3),
                     nu=0.01, l12=3.0, l23=3.0)
    a1, _, a3 = steady_states(p)
    assert abs(a1 - a3) < 1e-14 * abs(a1)


def test_golden_steady_states(golden_params):
    for got, key in zip(steady_states(golden_params), ("alpha1", "alpha2", "alpha3")):
        assert abs(got - GOLDEN[key]) < 1e-12 * abs(GOLDEN[key])


def test_golden_couplings(golden_params):
    j = coupling_coefficients(golden_params)
    assert j.j12 == j.j23
    for key in ("j12", "j23", "j31"):
        assert getattr(j, key) == pytest.approx(GOLDEN[key], rel=1e-12)
    assert derive(golden_params).pole_distance == pytest.approx(GOLDEN["pole_distance"], rel=1e-12)


def test_pole_raises():
    p = SystemParams(delta=10.0, gamma0=10.0)
    with pytest.raises(PoleProximity):
        steady_states(p)
    with pytest.raises(PoleProximity):
        coupling_coefficients(p)


def test_lossless_path_is_bitwise_identical(golden_params):
    lossy_off = replace(golden_params, nu=0.0, l12=12.0, l23=30.0)
    assert coupling_coefficients(lossy_off) == coupling_coefficients(golden_params)


def test_negative_detuning_allowed(golden_params):
    j = coupling_coefficients(replace(golden_params, delta=-10.5))
    assert all(math.isfinite(x) for x in j)


@given(s=st.floats(0.05, 20), e=st.tuples(*[st.floats(-3, 3)] * 3),
       ratio=st.floats(1.05, 3.0))
def test_linearity_in_drives(s, e, ratio):
    p = SystemParams(delta=10.0 * ratio, gamma0=10.0, eps=e)
    ps = replace(p, eps=tuple(s * x for x in e))
    for a, b in zip(steady_states(p), steady_states(ps)):
        assert abs(b - s * a) <= 1e-12 * max(abs(s * a), 1e-300)
    for a, b in zip(coupling_coefficients(p), coupling_coefficients(ps)):
        assert abs(b - s * s * a) <= 1e-12 * max(abs(s * s * a), 1e-300)


@given(e=st.tuples(*[st.floats(0, 3)] * 3), pa=st.floats(0, math.pi), pb=st.floats(0, math.pi),
       l12=st.floats(0, 5), l23=st.floats(0, 5), ratio=st.floats(1.05, 3.0))
def test_mirror_symmetry_reciprocal_fibers(e, pa, pb, l12, l23, ratio):
    # Reciprocal fibers (phi12 = phi21, phi23 = phi32). J31 is not mirror
    # invariant as written (alpha3 alpha1* conjugates under the swap).
    p = SystemParams(delta=10.0 * ratio, gamma0=10.0, eps=e, phi=(pa, pa, pb, pb),
                     nu=0.05, l12=l12, l23=l23)
    m = mirror(p)
    a, b = steady_states(p), steady_states(m)
    scale = max(map(abs, a)) or 1.0
    assert abs(a[0] - b[2]) <= 1e-12 * scale and abs(a[2] - b[0]) <= 1e-12 * scale
    assert abs(a[1] - b[1]) <= 1e-12 * scale
    ja, jb = coupling_coefficients(p), coupling_coefficients(m)
    jscale = max(map(abs, ja)) or 1.0
    assert abs(ja.j12 - jb.j23) <= 1e-12 * jscale
    assert abs(ja.j23 - jb.j12) <= 1e-12 * jscale


def test_symmetric_point_j31_mirror_invariant(golden_params):
    assert coupling_coefficients(mirror(golden_params)).j31 == coupling_coefficients(golden_params).j31


def test_coupling_grows_toward_pole():
    mags = [abs(coupling_coefficients(SystemParams(delta=10 * r, gamma0=10)).j12)
            for r in (2.0, 1.5, 1.2, 1.1, 1.05, 1.02, 1.01, 1.001)]
    assert np.all(np.diff(mags) > 0)


# --- validity ------------------------------------------------------------

def test_no_drive_gives_infinite_adiabatic_ratio(golden_params):
    rep = validity_check(golden_params)
    assert rep.adiabatic_ratio == math.inf
    assert rep.regime_ok


def test_small_detuning_fails(golden_params):
    rep = validity_check(replace(golden_params, delta=1.0, gamma0=2.0))
    assert rep.large_detuning_ratio == 1.0
    assert not rep.regime_ok


def test_pole_point_fails():
    rep = validity_check(SystemParams(delta=10.0, gamma0=10.0))
    assert rep.pole_distance < 1e-12
    assert not rep.regime_ok
    assert math.isnan(rep.adiabatic_ratio)


def test_strong_drive_fails_adiabatic(golden_params):
    rep = validity_check(replace(golden_params, gamma_local=(0.1, 0.1, 0.1)))
    assert rep.adiabatic_ratio == pytest.approx(0.10220938433672144 / 0.1, rel=1e-10)
    assert not rep.regime_ok


def test_near_pole_regime_ok():
    p = SystemParams(delta=10.1, gamma0=10.0, gamma_local=(0.1, 0.1, 0.1))
    rep = validity_check(p)
    assert rep.regime_ok, rep.reasons


# --- shifted optimal line ------------------------------------------------

def test_lossless_line_is_diagonal():
    assert optimal_line_delta(7.0, 0.0, 3.0, 4.0) == 7.0


def test_ln2_boundary_returns_zero():
    assert optimal_line_delta(5.0, math.log(2), 0.5, 0.5) == pytest.approx(0.0, abs=1e-6)


def test_ln43_line():
    nu_l = math.log(4 / 3)
    assert optimal_line_delta(10.0, nu_l, 0.5, 0.5) == pytest.approx(math.sqrt(0.5) * 10.0, rel=1e-14)


def test_too_lossy_raises():
    with pytest.raises(NoOptimalLine):
        optimal_line_delta(1.0, 1.0, 1.0, 1.0)


def test_line_is_modulus_matching_locus():
    # independent check: root of |M^2| - |W^2| in delta, equal lengths
    gamma0, nu, length = 10.0, 0.2, 0.5

    def mismatch(d):
        m, w2 = m_and_w2(SystemParams(delta=d, gamma0=gamma0, nu=nu, l12=length, l23=length))
        return abs(m * m) - abs(w2)

    root = brentq(mismatch, 1e-6, 2 * gamma0, xtol=1e-14)
    assert root == pytest.approx(optimal_line_delta(gamma0, nu, length, length), rel=1e-12)


def test_pole_distance_argmin_solves_cubic():
    # |M^2 - W^2|^2 with W^2 = i S gamma0^2 is stationary where x^3 + x = S, x = delta/gamma0
    gamma0, nu, length = 10.0, math.log(4 / 3) / 2, 0.5
    s = 2 * math.exp(-2 * nu * length)
    roots = np.roots([1, 0, 1, -s])
    x = float(roots[np.abs(roots.imag) < 1e-12].real[0])
    deltas = np.linspace(0.5, 1.5, 20001) * gamma0

    def dist(d):
        m, w2 = m_and_w2(SystemParams(delta=d, gamma0=gamma0, nu=nu, l12=length, l23=length))
        return abs(m * m - w2)

    best = deltas[int(np.argmin([dist(d) for d in deltas]))]
    assert best == pytest.approx(x * gamma0, abs=2 * (deltas[1] - deltas[0]))

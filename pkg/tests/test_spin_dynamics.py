import numpy as np
import pytest
from hypothesis import given, strategies as st

from fiberising import numerics as nx
from fiberising.entanglement import entanglement_series
from fiberising.errors import ConfigError, StepTooLarge
from fiberising.spin_dynamics import (HamiltonianSpec, Trajectory, basis_state, build_hamiltonian,
                                      energy, evolve, evolve_at, evolve_rk4, ground_state,
                                      time_grid)

from conftest import random_state

FIG7 = HamiltonianSpec(-2.4, -2.4, -1.2, (0.2, 0.2, 0.2))


def test_zero_spec_gives_zero_matrix():
    assert np.array_equal(build_hamiltonian(HamiltonianSpec(0, 0, 0)), np.zeros((8, 8)))


def test_zz12_diagonal():
    h = build_hamiltonian(HamiltonianSpec(1, 0, 0))
    assert np.array_equal(h, np.diag([1, 1, -1, -1, -1, -1, 1, 1]))


def test_zz31_diagonal():
    h = build_hamiltonian(HamiltonianSpec(0, 0, 1))
    assert np.array_equal(h, np.diag([1, -1, 1, -1, -1, 1, -1, 1]))


def test_drive_on_first_atom():
    h = build_hamiltonian(HamiltonianSpec(0, 0, 0, (1, 0, 0)))
    assert np.array_equal(h, np.kron(nx.SIGMA_X, np.eye(4)))


def test_hamiltonian_real_symmetric(rng):
    for _ in range(20):
        j = rng.normal(size=3)
        spec = HamiltonianSpec(*j, tuple(rng.uniform(0, 1, 3)))
        h = build_hamiltonian(spec)
        assert np.array_equal(h, h.T) and np.all(h.imag == 0)


def test_invalid_spec():
    with pytest.raises(ConfigError):
        HamiltonianSpec(1, 1, float("nan"))
    with pytest.raises(ConfigError):
        HamiltonianSpec(1, 1, 1, (0.1, -0.1, 0))


def test_reversed_couplings_keeps_drives():
    r = FIG7.reversed_couplings()
    assert (r.j12, r.j23, r.j31, r.gamma_local) == (2.4, 2.4, 1.2, (0.2, 0.2, 0.2))


def test_ground_state():
    psi = ground_state()
    assert np.linalg.norm(psi) == 1.0
    for k in (1, 2, 3):
        z = nx.site_operator(nx.SIGMA_Z, k)
        assert (psi.conj() @ z @ psi).real == -1.0
        rho = nx.partial_trace(psi, {k})
        assert abs(np.trace(rho @ rho) - 1) < 1e-15


def test_basis_state_labels():
    assert np.array_equal(basis_state("ggg"), ground_state())
    assert basis_state("egg")[3] == 1
    with pytest.raises(ValueError):
        basis_state("gx")


def test_time_grid():
    assert len(time_grid(50.0, 0.01)) == 5001
    assert time_grid(1.0, 0.3)[-1] == pytest.approx(0.9)
    with pytest.raises(ConfigError):
        time_grid(1.0, 0.0)


def test_trajectory_rejects_bad_times():
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 0.0]), np.zeros((2, 8), complex))


def test_zero_hamiltonian_leaves_state():
    traj = evolve(HamiltonianSpec(0, 0, 0), ground_state(), 5.0, 0.5)
    assert np.all(traj.states == ground_state())


def test_uncoupled_drives_keep_product_state():
    series = entanglement_series(evolve(HamiltonianSpec(0, 0, 0, (0.3, 0.7, 0.2)),
                                        ground_state(), 20.0, 0.1))
    for col in series.COLUMNS:
        assert np.max(getattr(series, col)) < 1e-12


def test_single_spin_rabi():
    traj = evolve_at(HamiltonianSpec(0, 0, 0, (1, 0, 0)), ground_state(), [np.pi / 2])
    # sigma_x on atom 1 moves |ggg> to |egg> after a quarter turn
    assert abs(abs(traj.states[0, 3]) - 1) < 1e-14


def test_unnormalized_start_rejected():
    with pytest.raises(ValueError):
        evolve(FIG7, 2 * ground_state(), 1.0, 0.1)


def test_rk4_matches_exact_fig7():
    dt, stride = 1e-3, 10
    rk = evolve_rk4(FIG7, ground_state(), 50.0, dt)
    exact = evolve_at(FIG7, ground_state(), rk.times[::stride])
    diff = np.linalg.norm(rk.states[::stride] - exact.states, axis=1)
    assert diff.max() < 1e-6
    assert rk.norm_error.max() < 1e-7


def test_rk4_step_guard():
    with pytest.raises(StepTooLarge):
        evolve_rk4(FIG7, ground_state(), 10.0, 0.1)


def test_energy_conserved():
    traj = evolve(FIG7, basis_state("egg"), 50.0, 0.01)
    e = energy(FIG7, traj)
    assert np.max(np.abs(e - e[0])) < 1e-9


def test_unitary_norm(rng):
    spec = HamiltonianSpec(*rng.normal(size=3), tuple(rng.uniform(0, 1, 3)))
    traj = evolve(spec, random_state(rng), 200.0, 0.1)
    assert traj.norm_error.max() < 1e-9


def test_sign_flip_covariance(rng):
    # P = sz sz sz flips every drive and keeps the zz terms, so H(-J) = -P H(J) P.
    # H is real and P|ggg> = -|ggg>, hence psi_reversed(t) = conj(P psi(t)) up to sign.
    spec = HamiltonianSpec(*rng.normal(size=3), tuple(rng.uniform(0, 1, 3)))
    a = evolve(spec, ground_state(), 10.0, 0.1)
    b = evolve(spec.reversed_couplings(), ground_state(), 10.0, 0.1)
    parity = np.diag(nx.tensor_chain(nx.SIGMA_Z, nx.SIGMA_Z, nx.SIGMA_Z)).real
    assert np.max(np.abs(b.states + (parity * a.states).conj())) < 1e-12


@given(j12=st.floats(-3, 3), j31=st.floats(-3, 3), g1=st.floats(0, 1), g2=st.floats(0, 1),
       t=st.floats(0.1, 80))
def test_mirror_symmetry_of_dynamics(j12, j31, g1, g2, t):
    spec = HamiltonianSpec(j12, j12, j31, (g1, g2, g1))
    psi = evolve_at(spec, ground_state(), [t]).states[0]
    swapped = psi.reshape(2, 2, 2).transpose(2, 1, 0).reshape(8)
    assert np.allclose(psi, swapped, atol=1e-12)


def test_long_horizon_reaches_strong_tripartite_entanglement():
    series = entanglement_series(evolve(FIG7, ground_state(), 1100.0, 0.05))
    assert series.c123.max() > 0.9

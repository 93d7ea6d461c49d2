"""Effective Ising dynamics and remote entanglement of three fiber-coupled cavity atoms."""

__version__ = "0.1.0"

from .cavity_model import (DerivedModel, SystemParams, Thresholds, ValidityReport,
                           coupling_coefficients, derive, effective_phases, m_and_w2,
                           optimal_line_delta, steady_states, validity_check)
from .entanglement import (EntanglementSeries, concurrence, entanglement_series,
                           pair_concurrence, tangle_one_rest, three_tangle)
from .experiments import dissipation_study, run_preset, summarize, sweep_couplings
from .spin_dynamics import (HamiltonianSpec, Trajectory, build_hamiltonian, evolve,
                            evolve_rk4, ground_state)

__all__ = [
    "DerivedModel", "SystemParams", "Thresholds", "ValidityReport", "coupling_coefficients",
    "derive", "effective_phases", "m_and_w2", "optimal_line_delta", "steady_states",
    "validity_check", "EntanglementSeries", "concurrence", "entanglement_series",
    "pair_concurrence", "tangle_one_rest", "three_tangle", "dissipation_study", "run_preset",
    "summarize", "sweep_couplings", "HamiltonianSpec", "Trajectory", "build_hamiltonian",
    "evolve", "evolve_rk4", "ground_state",
]

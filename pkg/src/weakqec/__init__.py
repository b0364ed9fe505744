"""Monte Carlo simulator for qubit error correction with weak syndrome readout.

Trajectories of small encoded registers undergo random coherent errors,
finite-strength (or projective) syndrome measurements with Bayesian
conditioning, and current-driven corrective rotations. The package
reproduces the closed-form fidelity baselines and locates the
measurement-strength and error-size windows where the correction helps.
"""

from .codes import Code, CODE_NAMES, five_qubit_code, get_code, three_qubit_code, unencoded_code, verify_code
from .engine import CycleConfig, EnsembleStats, resolve_config, run_cycle, run_ensemble, run_trajectory
from .error_model import (
    ErrorDistribution,
    analytic_fidelity,
    projective_bound_bitflip,
    sample_error_hamiltonian,
)
from .feedback import (
    AngleEstimate,
    FeedbackAction,
    average_cos_theta,
    estimate_cos_theta,
    feedback_bitflip,
    feedback_five_qubit,
)
from .measurement import (
    ImpossibleCurrentError,
    MeasurementConfig,
    MeasurementRecord,
    SyndromePartition,
    bayes_update,
    bayes_update_kraus,
    partition_eigenspaces,
    sample_current,
    simulate_z_sde,
    weak_measure_syndromes,
)
from .qstate import (
    HermitianOperator,
    apply_pauli_rotation,
    basis_ket,
    check_density_matrix,
    codeword_fidelity,
    evolve_hamiltonian,
    pauli_matrix,
    pauli_operator,
    pure_state_density,
)
from .experiments import BoundResult, SweepSpec, find_bounds, run_sweep
from .validation import ValidationReport, validate

__version__ = "0.1.0"

__all__ = [
    "AngleEstimate",
    "BoundResult",
    "CODE_NAMES",
    "Code",
    "CycleConfig",
    "EnsembleStats",
    "ErrorDistribution",
    "FeedbackAction",
    "HermitianOperator",
    "ImpossibleCurrentError",
    "MeasurementConfig",
    "MeasurementRecord",
    "SweepSpec",
    "SyndromePartition",
    "ValidationReport",
    "analytic_fidelity",
    "apply_pauli_rotation",
    "average_cos_theta",
    "basis_ket",
    "bayes_update",
    "bayes_update_kraus",
    "check_density_matrix",
    "codeword_fidelity",
    "estimate_cos_theta",
    "evolve_hamiltonian",
    "feedback_bitflip",
    "feedback_five_qubit",
    "find_bounds",
    "five_qubit_code",
    "get_code",
    "partition_eigenspaces",
    "pauli_matrix",
    "pauli_operator",
    "projective_bound_bitflip",
    "pure_state_density",
    "resolve_config",
    "run_cycle",
    "run_ensemble",
    "run_sweep",
    "run_trajectory",
    "sample_current",
    "sample_error_hamiltonian",
    "simulate_z_sde",
    "three_qubit_code",
    "unencoded_code",
    "validate",
    "verify_code",
    "weak_measure_syndromes",
]

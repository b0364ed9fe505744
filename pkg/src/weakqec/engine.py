"""Per-trajectory cycle execution and seeded parallel ensemble statistics.

One cycle is: evolve under a freshly drawn error Hamiltonian for tau = 1,
then (depending on the mode) weakly measure every syndrome and apply the
resolver's corrective rotation, or projectively measure and apply the
exact Pauli correction, or do nothing. Trajectories draw from
counter-based Philox streams keyed on (master_seed, trajectory index),
so ensembles are reproducible bit-for-bit for any worker count: the
per-trajectory fidelities are reduced in index order with exact
compensated summation.
"""

from __future__ import annotations

import math
import multiprocessing
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .codes import Code, get_code
from .error_model import ERROR_KINDS, ErrorDistribution, sample_error_hamiltonian
from .measurement import (
    MeasurementConfig,
    MeasurementRecord,
    plus_weight,
    project_syndrome,
    weak_measure_syndromes,
)
from .qstate import (
    apply_pauli_rotation,
    basis_ket,
    codeword_fidelity,
    evolve_hamiltonian,
    pauli_matrix,
    pure_state_density,
)

MODES = ("weak", "projective", "none")
INITIAL_STATES = ("codeword", "all_zeros")


@dataclass(frozen=True)
class CycleConfig:
    """Everything needed to run one trajectory of one parameter point."""

    code: str
    alpha_tau: float
    g_tau: float = 0.0
    mode: str = "weak"
    error_kind: str = "gaussian"
    cycles: int = 1
    substeps: Optional[int] = None
    delta_i: float = 2.0
    initial_state: str = "codeword"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.error_kind not in ERROR_KINDS:
            raise ValueError(f"error_kind must be one of {ERROR_KINDS}")
        if self.alpha_tau < 0.0:
            raise ValueError("alpha_tau must be >= 0")
        if self.g_tau < 0.0:
            raise ValueError("g_tau must be >= 0")
        if self.mode == "weak" and self.g_tau <= 0.0:
            raise ValueError("weak mode needs g_tau > 0")
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        if self.substeps is not None and self.substeps < 1:
            raise ValueError("substeps must be >= 1 when given")
        if self.initial_state not in INITIAL_STATES:
            raise ValueError(f"initial_state must be one of {INITIAL_STATES}")


@dataclass(frozen=True, eq=False)
class RunPlan:
    """Resolved, immutable runtime bundle for a CycleConfig."""

    config: CycleConfig
    code_obj: Code
    target: np.ndarray
    rho0: np.ndarray
    mcfg: MeasurementConfig
    dist: ErrorDistribution


@lru_cache(maxsize=64)
def resolve_config(config: CycleConfig) -> RunPlan:
    """Build code, initial state, and measurement settings for a config."""
    code = get_code(config.code)
    if config.mode in ("weak", "projective") and not code.syndromes:
        raise ValueError(f"code {config.code!r} has no syndromes to measure")
    if config.initial_state == "codeword":
        target = code.logical_zero
    else:
        target = basis_ket(code.n_qubits, 0)
    rho0 = pure_state_density(target)
    rho0.setflags(write=False)
    mcfg = MeasurementConfig(g_tau=config.g_tau, delta_i=config.delta_i)
    dist = ErrorDistribution(kind=config.error_kind, alpha=config.alpha_tau)
    return RunPlan(config=config, code_obj=code, target=target, rho0=rho0, mcfg=mcfg, dist=dist)


def run_cycle(rho: np.ndarray, plan: RunPlan, rng: np.random.Generator):
    """One error / measure / correct round; returns (state, records)."""
    cfg = plan.config
    code = plan.code_obj
    ham = sample_error_hamiltonian(code, plan.dist, rng)
    rho = evolve_hamiltonian(rho, ham, 1.0, cfg.substeps)

    if cfg.mode == "none":
        return rho, []

    if cfg.mode == "weak":
        rho, records = weak_measure_syndromes(rho, code.partitions, plan.mcfg, rng)
        action = code.resolver.action(records, plan.mcfg)
        if action.operator is not None:
            rho = apply_pauli_rotation(rho, action.operator, action.angle)
        return rho, records

    # projective: Born-sample each commuting syndrome, collapse, then apply
    # the exact Pauli named by the sign pattern
    records = []
    signs = []
    half_di = 0.5 * cfg.delta_i
    for part in code.partitions:
        p0 = plus_weight(rho, part)
        plus = bool(rng.random() < p0)
        rho = project_syndrome(rho, part, plus)
        signs.append(1 if plus else -1)
        records.append(MeasurementRecord(current=half_di if plus else -half_di, p0_before=p0))
    op = code.resolver.operator_for(signs)
    if op is not None:
        pmat = pauli_matrix(op)
        rho = pmat @ rho @ pmat
    return rho, records


def trajectory_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for one trajectory."""
    if master_seed < 0 or index < 0:
        raise ValueError("master_seed and trajectory index must be >= 0")
    key = np.array([master_seed % 2**64, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def run_trajectory(plan: RunPlan, master_seed: int, index: int) -> float:
    """Fidelity against the initial codeword after the configured cycles."""
    rng = trajectory_rng(master_seed, index)
    rho = plan.rho0.copy()
    for _ in range(plan.config.cycles):
        rho, _ = run_cycle(rho, plan, rng)
    return codeword_fidelity(rho, plan.target)


def trajectory_trace(plan: RunPlan, master_seed: int, index: int):
    """Per-cycle records and fidelities for one trajectory (debugging aid)."""
    rng = trajectory_rng(master_seed, index)
    rho = plan.rho0.copy()
    trace = []
    for cycle in range(plan.config.cycles):
        rho, records = run_cycle(rho, plan, rng)
        trace.append(
            {
                "cycle": cycle,
                "records": [{"current": r.current, "p0_before": r.p0_before} for r in records],
                "fidelity": codeword_fidelity(rho, plan.target),
            }
        )
    return trace


@dataclass(frozen=True)
class EnsembleStats:
    """Mean fidelity with its standard error for one parameter point."""

    n_traj: int
    mean_fidelity: float
    std_err: float
    config: CycleConfig
    master_seed: int
    degenerate_std: bool = False


def _run_range(args) -> np.ndarray:
    config, master_seed, lo, hi = args
    plan = resolve_config(config)
    return np.array([run_trajectory(plan, master_seed, i) for i in range(lo, hi)])


def _worker_count(n_workers: Optional[int], n_traj: int) -> int:
    if n_workers is not None:
        if n_workers < 1:
            raise ValueError("n_workers must be >= 1")
        return n_workers
    if n_traj < 512:
        return 1
    return min(os.cpu_count() or 1, 8)


def run_ensemble(
    config: CycleConfig,
    n_traj: int,
    master_seed: int,
    n_workers: Optional[int] = None,
) -> EnsembleStats:
    """Average `n_traj` seeded trajectories; deterministic for any worker count."""
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    workers = _worker_count(n_workers, n_traj)
    if workers == 1:
        fids = _run_range((config, master_seed, 0, n_traj))
    else:
        chunk = max(64, math.ceil(n_traj / (workers * 8)))
        jobs = [
            (config, master_seed, lo, min(lo + chunk, n_traj))
            for lo in range(0, n_traj, chunk)
        ]
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=workers) as pool:
            parts = pool.map(_run_range, jobs)
        fids = np.concatenate(parts)

    mean = math.fsum(fids) / n_traj
    if n_traj == 1:
        return EnsembleStats(1, mean, 0.0, config, master_seed, degenerate_std=True)
    var = math.fsum((f - mean) ** 2 for f in fids) / (n_traj - 1)
    std_err = math.sqrt(var / n_traj)
    return EnsembleStats(n_traj, mean, std_err, config, master_seed)

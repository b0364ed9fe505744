"""Binary weak measurement of Pauli syndromes.

A measurement of strength g*tau reads out one commuting Pauli word per
cycle. The apparatus reports an integrated current drawn from the
two-Gaussian mixture

    P(I) = p0 * N(+dI/2, sigma^2) + (1 - p0) * N(-dI/2, sigma^2),
    sigma = dI / (2 sqrt(g tau)),

where p0 is the weight of the +1 eigenspace. Conditioned on the current,
the state is updated by Bayes' rule on the eigenspace populations while
off-diagonal elements follow the purity-preserving square-root rule;
this is identical to the Kraus map K rho K^dag / tr with
K = sqrt(L0) P0 + sqrt(L1) P1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qstate import MAX_QUBITS, PAULI_1Q, pauli_matrix

# single-qubit rotations sending X -> Z and Y -> Z
_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)
_Y_TO_Z = np.array([[1.0, -1.0j], [1.0, 1.0j]], dtype=complex) / math.sqrt(2.0)

_LOG_DENSITY_FLOOR = math.log(1e-300)


class ImpossibleCurrentError(ValueError):
    """Raised when a current has essentially zero probability under the state."""


@dataclass(frozen=True)
class MeasurementConfig:
    """Measurement strength g*tau and the current scale dI.

    With the default delta_i = 2 the scaled current 2*I/dI equals the raw
    current, and the eigenstate centers sit at +-1.
    """

    g_tau: float
    delta_i: float = 2.0

    def __post_init__(self):
        if self.g_tau < 0.0 or not math.isfinite(self.g_tau):
            raise ValueError("g_tau must be finite and >= 0")
        if self.delta_i <= 0.0:
            raise ValueError("delta_i must be > 0")

    @property
    def sigma(self) -> float:
        if self.g_tau == 0.0:
            raise ValueError("sigma is undefined at g_tau = 0")
        return self.delta_i / (2.0 * math.sqrt(self.g_tau))


@dataclass(frozen=True, eq=False)
class SyndromePartition:
    """Eigenspace split of a Pauli word after rotating it onto Z's.

    s0_mask marks the +1 eigenspace in the rotated basis; basis_change is
    None when the word is already diagonal (Z/I only).
    """

    operator: str
    s0_mask: np.ndarray
    basis_change: np.ndarray | None

    @property
    def dim(self) -> int:
        return self.s0_mask.shape[0]


@dataclass(frozen=True)
class MeasurementRecord:
    """Integrated current of one syndrome readout and the prior +1 weight."""

    current: float
    p0_before: float


def partition_eigenspaces(letters: str) -> SyndromePartition:
    """Build the +-1 eigenspace partition for a non-identity Pauli word."""
    n = len(letters)
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"Pauli word length must be 1..{MAX_QUBITS}")
    support = [k for k, ch in enumerate(letters) if ch != "I"]
    for ch in letters:
        if ch not in PAULI_1Q:
            raise ValueError(f"invalid Pauli letter {ch!r}")
    if not support:
        raise ValueError("all-identity word has no binary outcome")

    dim = 2**n
    idx = np.arange(dim)
    parity = np.zeros(dim, dtype=np.int64)
    for k in support:
        parity ^= (idx >> (n - 1 - k)) & 1
    mask = parity == 0

    if all(letters[k] == "Z" for k in support):
        basis = None
    else:
        singles = []
        for ch in letters:
            if ch == "X":
                singles.append(_HADAMARD)
            elif ch == "Y":
                singles.append(_Y_TO_Z)
            else:
                singles.append(PAULI_1Q["I"])
        basis = singles[0]
        for s in singles[1:]:
            basis = np.kron(basis, s)
    mask.setflags(write=False)
    return SyndromePartition(operator=letters, s0_mask=mask, basis_change=basis)


def eigenspace_projectors(part: SyndromePartition) -> tuple[np.ndarray, np.ndarray]:
    """Dense (P0, P1) projectors in the computational basis."""
    d0 = np.diag(part.s0_mask.astype(complex))
    d1 = np.diag((~part.s0_mask).astype(complex))
    if part.basis_change is None:
        return d0, d1
    v = part.basis_change
    vh = v.conj().T
    return vh @ d0 @ v, vh @ d1 @ v


def plus_weight(rho: np.ndarray, part: SyndromePartition) -> float:
    """Tr(rho P0): population of the +1 eigenspace."""
    if part.basis_change is None:
        diag = rho.diagonal().real
    else:
        v = part.basis_change
        diag = np.einsum("ij,jk,ik->i", v, rho, v.conj()).real
    p0 = float(diag[part.s0_mask].sum())
    return min(max(p0, 0.0), 1.0)


def sample_current(p0: float, cfg: MeasurementConfig, rng: np.random.Generator) -> float:
    """Draw an integrated current from the two-Gaussian mixture."""
    if not 0.0 <= p0 <= 1.0:
        raise ValueError(f"p0 must lie in [0, 1], got {p0}")
    sigma = cfg.sigma  # raises at g_tau = 0
    center = 0.5 * cfg.delta_i if rng.random() < p0 else -0.5 * cfg.delta_i
    return float(rng.normal(center, sigma))


def _likelihood_weights(current: float, cfg: MeasurementConfig) -> tuple[float, float, float]:
    """Relative Gaussian likelihoods (w0^2, w1^2 scaled by a common factor).

    Returns (w0, w1, log_shift) with w = exp((exponent - shift)/2), so
    w0*w0 and w1*w1 are the likelihoods up to exp(shift).
    """
    c = 0.5 * cfg.delta_i
    inv2s2 = 1.0 / (2.0 * cfg.sigma**2)
    e0 = -((current - c) ** 2) * inv2s2
    e1 = -((current + c) ** 2) * inv2s2
    shift = max(e0, e1)
    return math.exp(0.5 * (e0 - shift)), math.exp(0.5 * (e1 - shift)), shift


def bayes_update(
    rho: np.ndarray,
    part: SyndromePartition,
    current: float,
    cfg: MeasurementConfig,
) -> np.ndarray:
    """Conditional state update for one observed current.

    In the partition's rotated basis each matrix element rho_ij is scaled
    by sqrt(L_si * L_sj) / P(I), where s marks the eigenspace of the
    index, which reproduces the population Bayes rule on the diagonal and
    the square-root rule off the diagonal. Zero populations stay zero.
    """
    w0, w1, shift = _likelihood_weights(current, cfg)
    if part.basis_change is None:
        rot = rho
    else:
        rot = part.basis_change @ rho @ part.basis_change.conj().T
    diag = rot.diagonal().real
    mask = part.s0_mask
    p0 = float(diag[mask].sum())
    p0 = min(max(p0, 0.0), 1.0)
    norm = p0 * (w0 * w0) + (1.0 - p0) * (w1 * w1)
    # actual mixture density = exp(shift) * norm / sqrt(2 pi sigma^2)
    if norm <= 0.0 or shift + math.log(norm) - 0.5 * math.log(2.0 * math.pi * cfg.sigma**2) < _LOG_DENSITY_FLOOR:
        raise ImpossibleCurrentError(
            f"current {current} has probability below 1e-300 for this state"
        )
    weights = np.where(mask, w0, w1)
    scaled = rot * np.outer(weights, weights)
    scaled /= norm
    if part.basis_change is None:
        return scaled
    return part.basis_change.conj().T @ scaled @ part.basis_change


def bayes_update_kraus(
    rho: np.ndarray,
    part: SyndromePartition,
    current: float,
    cfg: MeasurementConfig,
) -> np.ndarray:
    """Same update through the dense Kraus operator; cross-validation path."""
    w0, w1, _ = _likelihood_weights(current, cfg)
    p0_mat, p1_mat = eigenspace_projectors(part)
    k = w0 * p0_mat + w1 * p1_mat
    out = k @ rho @ k.conj().T
    tr = out.trace().real
    if tr <= 0.0:
        raise ImpossibleCurrentError(f"current {current} annihilates the state")
    return out / tr


def weak_measure_syndromes(
    rho: np.ndarray,
    partitions,
    cfg: MeasurementConfig,
    rng: np.random.Generator,
) -> tuple[np.ndarray, list[MeasurementRecord]]:
    """Measure each syndrome in order with an independent current draw.

    The syndrome words must commute (codes check this once at build
    time), so the ordering does not affect the post-state distribution.
    """
    records = []
    for part in partitions:
        p0 = plus_weight(rho, part)
        current = sample_current(p0, cfg, rng)
        rho = bayes_update(rho, part, current, cfg)
        records.append(MeasurementRecord(current=current, p0_before=p0))
    return rho, records


def project_syndrome(rho: np.ndarray, part: SyndromePartition, outcome_plus: bool) -> np.ndarray:
    """Projective collapse onto one eigenspace, renormalized.

    This is the g_tau -> infinity limit of `bayes_update`: the likelihood
    of the incompatible eigenspace vanishes.
    """
    if part.basis_change is None:
        rot = rho
    else:
        rot = part.basis_change @ rho @ part.basis_change.conj().T
    keep = part.s0_mask if outcome_plus else ~part.s0_mask
    prob = float(rot.diagonal().real[keep].sum())
    if prob <= 0.0:
        raise ValueError("projection onto an eigenspace with zero population")
    sel = keep.astype(float)
    out = rot * np.outer(sel, sel)
    out /= prob
    if part.basis_change is None:
        return out
    return part.basis_change.conj().T @ out @ part.basis_change


def pauli_words_commute(a: str, b: str) -> bool:
    """Letterwise commutation test for two equal-length Pauli words."""
    if len(a) != len(b):
        raise ValueError("words must have equal length")
    anti = sum(1 for x, y in zip(a, b) if x != "I" and y != "I" and x != y)
    return anti % 2 == 0


def assert_commuting(words) -> None:
    """Verify every pair of syndrome words commutes, letterwise and as matrices."""
    words = list(words)
    for i, a in enumerate(words):
        for b in words[i + 1 :]:
            if not pauli_words_commute(a, b):
                raise ValueError(f"syndromes {a} and {b} do not commute")
            ma, mb = pauli_matrix(a), pauli_matrix(b)
            dev = np.max(np.abs(ma @ mb - mb @ ma))
            if dev > 1e-12:
                raise ValueError(f"matrix commutator of {a}, {b} deviates by {dev:.3e}")


def simulate_z_sde(z0: float, g_tau: float, n_steps: int, rng: np.random.Generator) -> float:
    """Euler-Maruyama terminal log-odds z for dz = g tanh(z) dt + sqrt(g) dW.

    Integrates over one cycle (tau = 1) with g = g_tau. Requires
    n_steps >= 1000 * g_tau for step-size stability.
    """
    return float(simulate_z_sde_ensemble(z0, g_tau, n_steps, 1, rng)[0])


def simulate_z_sde_ensemble(
    z0: float,
    g_tau: float,
    n_steps: int,
    n_runs: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Vectorized batch of independent z trajectories; returns terminal values."""
    if g_tau <= 0.0:
        raise ValueError("g_tau must be > 0")
    if n_steps < 1000 * g_tau:
        raise ValueError("need n_steps >= 1000 * g_tau")
    dt = 1.0 / n_steps
    drift = g_tau * dt
    diff = math.sqrt(g_tau * dt)
    z = np.full(n_runs, float(z0))
    for _ in range(n_steps):
        z += drift * np.tanh(z) + diff * rng.standard_normal(n_runs)
    return z

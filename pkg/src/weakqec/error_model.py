"""Random error Hamiltonians and closed-form fidelity baselines.

Couplings are drawn fresh for every cycle of every trajectory, either
Gaussian with standard deviation alpha or binary +-alpha, and multiply
the code's single-qubit error generators. The analytic models give the
exact ensemble-averaged fidelity for the unencoded qubit and for the
projectively corrected three-qubit code, and serve as oracles for the
Monte Carlo engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .qstate import HermitianOperator, pauli_matrix

ERROR_KINDS = ("gaussian", "binary")


@dataclass(frozen=True)
class ErrorDistribution:
    """Coupling law: 'gaussian' N(0, alpha^2) or 'binary' +-alpha."""

    kind: str
    alpha: float

    def __post_init__(self):
        if self.kind not in ERROR_KINDS:
            raise ValueError(f"kind must be one of {ERROR_KINDS}")
        if self.alpha < 0.0 or not math.isfinite(self.alpha):
            raise ValueError("alpha must be finite and >= 0")


def sample_couplings(dist: ErrorDistribution, count: int, rng: np.random.Generator) -> np.ndarray:
    """Independent couplings, one per error generator."""
    if dist.kind == "gaussian":
        return rng.normal(0.0, dist.alpha, count)
    signs = np.where(rng.random(count) < 0.5, -1.0, 1.0)
    return dist.alpha * signs


@lru_cache(maxsize=16)
def _generator_stack(generators: tuple[str, ...]) -> np.ndarray:
    return np.stack([pauli_matrix(g) for g in generators])


def sample_error_hamiltonian(code, dist: ErrorDistribution, rng: np.random.Generator) -> HermitianOperator:
    """One cycle's error Hamiltonian sum(gamma_i * P_i) for the code."""
    gammas = sample_couplings(dist, len(code.error_generators), rng)
    mat = np.tensordot(gammas, _generator_stack(code.error_generators), axes=1)
    terms = tuple(zip(map(float, gammas), code.error_generators))
    return HermitianOperator(matrix=mat, terms=terms)


def _fid_flip_gauss(x: float) -> float:
    return 0.5 * (1.0 + math.exp(-2.0 * x * x))


def _fid_flip_binary(x: float) -> float:
    return math.cos(x) ** 2


def _fid_arb_gauss(x: float) -> float:
    return (2.0 + (1.0 - 4.0 * x * x) * math.exp(-2.0 * x * x)) / 3.0


def _fid_arb_binary(x: float) -> float:
    return (1.0 + 2.0 * math.cos(math.sqrt(3.0) * x) ** 2) / 3.0


def _fid_proj_bitflip3(x: float) -> float:
    u = math.exp(-2.0 * x * x)
    return 0.25 * (2.0 - u**3 + 3.0 * u)


ANALYTIC_MODELS = {
    "unenc_flip_gauss": _fid_flip_gauss,
    "unenc_flip_binary": _fid_flip_binary,
    "unenc_arb_gauss": _fid_arb_gauss,
    "unenc_arb_binary": _fid_arb_binary,
    "proj_ec_bitflip3": _fid_proj_bitflip3,
}


def analytic_fidelity(model: str, alpha_tau: float) -> float:
    """Closed-form mean fidelity after one cycle at error size alpha*tau."""
    try:
        fn = ANALYTIC_MODELS[model]
    except KeyError:
        raise ValueError(
            f"unknown model {model!r}; choose from {tuple(ANALYTIC_MODELS)}"
        ) from None
    if alpha_tau < 0.0:
        raise ValueError("alpha_tau must be >= 0")
    return fn(alpha_tau)


class ThresholdNotFound(ValueError):
    """The improvement criterion has no sign change on the search bracket."""


def projective_bound_bitflip(factor: float = 2.0, bracket: tuple[float, float] = (1e-4, 2.0)) -> float:
    """Largest correctable error for the projectively corrected bit-flip code.

    Solves 1 - f_corrected(x) = (1 - f_unencoded(x)) / factor by bisection
    to 1e-6. factor=2 demands the infidelity be at least halved; factor=1
    asks for any improvement at all (which for this code never crosses at
    finite error size, so that variant raises ThresholdNotFound).
    """
    if factor <= 0.0:
        raise ValueError("factor must be > 0")

    def gap(x: float) -> float:
        return (1.0 - _fid_proj_bitflip3(x)) - (1.0 - _fid_flip_gauss(x)) / factor

    lo, hi = bracket
    glo, ghi = gap(lo), gap(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if math.copysign(1.0, glo) == math.copysign(1.0, ghi):
        raise ThresholdNotFound(
            f"no crossing on ({lo}, {hi}) for factor {factor}: gap({lo})={glo:.3e}, gap({hi})={ghi:.3e}"
        )
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        gm = gap(mid)
        if gm == 0.0:
            return mid
        if math.copysign(1.0, gm) == math.copysign(1.0, glo):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)

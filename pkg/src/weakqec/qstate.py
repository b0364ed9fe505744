"""Dense states and operators for registers of up to five qubits.

Conventions used throughout the package:

* A register state is a 2^n x 2^n complex density matrix (plain numpy
  array, complex128).
* Pauli words are strings over {I, X, Y, Z}. The leftmost letter acts on
  qubit 1, which is the most significant bit of a basis index, so "ZZI"
  means sigma_z (x) sigma_z (x) I and the basis state |100> has index 4.
* Time evolution follows d rho/dt = i [rho, H], equivalently
  rho(t) = exp(-iHt) rho exp(+iHt).
* Everything is dimensionless: one cycle lasts tau = 1, so couplings are
  quoted as the products alpha*tau and g*tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

try:
    import numba as _numba
except ImportError:  # pragma: no cover - exercised only without numba
    _numba = None

MAX_QUBITS = 5

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
EIGENVALUE_TOL = 1e-9

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

# RK4 step control: cap on |H| * dt for the default substep count. Keeps
# the integrator error orders of magnitude below Monte Carlo noise while
# staying cheap inside the trajectory loop.
_DEFAULT_STEP_CAP = 0.05
_MIN_SUBSTEPS = 16


@lru_cache(maxsize=None)
def _pauli_matrix_cached(letters: str) -> np.ndarray:
    if not 1 <= len(letters) <= MAX_QUBITS:
        raise ValueError(f"Pauli word length must be 1..{MAX_QUBITS}, got {letters!r}")
    mat = PAULI_1Q.get(letters[0])
    if mat is None:
        raise ValueError(f"invalid Pauli letter {letters[0]!r} in {letters!r}")
    for ch in letters[1:]:
        single = PAULI_1Q.get(ch)
        if single is None:
            raise ValueError(f"invalid Pauli letter {ch!r} in {letters!r}")
        mat = np.kron(mat, single)
    mat.setflags(write=False)
    return mat


def pauli_matrix(letters: str) -> np.ndarray:
    """Dense matrix of a Pauli word (read-only, cached)."""
    return _pauli_matrix_cached(letters)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Hermitian matrix together with the Pauli-sum terms that built it."""

    matrix: np.ndarray
    terms: tuple[tuple[float, str], ...]

    @classmethod
    def from_terms(cls, terms) -> "HermitianOperator":
        """Assemble sum(coupling * pauli_matrix(word)) from (coupling, word) pairs."""
        terms = tuple((float(c), str(w)) for c, w in terms)
        if not terms:
            raise ValueError("need at least one (coupling, word) term")
        n = len(terms[0][1])
        for c, w in terms:
            if len(w) != n:
                raise ValueError("all Pauli words must have equal length")
            if not math.isfinite(c):
                raise ValueError("couplings must be finite")
        mat = np.zeros((2**n, 2**n), dtype=complex)
        for c, w in terms:
            if c != 0.0:
                mat += c * pauli_matrix(w)
        return cls(matrix=mat, terms=terms)

    @property
    def n_qubits(self) -> int:
        return len(self.terms[0][1])


def pauli_operator(letters: str) -> HermitianOperator:
    """Single Pauli word wrapped as a unit-coupling Hermitian operator."""
    return HermitianOperator.from_terms([(1.0, letters)])


def basis_ket(n_qubits: int, index: int) -> np.ndarray:
    """Computational basis column vector |index> on n qubits."""
    dim = 2**n_qubits
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for {n_qubits} qubits")
    vec = np.zeros(dim, dtype=complex)
    vec[index] = 1.0
    return vec


def pure_state_density(vec: np.ndarray) -> np.ndarray:
    """|psi><psi| for a normalized state vector."""
    vec = np.asarray(vec, dtype=complex)
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"state vector norm {norm} is not 1 within 1e-12")
    return np.outer(vec, vec.conj())


def check_density_matrix(rho: np.ndarray, n_qubits: int | None = None) -> np.ndarray:
    """Validate Hermiticity, unit trace, and positivity; returns rho unchanged.

    Raises ValueError naming the violated invariant.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if 2**n != dim or not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"dimension {dim} is not 2^n for n in 1..{MAX_QUBITS}")
    if n_qubits is not None and n != n_qubits:
        raise ValueError(f"expected {n_qubits} qubits, got {n}")
    if not np.all(np.isfinite(rho.real)) or not np.all(np.isfinite(rho.imag)):
        raise ValueError("density matrix contains non-finite entries")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > HERMITICITY_TOL:
        raise ValueError(f"not Hermitian: max deviation {herm:.3e}")
    tr = abs(rho.trace() - 1.0)
    if tr > TRACE_TOL:
        raise ValueError(f"trace deviates from 1 by {tr:.3e}")
    lo = float(np.linalg.eigvalsh(rho)[0])
    if lo < -EIGENVALUE_TOL:
        raise ValueError(f"negative eigenvalue {lo:.3e}")
    return rho


def _as_hermitian_matrix(ham, tol: float = 1e-12) -> np.ndarray:
    mat = ham.matrix if isinstance(ham, HermitianOperator) else np.asarray(ham, dtype=complex)
    dev = np.max(np.abs(mat - mat.conj().T)) if mat.size else 0.0
    if dev > tol:
        raise ValueError(f"Hamiltonian is not Hermitian (max |H - H^dag| = {dev:.3e})")
    return mat


def default_substeps(ham, duration: float) -> int:
    """Substep count keeping |H|*dt below the RK4 step cap (floor 16)."""
    mat = ham.matrix if isinstance(ham, HermitianOperator) else np.asarray(ham)
    if mat.size == 0 or duration == 0.0:
        return _MIN_SUBSTEPS
    norm = float(np.abs(np.linalg.eigvalsh(mat)).max())
    if norm == 0.0:
        return _MIN_SUBSTEPS
    return max(_MIN_SUBSTEPS, math.ceil(norm * duration / _DEFAULT_STEP_CAP))


def _rk4_liouville_numpy(mat: np.ndarray, rho: np.ndarray, dt: float, substeps: int) -> np.ndarray:
    out = rho.astype(complex, copy=True)
    work = np.empty_like(out)
    stage = np.empty_like(out)
    k1 = np.empty_like(out)
    k = np.empty_like(out)
    acc = np.empty_like(out)

    def deriv(src, dst):
        # i[src, H] = i(A^dag - A) with A = H src; src stays Hermitian
        np.matmul(mat, src, out=work)
        np.conjugate(work.T, out=dst)
        dst -= work
        dst *= 1j

    half = 0.5 * dt
    sixth = dt / 6.0
    for _ in range(substeps):
        deriv(out, k1)
        np.multiply(k1, half, out=stage)
        stage += out
        deriv(stage, k)
        np.add(k1, k, out=acc)
        acc += k
        np.multiply(k, half, out=stage)
        stage += out
        deriv(stage, k)
        acc += k
        acc += k
        np.multiply(k, dt, out=stage)
        stage += out
        deriv(stage, k)
        acc += k
        acc *= sixth
        out += acc
    return out


if _numba is not None:

    @_numba.njit(cache=True)
    def _rk4_liouville_jit(mat, rho, dt, substeps):  # pragma: no cover - numba
        d = rho.shape[0]
        out = rho.copy()
        work = np.empty((d, d), np.complex128)
        stage = np.empty((d, d), np.complex128)
        k1 = np.empty((d, d), np.complex128)
        k2 = np.empty((d, d), np.complex128)
        k3 = np.empty((d, d), np.complex128)
        half = 0.5 * dt
        sixth = dt / 6.0
        for _ in range(substeps):
            np.dot(mat, out, work)
            for i in range(d):
                for j in range(d):
                    k1[i, j] = 1j * (np.conj(work[j, i]) - work[i, j])
                    stage[i, j] = out[i, j] + half * k1[i, j]
            np.dot(mat, stage, work)
            for i in range(d):
                for j in range(d):
                    k2[i, j] = 1j * (np.conj(work[j, i]) - work[i, j])
                    stage[i, j] = out[i, j] + half * k2[i, j]
            np.dot(mat, stage, work)
            for i in range(d):
                for j in range(d):
                    k3[i, j] = 1j * (np.conj(work[j, i]) - work[i, j])
                    stage[i, j] = out[i, j] + dt * k3[i, j]
            np.dot(mat, stage, work)
            for i in range(d):
                for j in range(d):
                    k4 = 1j * (np.conj(work[j, i]) - work[i, j])
                    out[i, j] += sixth * (k1[i, j] + 2.0 * (k2[i, j] + k3[i, j]) + k4)
        return out

else:  # pragma: no cover - exercised only without numba
    _rk4_liouville_jit = None


def evolve_hamiltonian(rho: np.ndarray, ham, duration: float, substeps: int | None = None) -> np.ndarray:
    """Integrate d rho/dt = i [rho, H] over `duration` with fixed-step RK4.

    `ham` may be a HermitianOperator or a plain Hermitian ndarray. When
    `substeps` is omitted the count is chosen by `default_substeps`; pass
    an explicit count to push the integrator to tighter accuracy (the
    result converges to exp(-iHt) rho exp(+iHt) at fourth order). A
    compiled kernel is used when numba is importable; the numpy loop is
    the fallback.
    """
    if duration < 0.0:
        raise ValueError("duration must be >= 0")
    mat = _as_hermitian_matrix(ham)
    if mat.shape != rho.shape:
        raise ValueError("Hamiltonian and state dimensions differ")
    if duration == 0.0:
        return rho.copy()
    if substeps is None:
        substeps = default_substeps(mat, duration)
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    dt = duration / substeps
    if _rk4_liouville_jit is not None:
        mat_c = np.ascontiguousarray(mat, dtype=np.complex128)
        rho_c = np.ascontiguousarray(rho, dtype=np.complex128)
        return _rk4_liouville_jit(mat_c, rho_c, dt, substeps)
    return _rk4_liouville_numpy(mat, rho, dt, substeps)


def exact_evolution(rho: np.ndarray, ham, duration: float) -> np.ndarray:
    """Reference conjugation by the matrix exponential, for cross-checks."""
    mat = _as_hermitian_matrix(ham)
    evals, evecs = np.linalg.eigh(mat)
    phases = np.exp(-1j * evals * duration)
    u = (evecs * phases) @ evecs.conj().T
    return u @ rho @ u.conj().T


def apply_pauli_rotation(rho: np.ndarray, letters: str, angle: float) -> np.ndarray:
    """Conjugate rho by exp(-i * angle/2 * P) for the Pauli word P."""
    if abs(angle) > 2.0 * math.pi:
        raise ValueError("rotation angle must satisfy |angle| <= 2*pi")
    pmat = pauli_matrix(letters)
    if pmat.shape != rho.shape:
        raise ValueError("Pauli word length does not match the register")
    half = 0.5 * angle
    u = math.cos(half) * np.eye(rho.shape[0], dtype=complex) - 1j * math.sin(half) * pmat
    return u @ rho @ u.conj().T


def codeword_fidelity(rho: np.ndarray, target: np.ndarray) -> float:
    """<target| rho |target>, asserting a ~real result; clipped into [0, 1].

    Values slightly outside [0, 1] are tolerated and clipped: conditioning
    on an improbable measurement branch divides the state by a small
    probability, which can amplify integrator truncation into the 1e-3
    range on isolated trajectories. Deviations beyond 0.05 indicate a
    genuine normalization bug and raise.
    """
    target = np.asarray(target, dtype=complex)
    if target.ndim != 1:
        raise ValueError("target must be a state vector")
    if target.shape[0] != rho.shape[0]:
        raise ValueError("target and state dimensions differ")
    norm = np.linalg.norm(target)
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"target norm {norm} is not 1 within 1e-12")
    val = complex(np.vdot(target, rho @ target))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"fidelity has imaginary part {val.imag:.3e}")
    f = val.real
    if f < -0.05 or f > 1.05:
        raise ValueError(f"fidelity {f} is far outside [0, 1]")
    return min(max(f, 0.0), 1.0)

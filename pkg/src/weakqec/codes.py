"""Register encodings: unencoded qubit, three-qubit parity code, five-qubit code.

Each Code bundles the codeword, the ordered syndrome words, the error
generators its noise model draws from, and the resolver that maps
current-sign patterns to corrective rotations. `verify_code` re-derives
every structural property from scratch and reports violations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .feedback import BITFLIP_RESOLVER, FIVE_QUBIT_RESOLVER, FeedbackResolver
from .measurement import (
    SyndromePartition,
    assert_commuting,
    partition_eigenspaces,
    pauli_words_commute,
)
from .qstate import basis_ket, pauli_matrix


@dataclass(frozen=True, eq=False)
class Code:
    name: str
    n_qubits: int
    logical_zero: np.ndarray
    logical_one: Optional[np.ndarray]
    syndromes: tuple[str, ...]
    error_generators: tuple[str, ...]
    resolver: Optional[FeedbackResolver]
    partitions: tuple[SyndromePartition, ...]

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


def _make_code(name, n_qubits, logical_zero, logical_one, syndromes, error_generators, resolver):
    assert_commuting(syndromes)
    parts = tuple(partition_eigenspaces(s) for s in syndromes)
    logical_zero = np.asarray(logical_zero, dtype=complex)
    logical_zero.setflags(write=False)
    if logical_one is not None:
        logical_one = np.asarray(logical_one, dtype=complex)
        logical_one.setflags(write=False)
    return Code(
        name=name,
        n_qubits=n_qubits,
        logical_zero=logical_zero,
        logical_one=logical_one,
        syndromes=tuple(syndromes),
        error_generators=tuple(error_generators),
        resolver=resolver,
        partitions=parts,
    )


def unencoded_code(errors: str = "flip") -> Code:
    """Bare qubit with no syndromes; `errors` picks X-only or full X/Y/Z noise."""
    if errors == "flip":
        gens = ("X",)
        name = "unencoded1"
    elif errors == "arb":
        gens = ("X", "Y", "Z")
        name = "unencoded1_arb"
    else:
        raise ValueError("errors must be 'flip' or 'arb'")
    return _make_code(name, 1, basis_ket(1, 0), basis_ket(1, 1), (), gens, None)


def three_qubit_code() -> Code:
    """Bit-flip code |0> -> |000| with parity syndromes ZZI, IZZ."""
    return _make_code(
        "bitflip3",
        3,
        basis_ket(3, 0),
        basis_ket(3, 7),
        ("ZZI", "IZZ"),
        ("XII", "IXI", "IIX"),
        BITFLIP_RESOLVER,
    )


# 16-term five-qubit codeword; all amplitudes are +-1/4.
_FIVE_QUBIT_PLUS = ("00000", "10010", "01001", "10100", "01010", "00101")
_FIVE_QUBIT_MINUS = (
    "11110", "01111", "10111", "11011", "11101",
    "01100", "00110", "00011", "10001", "11000",
)

FIVE_QUBIT_SYNDROMES = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")


def _five_qubit_logical_zero() -> np.ndarray:
    vec = np.zeros(32, dtype=complex)
    for bits in _FIVE_QUBIT_PLUS:
        vec[int(bits, 2)] = 0.25
    for bits in _FIVE_QUBIT_MINUS:
        vec[int(bits, 2)] = -0.25
    return vec


def five_qubit_code() -> Code:
    """[[5,1,3]] code correcting every single-qubit Pauli error."""
    zero = _five_qubit_logical_zero()
    one = pauli_matrix("XXXXX") @ zero
    gens = tuple(
        "".join(p if k == pos else "I" for k in range(5))
        for p in ("X", "Y", "Z")
        for pos in range(5)
    )
    return _make_code("five_qubit", 5, zero, one, FIVE_QUBIT_SYNDROMES, gens, FIVE_QUBIT_RESOLVER)


_REGISTRY = {
    "unencoded1": lambda: unencoded_code("flip"),
    "unencoded1_arb": lambda: unencoded_code("arb"),
    "bitflip3": three_qubit_code,
    "five_qubit": five_qubit_code,
}

CODE_NAMES = tuple(_REGISTRY)


def get_code(name: str) -> Code:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown code {name!r}; choose from {CODE_NAMES}") from None
    return factory()


def error_sign_pattern(error_word: str, syndromes) -> tuple[int, ...]:
    """Commutation fingerprint of an error: -1 where it anticommutes."""
    return tuple(1 if pauli_words_commute(error_word, s) else -1 for s in syndromes)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class CodeReport:
    code_name: str
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]


def verify_code(code: Code) -> CodeReport:
    """Re-derive and check every structural invariant of a code."""
    checks: list[CheckResult] = []

    def record(name, passed, detail=""):
        checks.append(CheckResult(name=name, passed=bool(passed), detail=detail))

    norm = np.linalg.norm(code.logical_zero)
    record("codeword normalized", abs(norm - 1.0) <= 1e-12, f"norm={norm!r}")

    if code.logical_one is not None:
        norm1 = np.linalg.norm(code.logical_one)
        overlap = abs(np.vdot(code.logical_zero, code.logical_one))
        record("logical one normalized", abs(norm1 - 1.0) <= 1e-12, f"norm={norm1!r}")
        record("logical states orthogonal", overlap <= 1e-10, f"|<0|1>|={overlap:.3e}")

    commute_ok, commute_detail = True, ""
    for i, a in enumerate(code.syndromes):
        for b in code.syndromes[i + 1 :]:
            ma, mb = pauli_matrix(a), pauli_matrix(b)
            dev = float(np.max(np.abs(ma @ mb - mb @ ma)))
            if dev > 1e-12:
                commute_ok, commute_detail = False, f"[{a},{b}] deviates by {dev:.3e}"
    record("syndromes commute", commute_ok, commute_detail)

    for s in code.syndromes:
        resid = float(np.max(np.abs(pauli_matrix(s) @ code.logical_zero - code.logical_zero)))
        record(f"codeword is +1 eigenstate of {s}", resid <= 1e-10, f"residual={resid:.3e}")

    for s in code.syndromes:
        evals = np.linalg.eigvalsh(np.asarray(pauli_matrix(s)))
        n_plus = int(np.sum(evals > 0.0))
        ok = n_plus == code.dim // 2 and np.allclose(np.abs(evals), 1.0, atol=1e-12)
        record(f"{s} splits the space evenly", ok, f"+1 multiplicity {n_plus}/{code.dim}")

    if code.syndromes:
        patterns = {}
        for gen in code.error_generators:
            pat = error_sign_pattern(gen, code.syndromes)
            patterns.setdefault(pat, []).append(gen)
        collisions = {p: gs for p, gs in patterns.items() if len(gs) > 1}
        record(
            "error generators have distinct sign patterns",
            not collisions,
            f"collisions={collisions}" if collisions else f"{len(patterns)} unique patterns",
        )

    if code.resolver is not None:
        trivial = tuple(1 for _ in code.syndromes)
        round_trip_ok, detail = True, ""
        for gen in code.error_generators:
            pat = error_sign_pattern(gen, code.syndromes)
            if pat == trivial:
                round_trip_ok, detail = False, f"{gen} is invisible to the syndromes"
                break
            op = code.resolver.operator_for(pat)
            if op != gen:
                round_trip_ok, detail = False, f"{gen} -> {pat} -> {op}"
                break
        record("resolver returns the diagnosed error", round_trip_ok, detail)

    return CodeReport(code_name=code.name, checks=tuple(checks))

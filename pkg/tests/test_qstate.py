"""Unit tests for states, Pauli words, evolution, rotations, and fidelity."""

import math

import numpy as np
import numpy.testing as npt
import pytest

from weakqec.qstate import (
    HermitianOperator,
    apply_pauli_rotation,
    basis_ket,
    check_density_matrix,
    codeword_fidelity,
    default_substeps,
    evolve_hamiltonian,
    exact_evolution,
    pauli_matrix,
    pauli_operator,
    pure_state_density,
)


class TestPauliWords:
    def test_single_z_matrix(self):
        npt.assert_array_equal(pauli_matrix("Z"), np.diag([1.0, -1.0]))

    def test_zzi_fixes_all_zeros(self):
        # |000> is a +1 eigenvector of Z (x) Z (x) I
        vec = basis_ket(3, 0)
        npt.assert_allclose(pauli_matrix("ZZI") @ vec, vec, atol=1e-15)

    def test_xzzxi_maps_basis_states(self):
        # multiply the single-qubit actions by hand: X flips qubits 1 and 4,
        # the Z's act on |0> trivially, so |00000> -> +|10010> (index 18)
        vec = pauli_matrix("XZZXI") @ basis_ket(5, 0)
        expected = np.zeros(32, dtype=complex)
        expected[0b10010] = 1.0
        npt.assert_allclose(vec, expected, atol=1e-15)

    def test_invalid_letter_rejected(self):
        with pytest.raises(ValueError, match="invalid Pauli letter"):
            pauli_matrix("ZQI")

    def test_length_bounds(self):
        with pytest.raises(ValueError):
            pauli_matrix("")
        with pytest.raises(ValueError):
            pauli_matrix("Z" * 6)

    @pytest.mark.parametrize("word", ["X", "Y", "ZZ", "XZZXI", "ZXIXZ", "YIY"])
    def test_squares_to_identity(self, word):
        mat = pauli_matrix(word)
        npt.assert_allclose(mat @ mat, np.eye(mat.shape[0]), atol=1e-12)

    @pytest.mark.parametrize("word", ["X", "ZZI", "XZZXI"])
    def test_eigenvalue_split(self, word):
        evals = np.linalg.eigvalsh(np.asarray(pauli_matrix(word)))
        npt.assert_allclose(np.abs(evals), 1.0, atol=1e-12)
        assert int(np.sum(evals > 0)) == mat_dim(word) // 2


def mat_dim(word):
    return 2 ** len(word)


class TestHermitianOperator:
    def test_from_terms_reconstruction(self):
        op = HermitianOperator.from_terms([(0.3, "XI"), (-0.7, "ZZ")])
        expected = 0.3 * pauli_matrix("XI") - 0.7 * pauli_matrix("ZZ")
        npt.assert_allclose(op.matrix, expected, atol=1e-12)
        assert op.n_qubits == 2
        assert np.max(np.abs(op.matrix - op.matrix.conj().T)) <= 1e-12

    def test_single_word_wrapper(self):
        op = pauli_operator("ZZI")
        npt.assert_array_equal(op.matrix, pauli_matrix("ZZI"))
        assert op.terms == ((1.0, "ZZI"),)

    def test_mixed_lengths_rejected(self):
        with pytest.raises(ValueError):
            HermitianOperator.from_terms([(1.0, "X"), (1.0, "XX")])


class TestEvolution:
    def test_single_qubit_bitflip_matrix(self):
        # closed form for exp(-i gamma tau X) acting on |0><0|:
        # rho00 = cos^2, rho01 = +i sin cos
        gamma_tau = 0.37
        rho = evolve_hamiltonian(
            pure_state_density(basis_ket(1, 0)),
            HermitianOperator.from_terms([(gamma_tau, "X")]),
            1.0,
            substeps=256,
        )
        c, s = math.cos(gamma_tau), math.sin(gamma_tau)
        expected = np.array([[c * c, 1j * s * c], [-1j * s * c, s * s]])
        npt.assert_allclose(rho, expected, atol=1e-9)

    def test_zero_hamiltonian_is_identity(self):
        rho = pure_state_density(basis_ket(2, 1))
        out = evolve_hamiltonian(rho, np.zeros((4, 4), dtype=complex), 1.0)
        npt.assert_allclose(out, rho, atol=1e-14)

    def test_half_period_flip(self):
        # cos^2(pi/2) = 0: |0> goes exactly to |1>
        rho = evolve_hamiltonian(
            pure_state_density(basis_ket(1, 0)),
            HermitianOperator.from_terms([(math.pi / 2, "X")]),
            1.0,
            substeps=256,
        )
        npt.assert_allclose(rho, pure_state_density(basis_ket(1, 1)), atol=1e-8)

    def test_matches_exact_conjugation(self):
        rng = np.random.default_rng(7)
        ham = HermitianOperator.from_terms(
            [(g, w) for g, w in zip(rng.normal(0, 0.5, 3), ("XII", "IXI", "IIX"))]
        )
        rho = pure_state_density(basis_ket(3, 0))
        out = evolve_hamiltonian(rho, ham, 1.0, substeps=400)
        ref = exact_evolution(rho, ham, 1.0)
        assert np.max(np.abs(out - ref)) <= 1e-8

    def test_non_hermitian_rejected(self):
        bad = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
        with pytest.raises(ValueError, match="not Hermitian"):
            evolve_hamiltonian(pure_state_density(basis_ket(1, 0)), bad, 1.0)

    def test_preserves_trace_hermiticity_purity(self):
        rng = np.random.default_rng(3)
        vec = rng.normal(size=8) + 1j * rng.normal(size=8)
        vec /= np.linalg.norm(vec)
        rho = pure_state_density(vec)
        ham = HermitianOperator.from_terms(
            [(g, w) for g, w in zip(rng.normal(0, 0.8, 3), ("XII", "IXI", "IIX"))]
        )
        out = evolve_hamiltonian(rho, ham, 1.0, substeps=128)
        assert abs(out.trace().real - 1.0) <= 1e-10
        assert np.max(np.abs(out - out.conj().T)) <= 1e-10
        purity = (out @ out).trace().real
        assert abs(purity - 1.0) <= 1e-8

    def test_split_duration_consistency(self):
        ham = HermitianOperator.from_terms([(0.9, "XZ"), (0.4, "ZX")])
        rho = pure_state_density(basis_ket(2, 0))
        whole = evolve_hamiltonian(rho, ham, 1.0, substeps=128)
        half = evolve_hamiltonian(rho, ham, 0.5, substeps=64)
        half = evolve_hamiltonian(half, ham, 0.5, substeps=64)
        assert np.max(np.abs(whole - half)) <= 1e-8

    def test_default_substeps_floor_and_cap(self):
        small = HermitianOperator.from_terms([(0.01, "X")])
        assert default_substeps(small, 1.0) == 16
        big = HermitianOperator.from_terms([(10.0, "X")])
        assert default_substeps(big, 1.0) == math.ceil(10.0 / 0.05)

    def test_default_accuracy_far_below_monte_carlo_noise(self):
        # the adaptive default trades ~1e-6 truncation for speed; pin that scale
        ham = HermitianOperator.from_terms([(math.pi / 2, "X")])
        rho = pure_state_density(basis_ket(1, 0))
        err = np.max(np.abs(evolve_hamiltonian(rho, ham, 1.0) - exact_evolution(rho, ham, 1.0)))
        assert err <= 1e-5


class TestPauliRotation:
    def test_zero_angle(self):
        rho = pure_state_density(basis_ket(3, 5))
        npt.assert_allclose(apply_pauli_rotation(rho, "ZZI", 0.0), rho, atol=1e-15)

    def test_pi_rotation_is_bit_flip(self):
        rho = apply_pauli_rotation(pure_state_density(basis_ket(1, 0)), "X", math.pi)
        npt.assert_allclose(rho, pure_state_density(basis_ket(1, 1)), atol=1e-12)

    def test_flip_first_qubit_of_three(self):
        rho = apply_pauli_rotation(pure_state_density(basis_ket(3, 0b100)), "XII", math.pi)
        npt.assert_allclose(rho, pure_state_density(basis_ket(3, 0)), atol=1e-12)

    def test_rotation_inverse(self):
        rng = np.random.default_rng(11)
        vec = rng.normal(size=4) + 1j * rng.normal(size=4)
        vec /= np.linalg.norm(vec)
        rho = pure_state_density(vec)
        out = apply_pauli_rotation(apply_pauli_rotation(rho, "XZ", 1.234), "XZ", -1.234)
        assert np.max(np.abs(out - rho)) <= 1e-10

    def test_agrees_with_hamiltonian_evolution(self):
        # rotation by angle a equals evolving under (a / 2 duration) * P
        angle, duration = -1.1, 1.0
        rho = pure_state_density(basis_ket(2, 2))
        direct = apply_pauli_rotation(rho, "XI", angle)
        ham = HermitianOperator.from_terms([(angle / (2.0 * duration), "XI")])
        via_evolution = evolve_hamiltonian(rho, ham, duration, substeps=512)
        assert np.max(np.abs(direct - via_evolution)) <= 1e-9

    def test_angle_bound(self):
        with pytest.raises(ValueError):
            apply_pauli_rotation(pure_state_density(basis_ket(1, 0)), "X", 7.0)


class TestFidelity:
    def test_perfect_overlap(self):
        assert codeword_fidelity(pure_state_density(basis_ket(3, 0)), basis_ket(3, 0)) == 1.0

    def test_maximally_mixed(self):
        rho = np.eye(8, dtype=complex) / 8.0
        assert abs(codeword_fidelity(rho, basis_ket(3, 0)) - 1.0 / 8.0) <= 1e-12

    def test_bitflip_closed_form(self):
        # cos^2(0.3) = 0.91267 after evolving |0> under 0.3 * X for tau = 1
        rho = evolve_hamiltonian(
            pure_state_density(basis_ket(1, 0)),
            HermitianOperator.from_terms([(0.3, "X")]),
            1.0,
            substeps=256,
        )
        f = codeword_fidelity(rho, basis_ket(1, 0))
        assert abs(f - math.cos(0.3) ** 2) <= 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimensions differ"):
            codeword_fidelity(pure_state_density(basis_ket(2, 0)), basis_ket(3, 0))

    def test_unnormalized_target_rejected(self):
        with pytest.raises(ValueError, match="norm"):
            codeword_fidelity(pure_state_density(basis_ket(1, 0)), np.array([1.0, 1.0]))


class TestDensityMatrixChecks:
    def test_valid_state_passes(self):
        check_density_matrix(pure_state_density(basis_ket(2, 1)))

    def test_trace_violation(self):
        with pytest.raises(ValueError, match="trace"):
            check_density_matrix(np.eye(2, dtype=complex))

    def test_hermiticity_violation(self):
        rho = np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex)
        with pytest.raises(ValueError, match="Hermitian"):
            check_density_matrix(rho)

    def test_negative_eigenvalue(self):
        rho = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(ValueError, match="eigenvalue"):
            check_density_matrix(rho)

    def test_nan_rejected(self):
        rho = np.full((2, 2), np.nan, dtype=complex)
        with pytest.raises(ValueError, match="finite"):
            check_density_matrix(rho)

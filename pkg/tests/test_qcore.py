import numpy as np
import pytest
from hypothesis import given, settings

from strategies import density_matrices, hermitian_matrices
from witfam.exceptions import InvalidDistribution, InvalidState, NotHermitian
from witfam.qcore import (
    KET_00, KET_01, KET_10, KET_11, MAXIMALLY_MIXED, PAULI_X, PHI_PLUS, PSI_MINUS,
    as_density_matrix, classical_fidelity, concurrence, eig_hermitian, ket,
    min_pt_eigenvalue, partial_transpose, projector, quantum_fidelity, von_neumann_entropy,
)
from witfam.states import rank1_state, werner_state


def test_partial_transpose_fixes_diagonal_states():
    rho = projector(KET_00)
    assert np.allclose(partial_transpose(rho), rho)


def test_partial_transpose_index_rule():
    op = np.outer(KET_01, KET_10)
    assert np.allclose(partial_transpose(op), np.outer(KET_00, KET_11))


def test_partial_transpose_of_singlet_spectrum():
    w = eig_hermitian(partial_transpose(projector(PSI_MINUS))).eigenvalues
    assert np.allclose(w, [0.5, 0.5, 0.5, -0.5], atol=1e-12)


@given(density_matrices())
def test_partial_transpose_is_involution(rho):
    assert np.linalg.norm(partial_transpose(partial_transpose(rho)) - rho) < 1e-12


def test_eig_hermitian_diagonal():
    spectrum = eig_hermitian(np.diag([1.0, 3.0, 4.0, 2.0]))
    assert np.allclose(spectrum.eigenvalues, [4, 3, 2, 1])


def test_eig_hermitian_pauli_x():
    assert np.allclose(eig_hermitian(PAULI_X).eigenvalues, [1, -1])


def test_eig_hermitian_singlet_pt_eigenket():
    spectrum = eig_hermitian(partial_transpose(projector(PSI_MINUS)))
    assert spectrum.eigenvalues[-1] == pytest.approx(-0.5, abs=1e-12)
    assert abs(np.vdot(PHI_PLUS, spectrum.eigenvectors[:, -1])) == pytest.approx(1.0, abs=1e-12)


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        eig_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))


@settings(max_examples=300)
@given(hermitian_matrices())
def test_eig_hermitian_reconstruction_and_orthonormality(h):
    w, v = eig_hermitian(h)
    assert np.all(np.diff(w) <= 0)
    scale = max(1.0, np.linalg.norm(h))
    assert np.linalg.norm(h - (v * w) @ v.conj().T) < 1e-10 * scale
    assert np.linalg.norm(v.conj().T @ v - np.eye(4)) < 1e-10


def test_eig_hermitian_matches_lapack(rng):
    for _ in range(200):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        h = a + a.conj().T
        assert np.allclose(eig_hermitian(h).eigenvalues, np.linalg.eigvalsh(h)[::-1], atol=1e-12)


def test_quantum_fidelity_examples():
    rho = werner_state(0.6)
    assert quantum_fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)
    assert quantum_fidelity(projector(KET_00), projector(KET_11)) == pytest.approx(0.0, abs=1e-12)
    assert quantum_fidelity(projector(PSI_MINUS), MAXIMALLY_MIXED) == pytest.approx(0.5, abs=1e-12)


@given(density_matrices(), density_matrices())
def test_quantum_fidelity_symmetric(rho, sigma):
    assert quantum_fidelity(rho, sigma) == pytest.approx(quantum_fidelity(sigma, rho), abs=1e-10)


@given(density_matrices(rank=1), density_matrices())
def test_quantum_fidelity_pure_formula(rho, sigma):
    psi = eig_hermitian(rho).eigenvectors[:, 0]
    expected = np.sqrt(max(0.0, np.vdot(psi, sigma @ psi).real))
    assert quantum_fidelity(rho, sigma) == pytest.approx(expected, abs=1e-7)


def test_classical_fidelity_examples():
    p = np.array([0.1, 0.2, 0.3, 0.4])
    assert classical_fidelity(p, p) == pytest.approx(1.0)
    assert classical_fidelity([1, 0, 0, 0], [0, 1, 0, 0]) == 0.0
    assert classical_fidelity([0.5, 0.5, 0, 0], [0.25] * 4) == pytest.approx(2 * np.sqrt(0.125))


@pytest.mark.parametrize("p", [[0.5, 0.6, -0.1, 0.0], [0.3, 0.3, 0.3, 0.3]])
def test_classical_fidelity_rejects_bad_distributions(p):
    with pytest.raises(InvalidDistribution):
        classical_fidelity(p, [0.25] * 4)


def test_concurrence_examples():
    assert concurrence(projector(PSI_MINUS)) == pytest.approx(1.0, abs=1e-7)
    assert concurrence(MAXIMALLY_MIXED) == 0.0
    assert concurrence(rank1_state(np.pi / 6)) == pytest.approx(np.sin(np.pi / 3), abs=1e-7)


def test_concurrence_matches_werner_formula():
    for lam in (0.3, 1 / 3 + 1e-3, 0.5, 1.0):
        assert concurrence(werner_state(lam)) == pytest.approx(max(0.0, (3 * lam - 1) / 2), abs=1e-7)


def test_ket_normalizes():
    assert np.linalg.norm(ket([1, 1j, 0, 2])) == pytest.approx(1.0, abs=1e-12)


def test_as_density_matrix_repairs_small_drift_and_rejects_large():
    rho = werner_state(0.5) + 1e-10
    assert np.trace(as_density_matrix(rho)).real == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(InvalidState):
        as_density_matrix(np.diag([1.2, -0.2, 0, 0]))
    with pytest.raises(InvalidState):
        as_density_matrix(np.eye(3) / 3)


def test_entropy_of_maximally_mixed():
    assert von_neumann_entropy(MAXIMALLY_MIXED) == pytest.approx(np.log(4))
    assert von_neumann_entropy(projector(KET_11)) == pytest.approx(0.0, abs=1e-12)


@given(density_matrices())
def test_min_pt_eigenvalue_matches_lapack(rho):
    assert min_pt_eigenvalue(rho) == pytest.approx(np.linalg.eigvalsh(partial_transpose(rho))[0], abs=1e-12)

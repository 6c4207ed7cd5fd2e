"""Small dense linear algebra for one- and two-qubit operators.

Matrices are plain ``numpy`` complex arrays. Two-qubit operators use the
ordering ``|00>, |01>, |10>, |11>`` with qubit 1 as the leftmost tensor
factor.
"""

from __future__ import annotations

from typing import NamedTuple

import numba
import numpy as np

from .exceptions import InvalidDistribution, InvalidState, NotHermitian

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI_Y = 1j * PAULI_X @ PAULI_Z
PAULIS = {"I": I2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}

KET_00 = np.array([1, 0, 0, 0], dtype=complex)
KET_01 = np.array([0, 1, 0, 0], dtype=complex)
KET_10 = np.array([0, 0, 1, 0], dtype=complex)
KET_11 = np.array([0, 0, 0, 1], dtype=complex)
PHI_PLUS = (KET_00 + KET_11) / np.sqrt(2)
PHI_MINUS = (KET_00 - KET_11) / np.sqrt(2)
PSI_PLUS = (KET_01 + KET_10) / np.sqrt(2)
PSI_MINUS = (KET_01 - KET_10) / np.sqrt(2)

MAXIMALLY_MIXED = np.eye(4, dtype=complex) / 4


class Spectrum(NamedTuple):
    """Eigenvalues in descending order; eigenvectors are the matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def ket(amplitudes) -> np.ndarray:
    """Return `amplitudes` as a normalized complex vector."""
    v = np.asarray(amplitudes, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("zero vector cannot be normalized")
    return v / norm


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def is_hermitian(m, tol=1e-10) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= tol


def as_density_matrix(m, tol=1e-8) -> np.ndarray:
    """Validate and lightly repair a two-qubit density matrix.

    The input is symmetrized and its trace renormalized. A repair larger than
    `tol`, a wrong shape or an eigenvalue below ``-1e-10`` raises
    :class:`InvalidState`.
    """
    m = np.array(m, dtype=complex)
    if m.shape != (4, 4):
        raise InvalidState(f"expected a 4x4 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidState("matrix has non-finite entries")
    herm = (m + m.conj().T) / 2
    tr = np.trace(herm).real
    if np.max(np.abs(herm - m)) > tol or abs(tr - 1) > tol:
        raise InvalidState("matrix is not Hermitian with unit trace")
    rho = herm / tr
    if eig_hermitian(rho).eigenvalues[-1] < -1e-10:
        raise InvalidState("matrix has a negative eigenvalue")
    return rho


@numba.njit(cache=True)
def _jacobi(h, tol, max_sweeps):
    n = h.shape[0]
    a = h.copy()
    v = np.eye(n, dtype=np.complex128)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += a[i, j].real ** 2 + a[i, j].imag ** 2
    thresh = tol * max(1.0, np.sqrt(scale))
    sweeps = 0
    while sweeps < max_sweeps:
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j].real ** 2 + a[i, j].imag ** 2
        if np.sqrt(off) < thresh:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = abs(a[p, q])
                if r == 0.0:
                    continue
                phase = np.conj(a[p, q] / r)
                theta = 0.5 * np.arctan2(2.0 * r, a[p, p].real - a[q, q].real)
                c = np.cos(theta)
                s = np.sin(theta)
                # rotation J: column p = (c, s*phase), column q = (-s, c*phase)
                jqp = s * phase
                jqq = c * phase
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * c + akq * jqp
                    a[k, q] = -akp * s + akq * jqq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk + np.conj(jqp) * aqk
                    a[q, k] = -s * apk + np.conj(jqq) * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * c + vkq * jqp
                    v[k, q] = -vkp * s + vkq * jqq
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    order = np.argsort(-w)
    return w[order], v[:, order]


def eig_hermitian(h, tol=1e-13, max_sweeps=100) -> Spectrum:
    """Diagonalize a small Hermitian matrix by cyclic complex Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * max(1, ||h||_F)``.

    Raises
    ------
    NotHermitian
        If ``h`` deviates from its adjoint by more than 1e-10.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or not is_hermitian(h, 1e-10 * max(1.0, np.abs(h).max(initial=0.0))):
        raise NotHermitian("matrix is not Hermitian")
    w, v = _jacobi(np.ascontiguousarray(h), tol, max_sweeps)
    return Spectrum(w, v)


def _eig_trusted(h):
    # no symmetry check, for hot loops on matrices Hermitian by construction
    return _jacobi(np.ascontiguousarray(h, dtype=np.complex128), 1e-13, 100)


def partial_transpose(rho) -> np.ndarray:
    """Transpose the second-qubit indices of a 4x4 operator."""
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    return r.transpose(0, 3, 2, 1).reshape(4, 4)


def min_pt_eigenvalue(rho) -> float:
    return _eig_trusted(partial_transpose(rho))[0][-1]


def sqrtm_psd(m) -> np.ndarray:
    """Spectral square root, clipping eigenvalues in [-1e-10, 0) to zero."""
    w, v = _eig_trusted(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def quantum_fidelity(rho, sigma) -> float:
    """Root fidelity ``tr |sqrt(rho) sqrt(sigma)|``, clipped to [0, 1].

    Computed as the sum of singular values of ``sqrt(rho) sqrt(sigma)``,
    which is symmetric in the arguments by construction.
    """
    m = sqrtm_psd(rho) @ sqrtm_psd(sigma)
    return float(min(1.0, np.linalg.svd(m, compute_uv=False).sum()))


def classical_fidelity(p, q, tol=1e-9) -> float:
    """Bhattacharyya overlap ``sum_j sqrt(p_j q_j)`` of two distributions."""
    p = _check_distribution(p, tol)
    q = _check_distribution(q, tol)
    if p.shape != q.shape:
        raise InvalidDistribution("distributions have different lengths")
    return float(min(1.0, np.sum(np.sqrt(p * q))))


def _check_distribution(p, tol):
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1) > tol:
        raise InvalidDistribution(f"not a probability distribution: {p}")
    return p


_YY = np.kron(PAULI_Y, PAULI_Y)


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit state."""
    rho = np.asarray(rho, dtype=complex)
    sr = sqrtm_psd(rho)
    tilde = _YY @ rho.conj() @ _YY
    # eigenvalues of sqrt(rho) rho~ sqrt(rho) equal those of rho rho~ and are real
    m = sr @ tilde @ sr
    w = _eig_trusted((m + m.conj().T) / 2)[0]
    lam = np.sqrt(np.clip(w, 0.0, None))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def von_neumann_entropy(rho) -> float:
    w = _eig_trusted(rho)[0]
    w = w[w > 1e-300]
    return float(-np.sum(w * np.log(w)))

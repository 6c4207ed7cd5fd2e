"""Witness operators, the six witness families and the family criterion."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import BadIndex, InvalidDistribution, ProductKet
from .qcore import (
    I2,
    KET_00,
    KET_11,
    PAULI_X,
    PSI_MINUS,
    PSI_PLUS,
    _eig_trusted,
    partial_transpose,
)

#: Clifford operator permuting X -> Y -> Z -> X.
CLIFFORD_C = np.array([[1, -1j], [1, 1j]], dtype=complex) / np.sqrt(2)
CLIFFORD_C_DAG = CLIFFORD_C.conj().T

#: Witness basis in outcome order (f1, f2, f3, f4).
WITNESS_BASIS = np.array([KET_00, KET_11, PSI_PLUS, PSI_MINUS])

# (U1, U2) per family; X C means the product X @ C
FAMILY_UNITARIES = {
    1: (I2, I2),
    2: (I2, PAULI_X),
    3: (CLIFFORD_C_DAG, CLIFFORD_C),
    4: (CLIFFORD_C_DAG, PAULI_X @ CLIFFORD_C),
    5: (CLIFFORD_C, CLIFFORD_C_DAG),
    6: (CLIFFORD_C, PAULI_X @ CLIFFORD_C_DAG),
}
FAMILY_LABELS = tuple(FAMILY_UNITARIES)


def witness_basis() -> list[np.ndarray]:
    """The common eigenkets ``|00>, |11>, |Psi+>, |Psi->`` in outcome order."""
    return [k.copy() for k in WITNESS_BASIS]


def witness_operator(alpha) -> np.ndarray:
    """``W(alpha)`` in its spectral form."""
    c, s = np.cos(alpha), np.sin(alpha)
    eigvals = np.array([(1 + c) / 2, (1 - c) / 2, s / 2, -s / 2])
    return (WITNESS_BASIS.T * eigvals) @ WITNESS_BASIS.conj()


@dataclass(frozen=True, eq=False)
class WitnessFamily:
    """A projective four-outcome measurement ``(U1 x U2)^dag Pi_j (U1 x U2)``.

    ``label`` is the integer 1-6 for the fixed families or ``"custom"``.
    """

    u1: np.ndarray
    u2: np.ndarray
    label: int | str = "custom"
    kets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        u = np.kron(self.u1, self.u2)
        # row j is (U1 x U2)^dag |w_j>
        object.__setattr__(self, "kets", (u.conj().T @ WITNESS_BASIS.T).T)

    @property
    def projectors(self) -> np.ndarray:
        return np.einsum("ji,jk->jik", self.kets, self.kets.conj())

    @property
    def is_custom(self) -> bool:
        return not isinstance(self.label, (int, np.integer))

    def __repr__(self):
        return f"WitnessFamily(label={self.label!r})"


_FAMILIES = {k: WitnessFamily(u1, u2, k) for k, (u1, u2) in FAMILY_UNITARIES.items()}


def family_unitary(index) -> WitnessFamily:
    """One of the six fixed families, by label 1-6."""
    try:
        return _FAMILIES[int(index)]
    except (KeyError, ValueError, TypeError):
        raise BadIndex(f"family index must be 1..6, got {index!r}") from None


class CriterionResult(NamedTuple):
    s_value: float
    conclusive: bool


def s_value(f) -> float:
    """``4 f1 f2 - (f3 - f4)^2`` without input validation."""
    return 4 * f[0] * f[1] - (f[2] - f[3]) ** 2


def criterion_s(f, tol=1e-9) -> CriterionResult:
    """Evaluate the witness-family criterion on four outcome probabilities.

    A negative value proves entanglement; anything else is inconclusive.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (4,) or np.any(f < 0) or abs(f.sum() - 1) > tol:
        raise InvalidDistribution(f"not a four-outcome distribution: {f}")
    s = float(s_value(f))
    return CriterionResult(s, s < 0)


def negative_pt_eigenket(rho, tol=1e-10):
    """The negative eigenvalue of ``rho^T2`` and its eigenket, or ``None``."""
    w, v = _eig_trusted(partial_transpose(rho))
    if w[-1] < -tol:
        return float(w[-1]), v[:, -1]
    return None


def _phase_fix(v):
    k = np.argmax(np.abs(v))
    return v * (abs(v[k]) / v[k])


def schmidt_decomposition(phi):
    """Schmidt coefficients and local bases of a two-qubit ket.

    SVD of the amplitude matrix ``M`` (``phi = vec(M)``). Returns ``(s, u, v)``
    with ``phi = sum_k s_k u_k x v_k``, ``u[k]``, ``v[k]`` rows and ``s``
    descending. Taking square roots of the eigenvalues of ``M M^dag`` instead
    would turn 1e-17 rounding noise into spurious 1e-9 coefficients for
    product kets.
    """
    m = np.asarray(phi, dtype=complex).reshape(2, 2)
    left, s, vh = np.linalg.svd(m)
    u = np.array([_phase_fix(left[:, k]) for k in range(2)])
    # move the phase taken out of u[k] into v[k]
    v = np.array([vh[k] * (left[:, k] @ u[k].conj()) for k in range(2)])
    return s, u, v


def family_from_ket(phi, tol=1e-10) -> WitnessFamily:
    """The custom family whose outcomes are the eigenkets of ``(|phi><phi|)^T2``.

    With Schmidt form ``phi = s0 |u0 v0> + s1 |u1 v1>`` let ``A = sum_k |k><u_k|``
    and ``B = sum_k |k><v_k|``, so that ``(A x B) phi = s0|00> + s1|11>``. The
    partial transpose conjugates the second factor, so the family unitaries
    are ``(A, conj(B))``.

    Raises
    ------
    ProductKet
        If a Schmidt coefficient is below `tol`.
    """
    s, u, v = schmidt_decomposition(phi)
    if s[1] <= tol:
        raise ProductKet("ket has Schmidt rank one")
    a = u.conj()
    b = v.conj()
    return WitnessFamily(a, b.conj(), "custom")

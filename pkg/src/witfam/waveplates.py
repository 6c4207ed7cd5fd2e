"""Jones matrices of wave plates and QWP-HWP-QWP settings for the family unitaries.

Plate angles are measured from the vertical. Matrices act on the
polarization basis ``(|V>, |H>)``, identified with ``(|0>, |1>)``.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple

import numpy as np

from .exceptions import NotUnitary
from .qcore import I2, PAULI_X
from .witness import CLIFFORD_C, CLIFFORD_C_DAG


class AngleTriple(NamedTuple):
    """Plate angles in radians; `gamma` is the first plate the light meets."""

    alpha: float
    beta: float
    gamma: float


def waveplate_unitary(kind, theta) -> np.ndarray:
    """Jones matrix of a half-wave (``"HWP"``) or quarter-wave (``"QWP"``) plate."""
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    kind = kind.upper()
    if kind == "HWP":
        return np.array([[c, s], [s, -c]], dtype=complex)
    if kind == "QWP":
        return np.array([[1 - 1j * c, -1j * s], [-1j * s, 1 + 1j * c]]) / np.sqrt(2)
    raise ValueError(f"kind must be 'HWP' or 'QWP', got {kind!r}")


def sandwich(t) -> np.ndarray:
    """``QWP(alpha) @ HWP(beta) @ QWP(gamma)``."""
    a, b, g = t
    return waveplate_unitary("QWP", a) @ waveplate_unitary("HWP", b) @ waveplate_unitary("QWP", g)


def _check_unitary(u, tol=1e-9):
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or np.abs(u.conj().T @ u - I2).max() > tol:
        raise NotUnitary("expected a 2x2 unitary")
    return u


def phase_distance(u, v) -> float:
    """``min_phi ||u - exp(i phi) v||_F``."""
    ov = np.trace(v.conj().T @ u)
    phase = np.exp(1j * np.angle(ov)) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(u - phase * v))


def equal_up_to_phase(u, v, tol=1e-9) -> bool:
    """True iff two unitaries differ only by a global phase, within `tol`."""
    return phase_distance(_check_unitary(u), _check_unitary(v)) < tol


TABLE_UNITARIES = {
    "1": I2,
    "X": PAULI_X,
    "C": CLIFFORD_C,
    "C†": CLIFFORD_C_DAG,
    "XC": PAULI_X @ CLIFFORD_C,
    "XC†": PAULI_X @ CLIFFORD_C_DAG,
}

TABLE_TRIPLES = {
    "1": AngleTriple(0.0, 0.0, 0.0),
    "X": AngleTriple(0.0, np.pi / 4, 0.0),
    "C": AngleTriple(0.0, np.pi / 4, -np.pi / 4),
    "C†": AngleTriple(-np.pi / 4, 0.0, 0.0),
    "XC": AngleTriple(0.0, 0.0, -np.pi / 4),
    "XC†": AngleTriple(np.pi / 4, 0.0, 0.0),
}

_GRID = [t for t in itertools.product((-np.pi / 4, 0.0, np.pi / 4), repeat=3) if any(t)]
_SNAP = np.pi / 8


def _wrap(x, period):
    """Reduce into ``(-period/2, period/2]``."""
    return period / 2 - np.mod(period / 2 - x, period)


def _canonical(t):
    # QWP has period pi; HWP(b + pi/2) = -HWP(b), so beta needs only pi/2
    a, b, g = _wrap(t[0], np.pi), _wrap(t[1], np.pi / 2), _wrap(t[2], np.pi)
    return AngleTriple(float(a), float(b), float(g))


def _plates(theta):
    """Batched QWP, HWP matrices and their angle derivatives, shape (m, 2, 2)."""
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    q = np.empty(theta.shape + (2, 2), dtype=complex)
    q[..., 0, 0], q[..., 0, 1], q[..., 1, 0], q[..., 1, 1] = 1 - 1j * c, -1j * s, -1j * s, 1 + 1j * c
    dq = np.empty_like(q)
    dq[..., 0, 0], dq[..., 0, 1], dq[..., 1, 0], dq[..., 1, 1] = 2j * s, -2j * c, -2j * c, -2j * s
    h = np.empty_like(q)
    h[..., 0, 0], h[..., 0, 1], h[..., 1, 0], h[..., 1, 1] = c, s, s, -c
    dh = np.empty_like(q)
    dh[..., 0, 0], dh[..., 0, 1], dh[..., 1, 0], dh[..., 1, 1] = -2 * s, 2 * c, 2 * c, 2 * s
    r2 = np.sqrt(2)
    return q / r2, dq / r2, h, dh


def _mul(a, b, c):
    return np.einsum("mij,mjk,mkl->mil", a, b, c)


def _gauss_newton(u, starts, iters=60):
    """Solve ``exp(i phi) sandwich(a, b, g) = u`` from many starts at once."""
    x = np.column_stack([np.array(starts, dtype=float), np.zeros(len(starts))])
    for it in range(iters):
        qa, dqa, _, _ = _plates(x[:, 0])
        _, _, hb, dhb = _plates(x[:, 1])
        qg, dqg, _, _ = _plates(x[:, 2])
        v = _mul(qa, hb, qg)
        if it == 0:
            # start from the best global phase
            x[:, 3] = np.angle(np.einsum("mji,ji->m", v.conj(), u))
        ph = np.exp(1j * x[:, 3])[:, None, None]
        res = (ph * v - u).reshape(len(x), 4)
        jac = np.stack(
            [
                (ph * _mul(dqa, hb, qg)).reshape(len(x), 4),
                (ph * _mul(qa, dhb, qg)).reshape(len(x), 4),
                (ph * _mul(qa, hb, dqg)).reshape(len(x), 4),
                (1j * ph * v).reshape(len(x), 4),
            ],
            axis=2,
        )
        rr = np.concatenate([res.real, res.imag], axis=1)
        jj = np.concatenate([jac.real, jac.imag], axis=1)
        jtj = np.einsum("mki,mkj->mij", jj, jj) + 1e-12 * np.eye(4)
        step = np.linalg.solve(jtj, np.einsum("mki,mk->mi", jj, rr)[..., None])[..., 0]
        x = x - step
        if np.abs(step).max() < 1e-15:
            break
    return x[:, :3]


def solve_angles(u, tol=1e-9) -> AngleTriple:
    """Wave-plate angles realizing `u` up to global phase.

    Gauss-Newton solves start from the tabulated settings and a
    3x3x3 grid. Among the exact solutions, angles within 1e-9 of a multiple
    of pi/8 are snapped to it when that keeps the solution exact; then the
    triple with the most zero angles wins, ties broken lexicographically.
    QWP angles lie in ``(-pi/2, pi/2]`` and the HWP angle in ``(-pi/4, pi/4]``.
    """
    u = _check_unitary(u)
    found = []
    for sol in _gauss_newton(u, list(TABLE_TRIPLES.values()) + _GRID):
        t = _canonical(sol)
        if phase_distance(u, sandwich(t)) >= tol:
            continue
        arr = np.array(t)
        grid = np.round(arr / _SNAP) * _SNAP
        snapped = _canonical(np.where(np.abs(arr - grid) < 1e-9, grid, arr))
        if phase_distance(u, sandwich(snapped)) < tol:
            t = snapped
        found.append(t)
    if not found:
        raise RuntimeError("no wave-plate setting found")  # not expected for unitary input

    def key(t):
        zeros = sum(abs(x) < 1e-12 for x in t)
        return (-zeros, *np.round(t, 9))

    return min(found, key=key)


def table_rows():
    """``(name, unitary, triple, compiled)`` for the six tabulated unitaries."""
    rows = []
    for name, u in TABLE_UNITARIES.items():
        rows.append((name, u, TABLE_TRIPLES[name], solve_angles(u)))
    return rows


def format_table(rows=None) -> str:
    """Text table with columns U, alpha, beta, gamma in radians and degrees."""
    rows = table_rows() if rows is None else rows
    head = f"{'U':<5}{'alpha':>10}{'beta':>10}{'gamma':>10}   {'alpha':>7}{'beta':>7}{'gamma':>7}"
    out = [head, f"{'':<5}{'(rad)':>10}{'(rad)':>10}{'(rad)':>10}   {'(deg)':>7}{'(deg)':>7}{'(deg)':>7}"]
    for name, _, _, t in rows:
        deg = np.degrees(t)
        out.append(f"{name:<5}" + "".join(f"{x:>10.4f}" for x in t) + "   " + "".join(f"{x:>7.1f}" for x in deg))
    return "\n".join(out) + "\n"

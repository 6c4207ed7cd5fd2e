"""Witness values from local Pauli measurements, and nonlinear witness bounds.

When the photons of a pair are measured separately, a witness expectation
must be assembled from local settings. Measuring the common eigenbasis of
``A_1`` and ``B_2`` yields ``<A_1>``, ``<B_2>`` and ``<A_1 B_2>`` at once.
Axis pairs are written ``"XY"`` (X on qubit 1, Y on qubit 2); table keys are
``X1``, ``Y2``, ``X1Y2`` and so on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import MissingEntry
from .measurement import sample_counts
from .qcore import I2, PAULIS

AXES = "XYZ"
ALL_SETTINGS = tuple(a + b for a in AXES for b in AXES)

_EIGS = {}
for _a in AXES:
    _w, _v = np.linalg.eigh(PAULIS[_a])
    _EIGS[_a] = (_w[::-1], _v[:, ::-1])  # eigenvalues +1, -1


@dataclass
class PauliTable:
    """Single-qubit and correlator expectation values.

    Attributes
    ----------
    singles : dict
        Keys ``X1 Y1 Z1 X2 Y2 Z2``; only the measured ones are present.
    correlators : dict
        Keys are axis pairs such as ``"ZZ"``.
    provenance : str
        ``"exact"`` or ``"sampled"``.
    """

    singles: dict = field(default_factory=dict)
    correlators: dict = field(default_factory=dict)
    provenance: str = "exact"

    def __post_init__(self):
        for key, val in {**self.singles, **self.correlators}.items():
            if not -1 - 1e-12 <= val <= 1 + 1e-12:
                raise ValueError(f"{key}={val} outside [-1, 1]")

    def single(self, key) -> float:
        try:
            return self.singles[key]
        except KeyError:
            raise MissingEntry(key) from None

    def corr(self, pair) -> float:
        try:
            return self.correlators[pair]
        except KeyError:
            raise MissingEntry(f"{pair[0]}1{pair[1]}2") from None

    def to_text(self) -> str:
        lines = [f"provenance={self.provenance}"]
        lines += [f"{k}={v!r}" for k, v in sorted(self.singles.items())]
        lines += [f"{p[0]}1{p[1]}2={v!r}" for p, v in sorted(self.correlators.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text) -> "PauliTable":
        singles, corr, prov = {}, {}, "exact"
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = (s.strip() for s in line.partition("="))
            if key == "provenance":
                prov = val
            elif len(key) == 2:
                singles[key] = float(val)
            elif len(key) == 4:
                corr[key[0] + key[2]] = float(val)
            else:
                raise ValueError(f"bad key {key!r}")
        return cls(singles, corr, prov)


def _setting_probs(rho, pair):
    (wa, va), (wb, vb) = _EIGS[pair[0]], _EIGS[pair[1]]
    kets = np.kron(va, vb)  # columns: (+,+), (+,-), (-,+), (-,-)
    p = np.einsum("ij,ik,kj->j", kets.conj(), rho, kets).real
    return np.clip(p, 0.0, None) / p.sum()


def _from_frequencies(f):
    """Marginals and correlator from outcome frequencies ordered ++ +- -+ --."""
    a = f[0] + f[1] - f[2] - f[3]
    b = f[0] - f[1] + f[2] - f[3]
    ab = f[0] - f[1] - f[2] + f[3]
    return a, b, ab


def _table(freqs, provenance):
    singles, corr = {}, {}
    acc = {}
    for pair, f in freqs.items():
        a, b, ab = _from_frequencies(f)
        acc.setdefault(pair[0] + "1", []).append(a)
        acc.setdefault(pair[1] + "2", []).append(b)
        corr[pair] = float(ab)
    for key, vals in acc.items():
        # a single is seen by every setting sharing its axis; pool them
        singles[key] = float(np.mean(vals))
    return PauliTable(singles, corr, provenance)


def _check_settings(settings):
    settings = [s.upper() for s in settings]
    bad = [s for s in settings if s not in ALL_SETTINGS]
    if bad:
        raise ValueError(f"unknown settings {bad}")
    return settings


def pauli_expectations(rho, settings=ALL_SETTINGS) -> PauliTable:
    """Exact expectation values seen by the given local settings."""
    settings = _check_settings(settings)
    return _table({s: _setting_probs(rho, s) for s in settings}, "exact")


def sample_pauli_expectations(rho, settings, n, rng) -> PauliTable:
    """Expectation values estimated from `n` pairs per local setting."""
    settings = _check_settings(settings)
    freqs = {s: sample_counts(_setting_probs(rho, s), n, rng) / n for s in settings}
    return _table(freqs, "sampled")


def witness_from_paulis(t: PauliTable, alpha) -> float:
    """``<W(alpha)>`` from Z singles and the XX, YY, ZZ correlators."""
    z = t.single("Z1") + t.single("Z2")
    return 0.25 * (1 + z * np.cos(alpha) + t.corr("ZZ") + (t.corr("XX") + t.corr("YY")) * np.sin(alpha))


def barbieri_inequality(t: PauliTable, axis="Z", tol=1e-12):
    """Separability inequality built on one axis of the local table.

    For axis Z it reads::

        1 + <ZZ>^2 >= 2 |<XX><YY> - <ZZ> + <Z1><Z2>|
                      + <XX>^2 + <YY>^2 + <Z1>^2 + <Z2>^2

    and axes X, Y follow by cyclic relabelling. A violation certifies
    entanglement.

    Returns
    -------
    lhs, rhs : float
    holds : bool
    """
    axis = axis.upper()
    if axis not in AXES:
        raise ValueError(f"axis must be one of X, Y, Z, got {axis!r}")
    k = AXES.index(axis)
    a, b = AXES[(k + 1) % 3], AXES[(k + 2) % 3]
    cc = t.corr(axis * 2)
    ca, cb = t.corr(a * 2), t.corr(b * 2)
    s1, s2 = t.single(axis + "1"), t.single(axis + "2")
    lhs = 1 + cc**2
    rhs = 2 * abs(ca * cb - cc + s1 * s2) + ca**2 + cb**2 + s1**2 + s2**2
    return lhs, rhs, bool(lhs >= rhs - tol)


def _pp(a, b):
    return np.kron(PAULIS[a] if a != "I" else I2, PAULIS[b] if b != "I" else I2)


def g_operator(alpha, which="G1") -> np.ndarray:
    """Non-Hermitian operator entering the bound ``<W> >= |<G>|^2``."""
    s = np.sin(alpha / 2 + np.pi / 4) / np.sqrt(8)
    c = np.cos(alpha / 2 + np.pi / 4) / np.sqrt(8)
    if which == "G1":
        first = _pp("I", "I") + _pp("X", "X") + _pp("Y", "Y") + _pp("Z", "Z")
        second = _pp("Z", "I") + _pp("I", "Z") + 1j * _pp("X", "Y") - 1j * _pp("Y", "X")
    elif which == "G2":
        first = _pp("X", "I") + _pp("I", "X") + 1j * _pp("Y", "Z") - 1j * _pp("Z", "Y")
        second = _pp("X", "Z") + _pp("Z", "X") + 1j * _pp("Y", "I") - 1j * _pp("I", "Y")
    else:
        raise ValueError(f"which must be 'G1' or 'G2', got {which!r}")
    return s * first + c * second


def witness_expectation(rho, alpha) -> float:
    """``tr(rho W(alpha))`` via the Pauli form of the witness."""
    w = 0.25 * (
        _pp("I", "I")
        + (_pp("Z", "I") + _pp("I", "Z")) * np.cos(alpha)
        + _pp("Z", "Z")
        + (_pp("X", "X") + _pp("Y", "Y")) * np.sin(alpha)
    )
    return float(np.trace(rho @ w).real)


def nonlinear_bound(rho, alpha, which="G1", tol=1e-12):
    """Test ``<W(alpha)> >= |<G(alpha)>|^2``; a violation certifies entanglement.

    Returns
    -------
    lhs, rhs : float
    holds : bool
    """
    lhs = witness_expectation(rho, alpha)
    rhs = float(abs(np.trace(rho @ g_operator(alpha, which))) ** 2)
    return lhs, rhs, bool(lhs >= rhs - tol)


def nonlinear_margin_scan(rho, which="G1", alphas=None):
    """``lhs - rhs`` of :func:`nonlinear_bound` over a grid of angles.

    Negative entries flag angles at which the bound detects entanglement.
    """
    if alphas is None:
        alphas = np.linspace(0, 2 * np.pi, 73)
    alphas = np.asarray(alphas, dtype=float)
    margins = np.array([np.subtract(*nonlinear_bound(rho, a, which)[:2]) for a in alphas])
    return alphas, margins


def infer_p(w_half_pi) -> float:
    """Singlet weight ``p`` of a Werner-type state from ``<W(pi/2)> = (1 - 3p) / 4``."""
    return (1 - 4 * w_half_pi) / 3

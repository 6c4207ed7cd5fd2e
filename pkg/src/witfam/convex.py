"""Interior-point likelihood maximization over states or PPT states.

States are parametrized as ``rho(x) = 1/4 + sum_k x_k B_k`` with the fifteen
traceless Pauli products ``B_k = sigma_a x sigma_b / 4``. Outcome
probabilities are affine in ``x`` and the partial transpose only flips the
sign of the terms with ``sigma_y`` on qubit 2, so both positivity constraints
are handled by ``log det`` barriers on fixed affine maps. Newton centering
follows the central path ``max L(x) + mu * barrier(x)`` down to small ``mu``;
at a centered point the optimum lies within ``mu * nu`` of ``L(x)`` (``nu``
is 4 per positivity constraint).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measurement import Dataset
from .qcore import PAULIS, _eig_trusted

_LABELS = [(a, b) for a in "IXYZ" for b in "IXYZ"][1:]
BASIS = np.array([np.kron(PAULIS[a], PAULIS[b]) / 4 for a, b in _LABELS])
PT_SIGN = np.array([-1.0 if b == "Y" else 1.0 for _, b in _LABELS])
BASIS_PT = BASIS * PT_SIGN[:, None, None]
EYE4 = np.eye(4, dtype=complex) / 4


def state_from_params(x) -> np.ndarray:
    return EYE4 + np.tensordot(x, BASIS, axes=1)


def params_from_state(rho) -> np.ndarray:
    # tr(B_k B_l) = delta_kl / 4
    return 4 * np.einsum("kij,ji->k", BASIS, rho).real


@dataclass
class BarrierResult:
    estimate: np.ndarray
    log_likelihood: float
    upper_bound: float
    newton_steps: int
    converged: bool


def _logdet_terms(basis, rho, derivs=True):
    w, v = _eig_trusted(rho)
    if w[-1] <= 0:
        return None
    if not derivs:
        return np.sum(np.log(w)), None, None
    bt = np.einsum("ia,kij,jb->kab", v.conj(), basis, v)
    inv = 1.0 / w
    grad = np.einsum("kaa,a->k", bt, inv).real
    m = bt * np.sqrt(inv)[None, :, None] * np.sqrt(inv)[None, None, :]
    hess = -np.einsum("kab,lba->kl", m, m).real
    return np.sum(np.log(w)), grad, hess


def barrier_ml(
    d: Dataset,
    ppt=True,
    tol=1e-8,
    stop_above=np.inf,
    stop_below=-np.inf,
    shrink=10.0,
    max_newton=500,
) -> BarrierResult:
    """Maximize ``sum n_j log p_j`` over states (``ppt=False``) or PPT states.

    Stops once ``mu * nu`` drops below `tol`, or earlier when the attained
    value exceeds `stop_above` or the upper bound drops below `stop_below`.
    """
    nz = d.counts > 0
    e = d.kets[nz]
    n = d.counts[nz].astype(float)
    big_n = max(1.0, n.sum())
    a = np.einsum("ji,kil,jl->jk", e.conj(), BASIS, e).real
    c = np.full(len(n), 0.25)
    cones = [BASIS] + ([BASIS_PT] if ppt else [])
    nu = 4.0 * len(cones)

    def evaluate(x, mu, derivs=True):
        p = c + a @ x
        if np.any(p <= 0):
            return None
        val = n @ np.log(p)
        bar, grad, hess = 0.0, None, None
        if derivs:
            g = n / p
            grad = a.T @ g
            hess = -(a.T * (g / p)) @ a
        for basis in cones:
            rho = EYE4 + np.tensordot(x, basis, axes=1)
            terms = _logdet_terms(basis, rho, derivs)
            if terms is None:
                return None
            ld, gr, he = terms
            bar += ld
            if derivs:
                grad = grad + mu * gr
                hess = hess + mu * he
        return val, val + mu * bar, grad, hess

    x = np.zeros(15)
    mu = big_n / 10
    steps = 0
    converged = False
    upper = np.inf
    val = n @ np.log(c)
    while steps < max_newton:
        # centering
        while steps < max_newton:
            val, obj, grad, hess = evaluate(x, mu)
            try:
                dx = np.linalg.solve(-hess, grad)
            except np.linalg.LinAlgError:
                dx = np.linalg.lstsq(-hess, grad, rcond=None)[0]
            dec = grad @ dx
            steps += 1
            if dec < 1e-9:
                break
            t = 1.0
            while t > 1e-12:
                trial = evaluate(x + t * dx, mu, derivs=False)
                if trial is not None and trial[1] >= obj + 0.25 * t * dec:
                    break
                t /= 2
            if t <= 1e-12:
                break
            x = x + t * dx
            if dec < 1e-3:
                # close to center: one more full step typically suffices
                continue
        val = evaluate(x, mu, derivs=False)[0]
        upper = val + 1.5 * mu * nu
        if mu * nu < tol or val > stop_above or upper < stop_below:
            converged = mu * nu < tol
            break
        mu /= shrink
    rho = state_from_params(x)
    return BarrierResult((rho + rho.conj().T) / 2, float(val), float(upper), steps, converged)

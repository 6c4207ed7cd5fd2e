"""Maximum likelihood over separable two-qubit states.

For two qubits a state is separable exactly when its partial transpose is
positive, so the separable maximum is a convex problem. :func:`ml_separable`
solves it with the interior-point routine of :mod:`witfam.convex` and
converts the optimum into explicit product terms with
:func:`separable_decomposition`.

:func:`frank_wolfe_separable` is an independent route working directly on
mixtures of product kets: a fully corrective Frank-Wolfe ascent whose linear
oracle maximizes ``<ab|R|ab>``. Concavity turns the oracle value into an
upper bound ``L + max <ab|R|ab> - N``, so every run carries a certified
bracket. It is slower and mainly serves as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import sqrtm

from .convex import barrier_ml
from .measurement import Dataset
from .qcore import PAULI_Y, _eig_trusted
from .witness import schmidt_decomposition

MAX_TERMS = 20
PROB_FLOOR = 1e-300


@dataclass
class SeparableAnsatz:
    """``sum_i w_i |a_i><a_i| x |b_i><b_i|``; rows of `a`, `b` are unit kets."""

    weights: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def k(self) -> int:
        return len(self.weights)

    @property
    def product_kets(self) -> np.ndarray:
        return (self.a[:, :, None] * self.b[:, None, :]).reshape(-1, 4)

    def state(self) -> np.ndarray:
        psi = self.product_kets
        rho = (psi.T * self.weights) @ psi.conj()
        return rho / np.trace(rho).real


@dataclass
class SeparableResult:
    ansatz: SeparableAnsatz
    log_likelihood: float
    upper_bound: float
    iterations: int
    converged: bool

    def __iter__(self):
        # unpacks as (ansatz, log_likelihood)
        return iter((self.ansatz, self.log_likelihood))


def _fibonacci_kets(m):
    i = np.arange(m) + 0.5
    theta = np.arccos(1 - 2 * i / m)
    phi = np.pi * (1 + 5**0.5) * i
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=1)


_GRID = _fibonacci_kets(200)


def _top_eig2(m):
    """Largest eigenvalue and eigenvector of 2x2 Hermitian matrices, batched."""
    t = (m[..., 0, 0].real + m[..., 1, 1].real) / 2
    dd = (m[..., 0, 0].real - m[..., 1, 1].real) / 2
    off = m[..., 0, 1]
    rad = np.sqrt(dd**2 + np.abs(off) ** 2)
    lam = t + rad
    # eigenvector (off, lam - m00) or (lam - m11, conj(off)), whichever is larger
    v1 = np.stack([off, lam - m[..., 0, 0].real + 0j], axis=-1)
    v2 = np.stack([lam - m[..., 1, 1].real + 0j, np.conj(off)], axis=-1)
    n1 = np.linalg.norm(v1, axis=-1)
    n2 = np.linalg.norm(v2, axis=-1)
    use1 = (n1 >= n2)[..., None]
    v = np.where(use1, v1, v2)
    nv = np.where(use1[..., 0], n1, n2)
    deg = nv < 1e-300
    v = np.where(deg[..., None], np.array([1.0 + 0j, 0j]), v / np.where(deg, 1.0, nv)[..., None])
    return lam, v


def product_oracle(r, refine=3, sweeps=50):
    """Maximize ``<ab| r |ab>`` over product kets.

    Scans a fixed grid over the first qubit's Bloch sphere (the second qubit
    is optimal in closed form), then polishes the best candidates by
    alternating top-eigenvector updates. Returns ``(value, a, b)``.
    """
    r4 = r.reshape(2, 2, 2, 2)
    ra = np.einsum("mi,ikjl,mj->mkl", _GRID.conj(), r4, _GRID)
    lam, _ = _top_eig2(ra)
    best = (-np.inf, None, None)
    for m in np.argsort(-lam)[:refine]:
        a = _GRID[m]
        val = -np.inf
        for _ in range(sweeps):
            _, b = _top_eig2(np.einsum("i,ikjl,j->kl", a.conj(), r4, a))
            lam_a, a = _top_eig2(np.einsum("k,ikjl,l->ij", b.conj(), r4, b))
            if lam_a - val <= 1e-13 * max(1.0, abs(lam_a)):
                val = lam_a
                break
            val = lam_a
        if val > best[0]:
            best = (float(val), a, b)
    return best


class _Problem:
    """Observed outcomes only; zero-count outcomes do not enter the likelihood."""

    def __init__(self, d: Dataset):
        nz = d.counts > 0
        self.e = d.kets[nz]
        self.n = d.counts[nz].astype(float)
        self.big_n = self.n.sum()

    def outcome_probs(self, a, b):
        psi = (a[:, :, None] * b[:, None, :]).reshape(-1, 4)
        return np.abs(psi @ self.e.conj().T) ** 2

    def loglik(self, p):
        return float(self.n @ np.log(np.maximum(p, PROB_FLOOR)))

    def r_operator(self, p):
        g = self.n / np.maximum(p, PROB_FLOOR)
        return (self.e.T * g) @ self.e.conj()


def _line_search(n, p, q, iters=60):
    """Maximize the concave ``sum n log((1-t) p + t q)`` over ``t in [0, 1]``."""
    diff = q - p

    def deriv(t):
        return n @ (diff / np.maximum(p + t * diff, PROB_FLOOR))

    if deriv(0.0) <= 0:
        return 0.0
    if deriv(1.0) >= 0:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = (lo + hi) / 2
        if deriv(mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo


def _refine_kets(prob, w, a, b, q, p, ll):
    """One uphill step per atom towards its locally optimal product ket."""
    r4 = prob.r_operator(p).reshape(2, 2, 2, 2)
    rb = np.einsum("mk,ikjl,ml->mij", b.conj(), r4, b)
    _, a_new = _top_eig2(rb)
    ra = np.einsum("mi,ikjl,mj->mkl", a_new.conj(), r4, a_new)
    _, b_new = _top_eig2(ra)
    step = 1.0
    while step > 1e-3:
        a_t = _blend(a, a_new, step)
        b_t = _blend(b, b_new, step)
        q_t = prob.outcome_probs(a_t, b_t)
        p_t = w @ q_t
        ll_t = prob.loglik(p_t)
        if ll_t >= ll:
            return a_t, b_t, q_t, p_t, ll_t
        step /= 2
    return a, b, q, p, ll


def _blend(old, new, t):
    if t >= 1.0:
        return new
    # align global phases before mixing
    ov = np.sum(old.conj() * new, axis=1)
    ph = np.where(np.abs(ov) > 1e-300, ov / np.maximum(np.abs(ov), 1e-300), 1.0)
    mixed = (1 - t) * old + t * new * ph.conj()[:, None]
    return mixed / np.linalg.norm(mixed, axis=1, keepdims=True)


def _ascent(prob, w, a, b, max_iter, tol, stop_above, stop_below, em_steps=5):
    q = prob.outcome_probs(a, b)
    p = w @ q
    ll = prob.loglik(p)
    upper = np.inf
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        val, sa, sb = product_oracle(prob.r_operator(p))
        upper = min(upper, ll + val - prob.big_n)
        if upper - ll <= tol * max(1.0, prob.big_n) or upper < stop_below or ll > stop_above:
            converged = upper - ll <= tol * max(1.0, prob.big_n)
            break
        qs = prob.outcome_probs(sa[None], sb[None])[0]
        t = _line_search(prob.n, p, qs)
        w = np.append(w * (1 - t), t)
        a = np.vstack([a, sa])
        b = np.vstack([b, sb])
        q = np.vstack([q, qs])
        p = w @ q
        for _ in range(em_steps):
            w = w * (q @ (prob.n / np.maximum(p, PROB_FLOOR))) / prob.big_n
            w /= w.sum()
            p = w @ q
        ll = prob.loglik(p)
        a, b, q, p, ll = _refine_kets(prob, w, a, b, q, p, ll)
        keep = w > 1e-10 * w.max()
        if keep.sum() > MAX_TERMS:
            keep &= w >= np.sort(w)[-MAX_TERMS]
        if not keep.all():
            w, a, b, q = w[keep] / w[keep].sum(), a[keep], b[keep], q[keep]
            p = w @ q
            ll = prob.loglik(p)
    return SeparableResult(SeparableAnsatz(w, a, b), ll, upper, it, converged)


def _schmidt_start(rho):
    """Product atoms from the Schmidt decompositions of `rho`'s eigenvectors."""
    lam, vecs = _eig_trusted(rho)
    ws, aa, bb = [], [], []
    for k in range(4):
        if lam[k] <= 1e-12:
            continue
        s, u, v = schmidt_decomposition(vecs[:, k])
        for m in range(2):
            ws.append(lam[k] * s[m] ** 2)
            aa.append(u[m])
            bb.append(v[m])
    basis = np.eye(2, dtype=complex)
    for i in range(2):
        for j in range(2):
            ws.append(1e-3)
            aa.append(basis[i])
            bb.append(basis[j])
    w = np.array(ws)
    return w / w.sum(), np.array(aa), np.array(bb)


def _random_start(rng, k=4):
    def kets():
        z = rng.standard_normal((k, 2)) + 1j * rng.standard_normal((k, 2))
        return z / np.linalg.norm(z, axis=1, keepdims=True)

    return np.full(k, 1 / k), kets(), kets()


def frank_wolfe_separable(
    d: Dataset,
    restarts=5,
    tol=1e-9,
    max_iter=400,
    rng=None,
    start_state=None,
    stop_above=np.inf,
    stop_below=-np.inf,
) -> SeparableResult:
    """Separable log-likelihood by Frank-Wolfe over product-ket mixtures.

    The first run starts from product atoms of `start_state` (default: the
    maximally mixed state); up to `restarts` further runs start from random
    product atoms and are only made while the certified bracket is wider
    than ``tol * N``. The result unpacks as ``(ansatz, log_likelihood)``;
    ``upper_bound`` is the tightest bound on the true separable maximum.

    `stop_above` / `stop_below` end the search early once the lower bound
    exceeds, or the upper bound falls below, the given level.
    """
    if len(d) == 0:
        raise ValueError("dataset is empty")
    prob = _Problem(d)
    if rng is None:
        rng = np.random.default_rng(0)
    if start_state is None:
        start_state = np.eye(4, dtype=complex) / 4
    best = _ascent(prob, *_schmidt_start(start_state), max_iter, tol, stop_above, stop_below)
    upper = best.upper_bound
    for _ in range(restarts):
        if best.converged or best.log_likelihood > stop_above or upper < stop_below:
            break
        res = _ascent(prob, *_random_start(rng), max_iter, tol, stop_above, stop_below)
        upper = min(upper, res.upper_bound)
        if res.log_likelihood > best.log_likelihood:
            best = res
    best.upper_bound = upper
    best.converged = upper - best.log_likelihood <= tol * max(1.0, prob.big_n)
    return best


_YY = np.kron(PAULI_Y, PAULI_Y)
_SIGNS = np.array([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]])


def _takagi(tau):
    """Unitary ``U`` and ``s >= 0`` with ``tau = U diag(s) U^T`` for symmetric tau."""
    w, s, vh = np.linalg.svd(tau)
    z = w.conj().T @ vh.T
    y = sqrtm(z.T)
    return w @ y, s


def _triangle_angle(p, q, r):
    """Angle between sides `p` and `q` of a triangle whose third side is `r`.

    Half-angle form; the arccos of the law of cosines loses half the digits
    near 0 and pi.
    """
    num = max((r - p + q) * (r + p - q), 0.0)
    den = max((p + q + r) * (p + q - r), 0.0)
    return 2 * np.arctan2(np.sqrt(num), np.sqrt(den))


def _closing_phases(sig):
    """Phases ``psi`` with ``sum sig_j exp(i psi_j) = 0`` (sig sorted descending).

    Exists when ``sig[0] <= sig[1] + sig[2] + sig[3]``; otherwise the longest
    side is clamped and the sum only nearly vanishes.
    """
    a, b, c3, c4 = sig
    psi = np.zeros(4)
    if a <= 0:
        return psi
    ell = min(max(a - b, c3 - c4), c3 + c4)
    if b > 0:
        psi[1] = np.pi - _triangle_angle(a, b, ell)
    rest = -a - b * np.exp(1j * psi[1])
    gamma = np.angle(rest) if abs(rest) > 0 else 0.0
    if c3 > 0 and ell > 0:
        psi[2] = gamma + _triangle_angle(c3, ell, c4)
    else:
        psi[2] = gamma
    tail = abs(rest) * np.exp(1j * gamma) - c3 * np.exp(1j * psi[2])
    psi[3] = np.angle(tail) if abs(tail) > 0 else psi[2] + np.pi
    return psi


def separable_decomposition(rho) -> SeparableAnsatz:
    """Write a separable two-qubit state as a mixture of at most four product kets.

    Follows Wootters' construction: rotate the subnormalized eigenvectors so
    that their overlaps ``<x_i| Y x Y |x_j*>`` become diagonal, pick phases
    that make those diagonal entries sum to zero, and combine the vectors
    with +-1 patterns into four kets of vanishing concurrence. For states
    with positive concurrence the result is the closest product mixture this
    construction gives, not an exact decomposition.
    """
    w, v = _eig_trusted(rho)
    vs = v * np.sqrt(np.clip(w, 0.0, None))
    tau = vs.conj().T @ _YY @ vs.conj()
    u, sig = _takagi((tau + tau.T) / 2)
    x = vs @ u
    order = np.argsort(-sig)
    x, sig = x[:, order], sig[order]
    psi = _closing_phases(sig)
    coeff = 0.5 * _SIGNS * np.exp(-0.5j * psi)[None, :]
    z = x @ coeff.T  # column i is z_i
    weights, aa, bb = [], [], []
    for i in range(4):
        norm2 = np.linalg.norm(z[:, i]) ** 2
        if norm2 <= 1e-15:
            continue
        s, uu, vv = schmidt_decomposition(z[:, i] / np.sqrt(norm2))
        weights.append(norm2)
        aa.append(uu[0])
        bb.append(vv[0])
    weights = np.array(weights)
    return SeparableAnsatz(weights / weights.sum(), np.array(aa), np.array(bb))


def ml_separable(
    d: Dataset,
    tol=1e-8,
    stop_above=np.inf,
    stop_below=-np.inf,
) -> SeparableResult:
    """Maximum log-likelihood over separable states.

    The maximum is attained on the PPT set by an interior-point method; the
    optimum is returned both as a log-likelihood and as an explicit product
    mixture. The result unpacks as ``(ansatz, log_likelihood)``;
    ``upper_bound`` bounds the true separable maximum from above.

    `stop_above` / `stop_below` end the search early once the attained value
    exceeds, or the upper bound falls below, the given level. The ansatz is
    then the current (not optimal) iterate.
    """
    if len(d) == 0:
        raise ValueError("dataset is empty")
    res = barrier_ml(d, ppt=True, tol=tol, stop_above=stop_above, stop_below=stop_below)
    ansatz = separable_decomposition(res.estimate)
    return SeparableResult(ansatz, res.log_likelihood, res.upper_bound, res.newton_steps, res.converged)

"""Likelihood-based estimators and separability checks on witness-family data.

All estimators work on a :class:`~witfam.measurement.Dataset`. The
log-likelihood omits the multinomial constant,
``L(rho) = sum_j n_j log p_j(rho)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .convex import barrier_ml
from .exceptions import NotConverged
from .measurement import Dataset
from .qcore import MAXIMALLY_MIXED, _eig_trusted, min_pt_eigenvalue

PROB_FLOOR = 1e-300


@dataclass
class EstimationResult:
    estimate: np.ndarray
    log_likelihood: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list, repr=False)

    def diagnostics(self) -> str:
        """``key=value`` lines for logs and the CLI."""
        return (
            f"iterations={self.iterations}\n"
            f"converged={str(self.converged).lower()}\n"
            f"log_likelihood={self.log_likelihood!r}\n"
        )


def log_likelihood(rho, d: Dataset) -> float:
    """``sum n_j log p_j``; ``-inf`` when an observed outcome has ``p_j = 0``."""
    n = d.counts
    if n.size == 0:
        return 0.0
    p = d.probabilities(np.asarray(rho, dtype=complex))
    nz = n > 0
    if np.any(p[nz] <= 0):
        return -np.inf
    return float(n[nz] @ np.log(p[nz]))


def gibbs_bound(d: Dataset) -> float:
    """``sum n_j log(n_j / n_record)``, an upper bound on every log-likelihood."""
    total = 0.0
    for r in d:
        c = r.counts[r.counts > 0]
        total += float(c @ np.log(c / r.n_total))
    return total


def _r_operator(e, n, p):
    g = np.where(n > 0, n / np.maximum(p, PROB_FLOOR), 0.0)
    return (e.T * g) @ e.conj()


def likelihood_gap_bound(rho, d: Dataset) -> float:
    """Upper bound on ``L_max - L(rho)`` from concavity: ``lambda_max(R) - N``."""
    p = d.probabilities(rho)
    r = _r_operator(d.kets, d.counts, p)
    return max(0.0, _eig_trusted(r)[0][0] - d.n_total)


def ml_estimate(
    d: Dataset,
    tol=1e-10,
    max_iter=20000,
    start=None,
    epsilon=0.2,
    record_history=False,
) -> EstimationResult:
    """Maximum-likelihood state via the diluted ``R rho R`` iteration.

    Each step maps ``rho -> (1 + eps T) rho (1 + eps T)`` normalized, with
    ``T = R / N - 1`` and ``R = sum_j (n_j / p_j) Pi_j``. The step size starts
    at `epsilon`, is halved whenever the likelihood would drop (the step is
    then retried) and grows by 1.5 after an accepted step, capped at 1.
    Iteration stops once the likelihood gain or the concavity gap bound falls
    below `tol`, relative to ``max(1, N)`` for the gap.

    A run that hits `max_iter` returns its best iterate with
    ``converged=False``.
    """
    if len(d) == 0:
        raise ValueError("dataset is empty")
    e, n = d.kets, d.counts
    big_n = n.sum()
    nz = n > 0
    rho = MAXIMALLY_MIXED.copy() if start is None else np.array(start, dtype=complex)
    eye = np.eye(4)

    def loglik(r):
        p = np.einsum("ji,ik,jk->j", e.conj(), r, e).real
        if np.any(p[nz] <= 0):
            return -np.inf, p
        return float(n[nz] @ np.log(p[nz])), p

    ll, p = loglik(rho)
    history = [ll] if record_history else []
    eps = epsilon
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        t = _r_operator(e, n, p) / big_n - eye
        gap = _eig_trusted(t)[0][0] * big_n
        if gap <= tol * max(1.0, big_n):
            converged = True
            break
        while True:
            k = eye + eps * t
            cand = k @ rho @ k.conj().T
            cand = (cand + cand.conj().T) / 2
            cand /= np.trace(cand).real
            ll_new, p_new = loglik(cand)
            if ll_new >= ll or eps < 1e-12:
                break
            eps /= 2
        if ll_new < ll:
            break
        gain = ll_new - ll
        rho, ll, p = cand, ll_new, p_new
        if record_history:
            history.append(ll)
        eps = min(1.0, eps * 1.5)
        if gain < tol:
            converged = True
            break
    return EstimationResult(rho, log_likelihood(rho, d), it, converged, history)


def _expm_hermitian_normalized(g):
    w, v = _eig_trusted(g)
    x = np.exp(w - w[0])
    return (v * x) @ v.conj().T / x.sum(), w, v, x


def mlme_estimate(
    d: Dataset, lam=1e-3, tol=1e-10, max_iter=200
) -> EstimationResult:
    """Maximum-likelihood maximum-entropy estimate on (possibly incomplete) data.

    Maximizes ``L(rho) / N + lam * S(rho)`` with ``S`` the von Neumann
    entropy. The problem is solved through its convex dual: the maximizer has
    the form ``rho = exp(sum_j phi_j Pi_j) / Z`` and ``phi`` minimizes

        D(phi) = log Z(phi) - (1 / lam) sum_j f_j log(1 + lam phi_j),

    with ``f_j = n_j / N``. Outcomes with ``n_j = 0`` sit at the bound
    ``phi_j = -1 / lam`` (their partial derivative is ``p_j > 0`` everywhere);
    the remaining coordinates are found by damped Newton steps with the exact
    (Kubo-Mori) Hessian of ``log Z``. Stationarity gives
    ``p_j(rho) = f_j / (1 + lam phi_j)``.
    """
    if len(d) == 0:
        return EstimationResult(MAXIMALLY_MIXED.copy(), 0.0, 0, True)
    e, n = d.kets, d.counts
    f = n / n.sum()
    free = f > 0
    ef, ff = e[free], f[free]
    g_fixed = (e[~free].T * (-1.0 / lam)) @ e[~free].conj()
    phi = np.zeros(ef.shape[0])

    def evaluate(phi):
        g = g_fixed + (ef.T * phi) @ ef.conj()
        rho, w, v, x = _expm_hermitian_normalized(g)
        log_z = w[0] + np.log(x.sum())
        val = log_z - ff @ np.log1p(lam * phi) / lam
        return val, rho, w, v, x

    val, rho, w, v, x = evaluate(phi)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        c = ef.conj() @ v  # c[j, a] = <e_j | v_a>
        p = (np.abs(c) ** 2) @ x / x.sum()
        denom = 1 + lam * phi
        grad = p - ff / denom
        # divided differences of exp on the spectrum, shifted by w[0]
        wd = w[:, None] - w[None, :]
        ex = x[:, None] - x[None, :]
        close = np.abs(wd) < 1e-9
        kmat = np.where(close, (x[:, None] + x[None, :]) / 2, ex / np.where(close, 1.0, wd))
        a = c.conj()[:, None, :] * c[None, :, :]  # a[i, j, a] = conj(c_ia) c_ja
        hess = np.einsum("ija,ab,ijb->ij", a, kmat, a.conj()).real / x.sum()
        hess -= np.outer(p, p)
        hess += np.diag(lam * ff / denom**2)
        try:
            step = -np.linalg.solve(hess + 1e-12 * np.eye(len(phi)), grad)
        except np.linalg.LinAlgError:
            step = -grad
        decrement = -grad @ step
        if decrement / 2 < tol:
            converged = True
            break
        t = 1.0
        while True:
            trial = phi + t * step
            if np.all(1 + lam * trial > 0):
                new = evaluate(trial)
                if new[0] <= val - 0.25 * t * decrement:
                    break
            t /= 2
            if t < 1e-14:
                break
        if t < 1e-14:
            converged = True
            break
        phi = trial
        val, rho, w, v, x = new
    rho = (rho + rho.conj().T) / 2
    return EstimationResult(rho, log_likelihood(rho, d), it, converged)


def ppt_separable(rho, tol=1e-9) -> bool:
    """Peres-Horodecki test: True iff ``rho^T2`` has no eigenvalue below ``-tol``."""
    return bool(min_pt_eigenvalue(rho) >= -tol)


class Conclusion(enum.Enum):
    ENTANGLED = "entangled"
    INCONCLUSIVE = "inconclusive"


@dataclass
class MLSetCheck:
    """Outcome of the maximum-likelihood-set separability check."""

    conclusion: Conclusion
    loglik_max: float
    loglik_sep: float
    loglik_max_upper: float
    loglik_sep_upper: float
    converged: bool = True

    @property
    def gap(self) -> float:
        return self.loglik_max - self.loglik_sep

    @property
    def entangled(self) -> bool:
        return self.conclusion is Conclusion.ENTANGLED


def ml_set_check(d: Dataset, delta=1.0, tol=1e-7) -> MLSetCheck:
    """Decide whether the maximum-likelihood set excludes all separable states.

    Reports ``ENTANGLED`` iff ``L_max - L_sep_max > delta``. Both maxima come
    from interior-point solves that bracket them between an attained value
    and a certified upper bound; the separable solve stops as soon as its
    bracket settles the comparison with `delta`. Finite data never certify
    separability, so the other outcome is ``INCONCLUSIVE``.
    """
    from .separable import ml_separable

    if len(d) == 0:
        raise ValueError("dataset is empty")
    full = barrier_ml(d, ppt=False, tol=tol)
    l_max = full.log_likelihood
    l_max_up = min(full.upper_bound, gibbs_bound(d))
    if ppt_separable(full.estimate, tol=0.0):
        # the unconstrained optimum is itself separable
        return MLSetCheck(Conclusion.INCONCLUSIVE, l_max, l_max, l_max_up, l_max_up, bool(full.converged))

    sep = ml_separable(d, tol=tol, stop_above=l_max_up - delta, stop_below=l_max - delta)
    sep_lo = sep.log_likelihood
    sep_up = min(sep.upper_bound, l_max_up)
    if l_max - sep_up > delta:
        verdict, settled = Conclusion.ENTANGLED, True
    elif l_max_up - sep_lo <= delta:
        verdict, settled = Conclusion.INCONCLUSIVE, True
    else:
        # bracket still straddles delta: decide on the attained values
        settled = sep.converged
        entangled = settled and l_max - sep_lo > delta
        verdict = Conclusion.ENTANGLED if entangled else Conclusion.INCONCLUSIVE
    return MLSetCheck(verdict, l_max, sep_lo, l_max_up, sep_up, bool(full.converged and settled))


__all__ = [
    "Conclusion",
    "EstimationResult",
    "MLSetCheck",
    "NotConverged",
    "gibbs_bound",
    "likelihood_gap_bound",
    "log_likelihood",
    "ml_estimate",
    "ml_set_check",
    "mlme_estimate",
    "ppt_separable",
]

"""Reference state classes and random entangled-state ensembles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParameter, SamplingExhausted
from .qcore import MAXIMALLY_MIXED, PHI_MINUS, PHI_PLUS, PSI_MINUS, concurrence, projector

#: Concurrence above which a sampled state counts as entangled.
ENTANGLEMENT_THRESHOLD = 1e-8

STATE_KINDS = ("rank1", "rank2", "werner", "ginibre-pure", "ginibre-full")


@dataclass(frozen=True)
class StateClass:
    """A family of true states.

    ``kind`` is one of ``rank1`` (parameter: angle theta), ``rank2`` (mixing
    weight mu), ``werner`` (singlet weight lambda), ``ginibre-pure`` or
    ``ginibre-full`` (no parameter). ``noise`` is the weight ``v`` kept by the
    ideal state when white noise is mixed in; ``v = 1`` means no noise.
    """

    kind: str
    param: float | None = None
    noise: float = 1.0

    def __post_init__(self):
        if self.kind not in STATE_KINDS:
            raise InvalidParameter(f"unknown state class {self.kind!r}")
        if not 0.0 <= self.noise <= 1.0:
            raise InvalidParameter("noise weight must lie in [0, 1]")
        p = self.param
        if self.kind in ("rank1", "rank2", "werner") and p is None:
            raise InvalidParameter(f"state class {self.kind} needs a parameter")
        if self.kind == "rank1" and not (0 < p < np.pi and not np.isclose(p, np.pi / 2)):
            raise InvalidParameter("rank1 needs 0 < theta < pi, theta != pi/2")
        if self.kind == "rank2" and not (0 <= p <= 1 and not np.isclose(p, 0.5)):
            raise InvalidParameter("rank2 needs 0 <= mu <= 1, mu != 1/2")
        if self.kind == "werner" and not (1 / 3 < p <= 1):
            raise InvalidParameter("werner needs 1/3 < lambda <= 1")

    @property
    def is_random(self) -> bool:
        return self.kind.startswith("ginibre")


def rank1_state(theta) -> np.ndarray:
    """``|t><t|`` with ``|t> = sin(theta)|00> + cos(theta)|11>``."""
    return projector([np.sin(theta), 0, 0, np.cos(theta)])


def rank2_state(mu) -> np.ndarray:
    return mu * projector(PHI_PLUS) + (1 - mu) * projector(PHI_MINUS)


def werner_state(lam) -> np.ndarray:
    """Singlet mixed with white noise. Not range checked, so usable below 1/3."""
    return lam * projector(PSI_MINUS) + (1 - lam) * MAXIMALLY_MIXED


def apply_white_noise(rho, v) -> np.ndarray:
    """Return ``v * rho + (1 - v) * 1/4``."""
    if not 0.0 <= v <= 1.0:
        raise InvalidParameter("noise weight must lie in [0, 1]")
    return v * np.asarray(rho, dtype=complex) + (1 - v) * MAXIMALLY_MIXED


def reference_state(cls: StateClass) -> np.ndarray:
    if cls.kind == "rank1":
        rho = rank1_state(cls.param)
    elif cls.kind == "rank2":
        rho = rank2_state(cls.param)
    elif cls.kind == "werner":
        rho = werner_state(cls.param)
    else:
        raise InvalidParameter(f"{cls.kind} is a random ensemble, use sample_entangled")
    return apply_white_noise(rho, cls.noise)


def sample_ginibre(rank, rng) -> np.ndarray:
    """Random state ``A^dag A / tr(A^dag A)`` from a ``rank x 4`` complex Gaussian A.

    Entries are ``(g1 + i g2) / sqrt(2)`` with independent standard normal
    ``g1, g2``; ``rank=1`` gives Haar-random pure states, ``rank=4`` the
    Hilbert-Schmidt ensemble of full-rank states.
    """
    if rank not in (1, 4):
        raise InvalidParameter("rank must be 1 or 4")
    a = (rng.standard_normal((rank, 4)) + 1j * rng.standard_normal((rank, 4))) / np.sqrt(2)
    m = a.conj().T @ a
    return m / np.trace(m).real


def sample_entangled(rank, rng, max_rejections=10**6) -> np.ndarray:
    """Rejection-sample :func:`sample_ginibre` until the concurrence is positive."""
    for _ in range(max_rejections + 1):
        rho = sample_ginibre(rank, rng)
        if concurrence(rho) > ENTANGLEMENT_THRESHOLD:
            return rho
    raise SamplingExhausted(f"no entangled state after {max_rejections} rejections")


def draw_true_state(cls: StateClass, rng) -> np.ndarray:
    """One truth state of a class; random classes are noise-mixed after sampling."""
    if cls.kind == "ginibre-pure":
        return apply_white_noise(sample_entangled(1, rng), cls.noise)
    if cls.kind == "ginibre-full":
        return apply_white_noise(sample_entangled(4, rng), cls.noise)
    return reference_state(cls)

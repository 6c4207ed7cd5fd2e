import numpy as np
import pytest

from witfam.exceptions import InvalidParameter, SamplingExhausted
from witfam.qcore import MAXIMALLY_MIXED, PHI_PLUS, PSI_MINUS, concurrence, eig_hermitian, projector
from witfam.states import (
    StateClass, apply_white_noise, draw_true_state, reference_state, sample_entangled,
    sample_ginibre, werner_state,
)


def test_reference_examples():
    assert np.allclose(reference_state(StateClass("werner", 1.0)), projector(PSI_MINUS))
    assert np.allclose(reference_state(StateClass("rank1", np.pi / 4)), projector(PHI_PLUS))
    w = eig_hermitian(reference_state(StateClass("rank2", 0.15))).eigenvalues
    assert np.allclose(w, [0.85, 0.15, 0, 0], atol=1e-12)


@pytest.mark.parametrize(
    "kind,param,noise",
    [("rank1", 0.0, 1), ("rank1", np.pi / 2, 1), ("rank2", 0.5, 1), ("rank2", 1.2, 1),
     ("werner", 1 / 3, 1), ("werner", 0.5, 1.5), ("ghz", None, 1), ("rank1", None, 1)],
)
def test_state_class_rejects_bad_parameters(kind, param, noise):
    with pytest.raises(InvalidParameter):
        StateClass(kind, param, noise)


def test_reference_states_are_valid(rng):
    for _ in range(1000):
        kind = rng.choice(["rank1", "rank2", "werner"])
        param = {"rank1": rng.uniform(0.01, 1.5), "rank2": rng.uniform(0, 0.49), "werner": rng.uniform(0.34, 1)}[kind]
        rho = reference_state(StateClass(kind, param, rng.uniform()))
        assert np.abs(rho - rho.conj().T).max() < 1e-12
        assert abs(np.trace(rho) - 1) < 1e-12
        assert eig_hermitian(rho).eigenvalues[-1] >= -1e-10


def test_white_noise():
    rho = projector(PSI_MINUS)
    assert np.allclose(apply_white_noise(rho, 1.0), rho)
    assert np.allclose(apply_white_noise(rho, 0.0), MAXIMALLY_MIXED)
    assert np.allclose(apply_white_noise(rho, 0.7), werner_state(0.7))
    with pytest.raises(InvalidParameter):
        apply_white_noise(rho, -0.1)


def test_ginibre_rank_and_purity(rng):
    pure = sample_ginibre(1, rng)
    assert np.trace(pure @ pure).real == pytest.approx(1.0, abs=1e-10)
    full = sample_ginibre(4, rng)
    assert eig_hermitian(full).eigenvalues[-1] > 0
    with pytest.raises(InvalidParameter):
        sample_ginibre(2, rng)


def test_ginibre_mean_is_maximally_mixed():
    rng = np.random.default_rng(1)
    mean = sum(sample_ginibre(4, rng) for _ in range(100_000)) / 100_000
    assert np.abs(mean - MAXIMALLY_MIXED).max() < 0.01


def test_ginibre_seed_determinism():
    a = sample_ginibre(4, np.random.default_rng(99))
    b = sample_ginibre(4, np.random.default_rng(99))
    assert np.array_equal(a, b)


def test_sample_entangled_acceptance_rates():
    rng = np.random.default_rng(3)
    pure = [concurrence(sample_ginibre(1, rng)) > 1e-8 for _ in range(2000)]
    full = [concurrence(sample_ginibre(4, rng)) > 1e-8 for _ in range(2000)]
    assert np.mean(pure) > 0.99
    rate = np.mean(full)
    print(f"full-rank Ginibre entangled fraction: {rate:.3f}")
    assert 0 < rate < 1
    for _ in range(50):
        assert concurrence(sample_entangled(4, rng)) > 1e-8


def test_sample_entangled_exhaustion(rng, monkeypatch):
    monkeypatch.setattr("witfam.states.concurrence", lambda rho: 0.0)
    with pytest.raises(SamplingExhausted):
        sample_entangled(4, rng, max_rejections=10)


def test_draw_true_state_applies_noise(rng):
    rho = draw_true_state(StateClass("werner", 1.0, noise=0.5), rng)
    assert np.allclose(rho, werner_state(0.5))
    assert concurrence(draw_true_state(StateClass("ginibre-pure"), rng)) > 0

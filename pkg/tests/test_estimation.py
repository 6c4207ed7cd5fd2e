import numpy as np
import pytest
from hypothesis import given, settings

from strategies import seeds
from witfam.estimation import (
    Conclusion, gibbs_bound, likelihood_gap_bound, log_likelihood, ml_estimate, ml_set_check,
    mlme_estimate, ppt_separable,
)
from witfam.measurement import Dataset, FamilyRecord, born_probabilities, exact_record, measure
from witfam.qcore import MAXIMALLY_MIXED, PSI_MINUS, projector, quantum_fidelity
from witfam.states import sample_ginibre, werner_state
from witfam.witness import family_unitary

FAMS = [family_unitary(k) for k in range(1, 7)]


def singlet_record(n=10**4):
    return Dataset([FamilyRecord(family_unitary(1), [0, 0, 0, n])])


def test_log_likelihood_examples():
    d = Dataset([FamilyRecord(family_unitary(1), [10, 0, 0, 0])])
    from witfam.qcore import KET_00

    assert log_likelihood(projector(KET_00), d) == 0.0
    d = Dataset([FamilyRecord(family_unitary(1), [1, 1, 1, 1])])
    assert log_likelihood(MAXIMALLY_MIXED, d) == pytest.approx(4 * np.log(0.25))
    assert log_likelihood(projector(PSI_MINUS), d) == -np.inf


@given(seeds)
def test_log_likelihood_below_gibbs_bound(seed):
    rng = np.random.default_rng(seed)
    rho = sample_ginibre(4, rng)
    d = Dataset([measure(rho, f, 500, rng) for f in FAMS[:3]])
    assert log_likelihood(sample_ginibre(4, rng), d) <= gibbs_bound(d) + 1e-9


def test_ml_recovers_state_from_exact_ic_data(rng):
    for _ in range(5):
        rho = sample_ginibre(4, rng)
        d = Dataset([exact_record(rho, f, 10**6) for f in FAMS])
        res = ml_estimate(d)
        assert res.converged
        assert quantum_fidelity(res.estimate, rho) > 0.9999
        assert res.log_likelihood == pytest.approx(log_likelihood(res.estimate, d), abs=1e-8)


def test_ml_of_uniform_data_is_maximally_mixed():
    d = Dataset([exact_record(MAXIMALLY_MIXED, f, 10**4) for f in FAMS])
    assert np.abs(ml_estimate(d).estimate - MAXIMALLY_MIXED).max() < 1e-6


def test_ml_single_family_singlet():
    est = ml_estimate(singlet_record()).estimate
    assert np.vdot(PSI_MINUS, est @ PSI_MINUS).real > 1 - 1e-6


@settings(max_examples=30)
@given(seeds)
def test_ml_iteration_is_monotone(seed):
    rng = np.random.default_rng(seed)
    rho = sample_ginibre(int(rng.choice([1, 4])), rng)
    k = int(rng.integers(1, 7))
    d = Dataset([measure(rho, f, 1000, rng) for f in FAMS[:k]])
    hist = ml_estimate(d, record_history=True, max_iter=500).history
    assert np.all(np.diff(hist) >= 0)


def test_ml_agrees_with_interior_point_optimum(rng):
    from witfam.convex import barrier_ml

    for _ in range(5):
        rho = sample_ginibre(4, rng)
        d = Dataset([measure(rho, f, 10**4, rng) for f in FAMS])
        res = ml_estimate(d)
        ref = barrier_ml(d, ppt=False)
        assert abs(res.log_likelihood - ref.log_likelihood) < 1e-2
        assert likelihood_gap_bound(res.estimate, d) < 1e-2
        assert quantum_fidelity(res.estimate, ref.estimate) > 0.9999


def test_mlme_empty_and_uniform():
    assert np.allclose(mlme_estimate(Dataset()).estimate, MAXIMALLY_MIXED)
    d = Dataset([exact_record(MAXIMALLY_MIXED, family_unitary(3), 10**4)])
    assert np.abs(mlme_estimate(d).estimate - MAXIMALLY_MIXED).max() < 1e-4


def test_mlme_singlet_record():
    est = mlme_estimate(singlet_record()).estimate
    assert np.vdot(PSI_MINUS, est @ PSI_MINUS).real > 0.999
    assert np.allclose(born_probabilities(est, family_unitary(1)), [0, 0, 0, 1], atol=1e-3)


def test_mlme_maximizes_entropy_on_partial_data():
    # one family fixes four probabilities; the rest of the state is flattened
    d = Dataset([exact_record(werner_state(0.6), family_unitary(1), 10**5)])
    est = mlme_estimate(d).estimate
    p = born_probabilities(werner_state(0.6), family_unitary(1))
    expected = sum(pj * P for pj, P in zip(p, family_unitary(1).projectors))
    assert np.abs(est - expected).max() < 1e-3


def test_mlme_approaches_ml_on_ic_data(rng):
    for _ in range(5):
        rho = sample_ginibre(4, rng)
        d = Dataset([measure(rho, f, 10**6, rng) for f in FAMS])
        assert quantum_fidelity(mlme_estimate(d).estimate, ml_estimate(d).estimate) > 0.999


def test_ppt_examples():
    assert ppt_separable(MAXIMALLY_MIXED)
    assert not ppt_separable(projector(PSI_MINUS))
    assert ppt_separable(werner_state(1 / 3), 1e-9)


def test_ml_set_check_examples(rng):
    check = ml_set_check(singlet_record())
    assert check.conclusion is Conclusion.ENTANGLED
    assert check.gap >= 10**4 * np.log(2) - 1e-3
    d = Dataset([measure(MAXIMALLY_MIXED, f, 10**4, rng) for f in FAMS])
    assert ml_set_check(d).conclusion is Conclusion.INCONCLUSIVE
    d = Dataset([FamilyRecord(f, [1, 0, 0, 0]) for f in FAMS])
    assert ml_set_check(d).conclusion is Conclusion.INCONCLUSIVE


def test_single_pairs_can_still_exclude_separable_states():
    # one pair per family, each landing on an entangled outcome: the separable
    # maximum is 2.43 below the unconstrained one
    d = Dataset([FamilyRecord(f, [0, 0, 1, 0]) for f in FAMS])
    check = ml_set_check(d)
    assert check.conclusion is Conclusion.ENTANGLED
    assert check.loglik_max == pytest.approx(-4.158883, abs=1e-5)


@settings(max_examples=25)
@given(seeds)
def test_ml_max_dominates_separable_max(seed):
    rng = np.random.default_rng(seed)
    rho = sample_ginibre(4, rng)
    k = int(rng.integers(1, 7))
    d = Dataset([measure(rho, f, 2000, rng) for f in FAMS[:k]])
    check = ml_set_check(d, delta=np.inf)
    assert check.loglik_max >= check.loglik_sep - 1e-9
    assert check.loglik_max <= check.loglik_max_upper + 1e-9


def test_estimation_diagnostics_text():
    text = ml_estimate(singlet_record()).diagnostics()
    keys = dict(line.split("=") for line in text.strip().splitlines())
    assert set(keys) == {"iterations", "converged", "log_likelihood"}

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import density_matrices, random_product_mixture
from witfam.diagnostics import (
    ALL_SETTINGS, PauliTable, barbieri_inequality, infer_p, nonlinear_bound, nonlinear_margin_scan,
    pauli_expectations, sample_pauli_expectations, witness_from_paulis,
)
from witfam.exceptions import MissingEntry
from witfam.qcore import KET_00, MAXIMALLY_MIXED, PSI_MINUS, projector
from witfam.states import werner_state
from witfam.witness import witness_operator

SINGLET = projector(PSI_MINUS)
ZERO = projector(KET_00)


def test_pauli_table_examples():
    t = pauli_expectations(SINGLET, ["XX", "YY", "ZZ"])
    assert np.allclose(list(t.singles.values()), 0, atol=1e-12)
    assert np.allclose([t.corr(p) for p in ("XX", "YY", "ZZ")], -1)
    t = pauli_expectations(ZERO, ["ZZ"])
    assert t.single("Z1") == pytest.approx(1) and t.single("Z2") == pytest.approx(1)
    assert t.corr("ZZ") == pytest.approx(1)
    t = pauli_expectations(MAXIMALLY_MIXED)
    assert np.allclose(list(t.singles.values()) + list(t.correlators.values()), 0, atol=1e-12)
    assert len(t.correlators) == 9


def test_unknown_setting_rejected():
    with pytest.raises(ValueError):
        pauli_expectations(SINGLET, ["XW"])


def test_witness_from_paulis_examples():
    assert witness_from_paulis(pauli_expectations(SINGLET), np.pi / 2) == pytest.approx(-0.5)
    assert witness_from_paulis(pauli_expectations(MAXIMALLY_MIXED), 0.3) == pytest.approx(0.25)
    assert witness_from_paulis(pauli_expectations(ZERO), np.pi / 2) == pytest.approx(0.5)
    with pytest.raises(MissingEntry):
        witness_from_paulis(pauli_expectations(SINGLET, ["ZZ"]), 0.1)


@given(density_matrices(), st.floats(0, 2 * np.pi))
def test_witness_from_paulis_matches_operator(rho, alpha):
    t = pauli_expectations(rho, ["XX", "YY", "ZZ"])
    assert witness_from_paulis(t, alpha) == pytest.approx(np.trace(rho @ witness_operator(alpha)).real, abs=1e-10)


def test_barbieri_examples():
    lhs, rhs, holds = barbieri_inequality(pauli_expectations(SINGLET), "Z")
    assert (lhs, rhs, holds) == (pytest.approx(2), pytest.approx(6), False)
    lhs, rhs, holds = barbieri_inequality(pauli_expectations(ZERO), "Z")
    assert (lhs, rhs, holds) == (pytest.approx(2), pytest.approx(2), True)
    for axis in "XYZ":
        lhs, rhs, holds = barbieri_inequality(pauli_expectations(MAXIMALLY_MIXED), axis)
        assert (lhs, rhs, holds) == (pytest.approx(1), pytest.approx(0), True)
    with pytest.raises(MissingEntry):
        barbieri_inequality(pauli_expectations(SINGLET, ["ZZ"]), "Z")


def test_nonlinear_examples():
    lhs, rhs, holds = nonlinear_bound(MAXIMALLY_MIXED, np.pi / 2, "G1")
    assert (lhs, rhs, holds) == (pytest.approx(0.25), pytest.approx(0.125), True)
    lhs, rhs, holds = nonlinear_bound(SINGLET, np.pi / 2, "G1")
    assert (lhs, rhs, holds) == (pytest.approx(-0.5), pytest.approx(0.5), False)
    lhs, rhs, holds = nonlinear_bound(SINGLET, np.pi / 2, "G2")
    assert not holds
    print(f"G2 margin on the singlet at pi/2: {lhs - rhs:.6f}")


def test_separable_safety():
    rng = np.random.default_rng(8)
    alphas = np.linspace(0, 2 * np.pi, 9)
    for _ in range(1000):
        rho = random_product_mixture(rng)
        t = pauli_expectations(rho)
        for axis in "XYZ":
            assert barbieri_inequality(t, axis, tol=1e-9)[2]
        for a in alphas:
            assert nonlinear_bound(rho, a, "G1", tol=1e-9)[2]
            assert nonlinear_bound(rho, a, "G2", tol=1e-9)[2]




def test_margin_scan_shapes():
    alphas, margins = nonlinear_margin_scan(SINGLET, "G1", np.linspace(0, np.pi, 7))
    assert alphas.shape == margins.shape == (7,)
    assert margins[3] == pytest.approx(-1.0)


def test_infer_p():
    assert infer_p(-0.5) == pytest.approx(1)
    assert infer_p(0.25) == pytest.approx(0)
    assert infer_p((1 - 3 * 0.4) / 4) == pytest.approx(0.4)
    w = witness_from_paulis(pauli_expectations(werner_state(0.7)), np.pi / 2)
    assert infer_p(w) == pytest.approx(0.7)


def test_sampled_table_close_to_exact(rng):
    t = sample_pauli_expectations(werner_state(0.8), ALL_SETTINGS, 10**5, rng)
    exact = pauli_expectations(werner_state(0.8))
    assert t.provenance == "sampled"
    for key in exact.correlators:
        assert abs(t.corr(key) - exact.corr(key)) < 0.02


def test_table_text_round_trip():
    t = pauli_expectations(werner_state(0.5), ["ZZ", "XY"])
    text = t.to_text()
    assert "Z1Z2=" in text and "X1Y2=" in text
    assert PauliTable.from_text(text) == t


def test_table_range_invariant():
    with pytest.raises(ValueError):
        PauliTable({"Z1": 1.5})

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ref_expectation, ref_matrix, ref_pauli, ref_product_ket
from ewkit.pauli import (
    ALL_LABELS,
    PauliPolynomial,
    ProductStateAngles,
    expand_density,
    expectation_batch,
    expectation_product,
    hs_inner,
    realize_matrix,
)

angle = st.floats(0, 2 * np.pi, allow_nan=False)
coeff = st.floats(-3, 3, allow_nan=False)
polys = st.dictionaries(st.sampled_from(ALL_LABELS), coeff, min_size=1, max_size=8).map(PauliPolynomial)


def test_single_qubit_conventions():
    y = realize_matrix(PauliPolynomial({"YII": 1.0}))
    assert np.allclose(y, ref_pauli("YII"))
    # qubit 1 is the most significant bit
    z1 = realize_matrix(PauliPolynomial({"ZII": 1.0}))
    assert np.allclose(np.diag(z1).real, [1, 1, 1, 1, -1, -1, -1, -1])


def test_all_labels_match_reference():
    for label in ALL_LABELS:
        assert np.allclose(realize_matrix(PauliPolynomial({label: 1.0})), ref_pauli(label))


def test_small_coefficients_dropped_and_equality():
    p = PauliPolynomial({"XXX": 1.0, "YYY": 1e-17})
    assert dict(p) == {"XXX": 1.0}
    assert p == PauliPolynomial({"XXX": 1.0})
    assert (p - p) == PauliPolynomial()


def test_bad_label_and_complex_coefficient_rejected():
    with pytest.raises(ValueError):
        PauliPolynomial({"XQX": 1.0})
    with pytest.raises(ValueError):
        PauliPolynomial({"XX": 1.0})
    with pytest.raises(ValueError):
        PauliPolynomial({"XXX": 1j})


@given(polys, polys)
def test_hs_inner_matches_dense_trace(a, b):
    dense = np.trace(ref_matrix(a) @ ref_matrix(b)).real
    assert hs_inner(a, b) == pytest.approx(dense, abs=1e-9)


def test_terms_roundtrip():
    p = PauliPolynomial({"III": 0.5, "XYZ": -1.25})
    assert PauliPolynomial.from_terms(p.to_terms()) == p


def test_expand_density_reconstructs_random_state():
    rng = np.random.default_rng(3)
    g = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    rho = g @ g.conj().T
    rho /= np.trace(rho)
    r = expand_density(rho)
    assert np.allclose(realize_matrix(r), rho, atol=1e-12)
    assert r["III"] == pytest.approx(1 / 8)


def test_expand_density_rejects_bad_input():
    with pytest.raises(ValueError):
        expand_density(np.eye(8))
    bad = np.eye(8, dtype=complex) / 8
    bad[0, 1] = 0.1
    with pytest.raises(ValueError):
        expand_density(bad)


@given(angle, angle, angle, angle, angle, angle)
def test_normalized_angles_same_state(t1, t2, t3, p1, p2, p3):
    nu = ProductStateAngles.normalized((t1, t2, t3), (p1, p2, p3))
    assert nu.in_range()
    overlap = abs(np.vdot(nu.ket(), ref_product_ket((t1, t2, t3), (p1, p2, p3))))
    assert overlap == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=50)
@given(polys, angle, angle, angle, angle, angle, angle)
def test_expectations_three_routes_agree(poly, t1, t2, t3, p1, p2, p3):
    th, ph = (t1, t2, t3), (p1, p2, p3)
    ref = ref_expectation(poly, th, ph)
    nu = ProductStateAngles(th, ph)
    assert expectation_product(poly, nu) == pytest.approx(ref, abs=1e-10)
    assert expectation_batch(poly, np.array([th]), np.array([ph]))[0] == pytest.approx(ref, abs=1e-10)


def test_ket_convention():
    nu = ProductStateAngles((np.pi, 0, np.pi / 2), (0, 0, np.pi / 2))
    expected = np.kron(np.kron([0, 1], [1, 0]), np.array([1, 1j]) / np.sqrt(2))
    assert abs(np.vdot(nu.ket(), expected)) == pytest.approx(1.0)

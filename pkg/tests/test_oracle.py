import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ewkit.oracle import (
    duality_report,
    envelope_duality,
    fr_support_numeric,
    make_rng,
    objective,
    pauli_corners,
    separable_min_numeric,
    sphere_duality,
    start_points,
)
from ewkit.pauli import PauliPolynomial, ProductStateAngles, expectation_batch, expectation_product
from ewkit.regions import (
    cone_exact_support,
    family,
    polygon_lp_support,
    polygon_sign_patterns,
    sample_product_angles,
    sphere_exact_support,
    support_bound,
)
from ewkit.suites import random_coefficients
from ewkit.witness import build_linear


def random_poly(seed, n_terms=10):
    rng = make_rng(seed)
    labels = rng.choice(64, size=n_terms, replace=False)
    letters = "IXYZ"
    return PauliPolynomial({"".join(letters[(k >> s) & 3] for s in (4, 2, 0)): rng.normal() for k in labels})


def test_gradient_matches_finite_differences():
    C = random_poly(0, 20).coefficient_tensor()
    x = make_rng(1).uniform(0, 2 * np.pi, size=(100, 6))
    _, g = objective(C, x)
    h = 1e-5
    fd = np.empty_like(x)
    for i in range(6):
        e = np.zeros(6)
        e[i] = h
        fd[:, i] = (objective(C, x + e)[0] - objective(C, x - e)[0]) / (2 * h)
    assert np.max(np.abs(g - fd)) < 1e-6


def test_objective_matches_expectation():
    poly = random_poly(2)
    x = make_rng(3).uniform(0, np.pi, size=(5, 6))
    f, _ = objective(poly.coefficient_tensor(), x)
    for row, val in zip(x, f):
        assert val == pytest.approx(expectation_product(poly, ProductStateAngles.from_array(row)), abs=1e-12)


def test_start_points_deterministic_and_nested():
    a = start_points(64, seed=5)
    b = start_points(64, seed=5)
    c = start_points(128, seed=5, corners=False)
    assert np.array_equal(a, b)
    assert np.allclose(a[:64], c[:64])
    assert len(pauli_corners()) == 216
    assert not np.allclose(start_points(8, 1, False), start_points(8, 2, False))


def test_identity_witness():
    res = separable_min_numeric(PauliPolynomial.identity())
    assert res.minimum == pytest.approx(1.0)


def test_sphere_witness_minimum_zero():
    w = build_linear("sphere9", [1, 0, 0, 0, 0, 0, 0, 0, 0], 1.0)
    assert abs(separable_min_numeric(w).minimum) < 1e-7


def test_polygon_witness_and_undersized_control():
    s = polygon_sign_patterns()[0]
    assert abs(separable_min_numeric(build_linear("polygon6", s, 1.0)).minimum) < 1e-7
    assert separable_min_numeric(build_linear("polygon6", s, 0.9)).minimum == pytest.approx(-0.1, abs=1e-7)


def test_result_consistent_with_argmin():
    poly = random_poly(4)
    res = separable_min_numeric(poly, starts=64)
    assert res.minimum == pytest.approx(expectation_product(poly, res.argmin), abs=1e-10)
    assert res.argmin.in_range()
    d = res.to_dict()
    assert d["seed"] == 42 and d["starts"] == 64 + 216


@pytest.mark.parametrize("seed", range(4))
def test_minimum_below_samples_and_superset_monotone(seed):
    poly = random_poly(10 + seed)
    small = separable_min_numeric(poly, starts=16, seed=seed)
    big = separable_min_numeric(poly, starts=64, seed=seed)
    assert big.minimum <= small.minimum + 1e-12
    th, ph = sample_product_angles(5000, make_rng(seed))
    assert big.minimum <= expectation_batch(poly, th, ph).min() + 1e-12


def test_deterministic_for_fixed_seed():
    poly = random_poly(20)
    a = separable_min_numeric(poly, starts=32, seed=9)
    b = separable_min_numeric(poly, starts=32, seed=9)
    assert a.minimum == b.minimum and a.argmin == b.argmin


def test_rejects_zero_starts_and_bad_target():
    with pytest.raises(ValueError):
        separable_min_numeric(PauliPolynomial.identity(), starts=0)
    with pytest.raises(TypeError):
        separable_min_numeric(3.0)


def test_fr_support_examples():
    e1 = np.eye(9)[0]
    assert fr_support_numeric(family("sphere9"), e1) == pytest.approx(1.0, abs=1e-7)
    s = polygon_sign_patterns()[7]
    assert fr_support_numeric(family("polygon6"), s) == pytest.approx(1.0, abs=1e-7)
    d = np.array([0.6, 0.0, 0.8, 0, 0, 0, 0, 0, 0])
    assert fr_support_numeric(family("caseB9"), d) == pytest.approx(1.0, abs=1e-7)


EXACT = {
    "sphere9": sphere_exact_support,
    "sphere15": sphere_exact_support,
    "cone7": cone_exact_support,
    "caseB9": lambda a: support_bound(family("caseB9"), a).value,
}


@pytest.mark.parametrize("fid", sorted(EXACT))
def test_oracle_agrees_with_exact_support(fid):
    fam = family(fid)
    rng = make_rng(31)
    for k in range(15):
        a = random_coefficients(fam, rng)
        num = fr_support_numeric(fam, a, starts=64, seed=k)
        assert num == pytest.approx(EXACT[fid](a), abs=1e-6)


def test_polygon_lp_value_is_an_outer_bound():
    fam = family("polygon6")
    rng = make_rng(31)
    seen = set()
    for k in range(15):
        a = random_coefficients(fam, rng)
        b = support_bound(fam, a)
        num = fr_support_numeric(fam, a, starts=64, seed=k)
        seen.add(b.tight)
        if b.tight:
            assert num == pytest.approx(polygon_lp_support(a), abs=1e-6)
        else:
            # the LP optimum sits at a point no product state reaches
            assert num < b.value - 1e-3
            assert build_linear(fam, a).validity == "conservative"
    assert seen == {True, False}


@pytest.mark.parametrize("fid", ["sphere9", "sphere15", "sphere15_v41", "cone7", "caseA16"])
def test_analytic_support_never_below_oracle(fid):
    fam = family(fid)
    rng = make_rng(32)
    for k in range(10):
        a = random_coefficients(fam, rng)
        num = fr_support_numeric(fam, a, starts=64, seed=k)
        b = support_bound(fam, a)
        assert num <= b.value + 1e-9
        if b.tight:
            assert num == pytest.approx(b.value, abs=1e-6)


def test_duality_examples():
    r = sphere_duality(np.eye(9)[2])
    assert (r.primal, r.dual, r.gap, r.multiplier) == pytest.approx((-1, -1, 0, 0.5))
    q = np.array([0.3, 0.4])
    r = envelope_duality(q, a0=1.0)
    assert (r.primal, r.dual) == pytest.approx((0.5, 0.5))
    r3 = duality_report("sphere_primal", a=3 * np.array([0.6, 0.8]))
    assert (r3.primal, r3.dual, r3.gap) == pytest.approx((-3, -3, 0))
    with pytest.raises(ValueError):
        sphere_duality(np.zeros(9))
    with pytest.raises(ValueError):
        duality_report("simplex")


@settings(max_examples=200)
@given(
    arrays(np.float64, 9, elements=st.floats(-10, 10, allow_nan=False)).filter(lambda a: np.linalg.norm(a) > 1e-3),
    st.floats(0.1, 5),
)
def test_duality_gap_vanishes(a, a0):
    assert abs(sphere_duality(a).gap) <= 1e-12 * max(1, np.linalg.norm(a))
    r = envelope_duality(a, a0=a0)
    assert abs(r.gap) <= 1e-12 * max(1, a0 * np.linalg.norm(a))
    assert r.multiplier > 0

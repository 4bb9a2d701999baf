import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ref_matrix
from ewkit.oracle import make_rng, separable_min_numeric
from ewkit.pauli import PauliPolynomial, ProductStateAngles, expectation_batch
from ewkit.regions import CATALOG, family, polygon_sign_patterns, sample_product_angles
from ewkit.states import named_state, product_density, w_mixture
from ewkit.suites import random_coefficients
from ewkit.witness import (
    ConstraintLedger,
    build_linear,
    detect_envelope,
    detect_linear,
    envelope_from_expectations,
    envelope_is_tight,
    expectations,
    load_witness_file,
    polygon_gauge,
    witness_from_json,
)

UPB = (-1 - np.sqrt(2)) / 16


def random_state(seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(8, 3)) + 1j * rng.normal(size=(8, 3))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def test_build_examples():
    w = build_linear("polygon6", [1, 1, 1, 1, 1, -1])
    assert w.a0 == pytest.approx(1.0) and w.validity == "valid"
    w = build_linear("sphere9", [0.6, 0.8, 0, 0, 0, 0, 0, 0, 0])
    assert w.a0 == pytest.approx(1.0) and w.ledger is not None
    w = build_linear("cone7", [1, 0, 0, 0, 0, 0], branch=1)
    assert w.a0 == pytest.approx(1.0)
    assert w.a[-1] == pytest.approx(1.0)
    assert w.polynomial().isclose(PauliPolynomial({"III": 1, "IZZ": 1, "ZXX": 1, "ZYY": 1}))


def test_build_errors_and_invalid_marking():
    with pytest.raises(ValueError):
        build_linear("sphere9", [1, 0])
    with pytest.raises(ValueError):
        build_linear("sphere9", np.zeros(9))
    with pytest.raises(ValueError):
        build_linear("sphere9", np.eye(9)[0], a0=-1.0)
    with pytest.raises(ValueError):
        build_linear("cone7", [1, 0, 0, 0, 0, 0])
    assert build_linear("sphere9", np.eye(9)[0], a0=0.5).validity == "invalid"


def test_sphere_witness_conservative_off_the_exact_layout():
    w = build_linear("sphere9", [1, 1, 0, 1, -1, 0, 0, 0, 0])
    assert w.validity == "conservative"
    assert w.notes["exact_support"] == pytest.approx(np.sqrt(2))


def test_ledger_consistency():
    led = ConstraintLedger.for_coefficients([1, 0, 0, 0, 0.1, 0, 0, 0, 0])
    assert led.satisfied == all(v >= -1e-12 for v in led.slacks.values())
    assert len(led.slacks) == 12
    led = ConstraintLedger.for_coefficients([1, 0, 0, 0, 1, 0, 0, 0, 0])
    assert not led.satisfied


@pytest.mark.parametrize("fid", [f for f in CATALOG if f != "caseA16"])
def test_auto_witnesses_are_separability_preserving(fid):
    fam = family(fid)
    rng = make_rng(11)
    th, ph = sample_product_angles(10_000, rng)
    for _ in range(5):
        w = build_linear(fam, random_coefficients(fam, rng))
        assert expectation_batch(w.polynomial(), th, ph).min() >= -1e-9
        if w.validity == "valid":
            assert separable_min_numeric(w, starts=64).minimum >= -1e-7


def test_case_a_auto_witnesses_preserving():
    fam = family("caseA16")
    rng = make_rng(12)
    for _ in range(5):
        w = build_linear(fam, random_coefficients(fam, rng))
        assert separable_min_numeric(w, starts=64).minimum >= -1e-7


def test_parity_control():
    for s in polygon_sign_patterns():
        assert np.prod(s) == -1
    wrong = build_linear("polygon6", [1, 1, 1, 1, 1, 1], a0=1.0)
    assert separable_min_numeric(wrong).minimum < -1e-3


def test_relabelled_polygon_witness_nonnegative():
    w = PauliPolynomial({"III": 1, "XXX": 1, "XYZ": 1, "YYY": 1, "YZX": 1, "ZXY": 1, "ZZZ": -1})
    assert separable_min_numeric(w).minimum >= -1e-7


def test_detect_linear_on_maximally_mixed():
    w = build_linear("caseB9", [0.3, 0.1, 0, 0, 0, 0.5, 0, 0, 0])
    rep = detect_linear(w, np.eye(8) / 8)
    assert rep.value == pytest.approx(w.a0)
    assert not rep.detected
    assert rep.normalized == rep.value / 8


@settings(max_examples=30)
@given(st.integers(0, 10_000))
def test_detect_linear_routes_agree(seed):
    rho = random_state(seed)
    fam = family("sphere15")
    w = build_linear(fam, make_rng(seed).normal(size=fam.dim))
    rep = detect_linear(w, rho)
    assert abs(rep.dense_value - rep.paired_value) <= 1e-10
    assert rep.value == pytest.approx(np.trace(ref_matrix(w.polynomial()) @ rho).real, abs=1e-10)


def test_detect_linear_product_state_not_detected():
    nu = ProductStateAngles((0.3, 1.2, 2.0), (0.1, 4.0, 5.5))
    w = build_linear("polygon6", [1, -1, 1, -1, 1, 1])
    assert detect_linear(w, product_density(nu)).value >= -1e-12


def test_envelope_reference_values():
    assert detect_envelope("caseA16", named_state("upb").rho).normalized == pytest.approx(UPB, abs=1e-9)
    assert detect_envelope("caseA16", named_state("ghz_w").rho).normalized == pytest.approx(-3 / 32, abs=1e-9)
    for p in (0.0, 0.2, 3 / 7, 0.9):
        rep = detect_envelope("caseB9", w_mixture(p))
        assert rep.normalized == pytest.approx(1 / 8 - 7 * p / 24, abs=1e-12)
        assert np.allclose(rep.q, [0, 0, 2 * p / 3, 0, 0, 2 * p / 3, 0, 0, -p], atol=1e-12)


def test_envelope_closed_forms():
    q = np.zeros(9)
    q[0], q[1] = 0.3, -0.4
    assert envelope_from_expectations("sphere9", q, 2.0).value == pytest.approx(1.0)
    c = np.array([0.3, 0, 0, 0, 0.4, 0, -0.2])
    rep = envelope_from_expectations("cone7", c)
    assert rep.value == pytest.approx(1 - 0.2 - 0.5)
    assert rep.branch == 1
    g, v = polygon_gauge(np.array([0.2, 0, 0, 0, 0, 0.0]))
    assert g == pytest.approx(0.2)


def test_case_a_envelope_not_certified():
    # every block norm is 1 on |0>|+>|0>, so the formula goes negative on a product state
    rho = product_density(ProductStateAngles((0, np.pi / 2, 0), (0, 0, 0)))
    rep = detect_envelope("caseA16", rho)
    assert rep.value == pytest.approx(-3.0)
    assert not rep.certified
    assert rep.certified_value == pytest.approx(0.0)
    assert detect_envelope("caseA16", named_state("upb").rho).certified_value > 0


@pytest.mark.parametrize("fid", CATALOG)
def test_envelope_dominance(fid):
    fam = family(fid)
    rng = make_rng(21)
    for k in range(5):
        rho = random_state(100 + k)
        w = build_linear(fam, random_coefficients(fam, rng))
        if w.validity != "valid":
            continue
        assert detect_envelope(fam, rho, w.a0).value <= detect_linear(w, rho).value + 1e-10


@pytest.mark.parametrize("fid", CATALOG)
def test_attaining_witness_reproduces_envelope(fid):
    for k in range(3):
        rho = random_state(200 + k)
        opt = envelope_is_tight(fid, rho)
        assert detect_linear(opt.witness, rho).value == pytest.approx(detect_envelope(fid, rho).value, abs=1e-10)


def test_envelope_is_tight_examples():
    opt = envelope_is_tight("caseA16", named_state("upb").rho)
    assert detect_linear(opt.witness, named_state("upb").rho).normalized == pytest.approx(UPB, abs=1e-10)
    # the offset does not cover this witness's separable minimum
    assert opt.witness.validity == "invalid"
    assert not opt.tight
    for fid in CATALOG:
        assert envelope_is_tight(fid, np.eye(8) / 8).degenerate


def test_sphere_attaining_coefficients():
    fam = family("sphere9")
    rho = (np.eye(8) + 0.3 / 2 * ref_matrix(fam.operators[0]) - 0.4 / 2 * ref_matrix(fam.operators[1])) / 8
    q = expectations(fam, rho)
    assert np.allclose(q[:2], [0.3, -0.4])
    opt = envelope_is_tight(fam, rho)
    assert np.allclose(opt.witness.a[:2], [-0.6, 0.8])
    assert detect_envelope(fam, rho).value == pytest.approx(0.5)


def test_witness_json(tmp_path):
    w = witness_from_json({"family": "cone7", "coeffs": [0, 1, 0, 0, 0, 0], "branch": -1})
    assert w.branch == -1 and w.a[-1] == pytest.approx(-1)
    path = tmp_path / "w.json"
    path.write_text(json.dumps({"family": "sphere9", "a0": 2.0, "coeffs": [1] + [0] * 8}))
    w = load_witness_file(path)
    assert w.a0 == 2.0 and w.validity == "valid"
    d = w.to_dict()
    assert d["terms"] and d["ledger"]["satisfied"]

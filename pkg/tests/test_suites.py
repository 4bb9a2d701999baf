import numpy as np
import pytest

from conftest import ref_pauli
from ewkit.oracle import separable_min_numeric
from ewkit.pauli import ALL_LABELS
from ewkit.states import named_state
from ewkit.suites import (
    UPB_EXPANSION,
    negative_controls,
    reproduce,
    run_suite,
    suite_duality,
    suite_ppt,
    wmix_envelope,
)


def test_upb_expansion_reference():
    rho = named_state("upb").rho
    for label in ALL_LABELS:
        r = np.trace(ref_pauli(label) @ rho).real / 8
        expected = 1 / 8 if label == "III" else UPB_EXPANSION.get(label, 0) / 32
        assert r == pytest.approx(expected, abs=1e-12)


def test_wmix_envelope_line():
    for p in (0.1, 0.6):
        assert wmix_envelope(p) == pytest.approx(1 / 8 - 7 * p / 24, abs=1e-12)


def test_negative_controls_fail_oracle():
    for ctrl in negative_controls():
        assert separable_min_numeric(ctrl["witness"], starts=64).minimum < -1e-3, ctrl["name"]


def test_small_suites_pass():
    assert run_suite("fr", 2000, seed=1)["passed"]
    assert run_suite("validity", 3, seed=1, starts=32)["passed"]
    rep = suite_ppt(100, seed=1, certificates=False)
    assert rep["passed"] and all(r["disagreements"] == 0 for r in rep["rows"])


def test_duality_suite_reports_ball_value_gap():
    rep = suite_duality(20, seed=1, starts=32)
    gaps = {r["check"]: r for r in rep["rows"]}
    assert gaps["sphere gap"]["max_gap"] <= 1e-12
    assert gaps["envelope gap"]["max_gap"] <= 1e-12
    oracle_row = gaps["oracle vs ball value where ledger holds"]
    # the oracle tracks the exact product-state support, not the ball value
    assert oracle_row["max_deviation_from_exact_product_support"] <= 1e-6
    assert oracle_row["agreeing"] < oracle_row["ledger_held"]
    assert not rep["passed"]


def test_reproduce_rows():
    rows = reproduce("all")
    assert all(r["pass"] for r in rows)
    assert {r["case"] for r in rows} == {"upb", "wmix", "ghzw"}
    with pytest.raises(ValueError):
        reproduce("bell")
    with pytest.raises(ValueError):
        run_suite("nope", 1, 1)

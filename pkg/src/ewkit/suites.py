"""Verification suites and reproduction of the reference detection numbers.

Each suite returns a JSON-ready dict with a ``passed`` flag and a
``failures`` list; the CLI and the acceptance tests both call into here.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

from .oracle import envelope_duality, make_rng, separable_min_numeric, sphere_duality
from .pauli import expand_density
from .regions import (
    CATALOG,
    family,
    fr_points_batch,
    membership_batch,
    sample_product_angles,
    sphere_exact_support,
    sphere_ledger,
)
from .states import PptFamilyParams, is_ppt, named_state, ppt_closed_form, w_mixture
from .witness import build_linear, detect_envelope, envelope_is_tight, expectations

# expansion coefficients of the UPB state in units of 1/32
UPB_EXPANSION = {
    "IXX": -1, "IXZ": -1, "IZX": 1, "IZZ": 1, "XIX": -1, "XIZ": 1, "XXI": -1, "XXX": 1,
    "XZI": -1, "XZZ": 1, "ZIX": -1, "ZIZ": 1, "ZXI": 1, "ZXZ": 1, "ZZI": 1, "ZZX": 1,
}  # fmt: skip

UPB_EXPECTED = (-1 - np.sqrt(2)) / 16
GHZW_EXPECTED = -3 / 32
WMIX_EXPECTED = 3 / 7


def random_coefficients(fam, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=fam.dim)
    for i, j in fam.ties:
        a[j] = a[i]
    return a


# --- suites ---------------------------------------------------------------


def suite_fr(samples: int, seed: int) -> dict:
    """Product-state images stay inside every catalog region; sphere identities hold."""
    rng = make_rng(seed)
    rows, failures = [], []
    for fid in CATALOG:
        fam = family(fid)
        th, ph = sample_product_angles(samples, rng)
        inside, slacks = membership_batch(fam, fr_points_batch(fam, th, ph))
        worst = float(slacks.min())
        rows.append({"family": fid, "samples": samples, "worst_slack": worst, "outside": int((~inside).sum())})
        if not inside.all():
            failures.append({"check": "containment", "family": fid, "worst_slack": worst})

    th, ph = sample_product_angles(min(samples, 10_000), rng)
    P = fr_points_batch(family("sphere9"), th, ph)
    identity_err = float(np.max(np.abs(np.sum(P**2, axis=1) - 1)))
    rows.append({"check": "sum of nine squares = 1", "max_error": identity_err})
    if identity_err > 1e-12:
        failures.append({"check": "sphere identity", "max_error": identity_err})
    shared = swapped_identity_errors(th, ph)
    rows.append({"check": "pair identities", "max_error": shared})
    if shared > 1e-12:
        failures.append({"check": "pair identities", "max_error": shared})
    return {"suite": "fr", "rows": rows, "failures": failures, "passed": not failures}


def swapped_identity_errors(theta, phi) -> float:
    """max |P_k^2 + P_{k+3}^2 - P_{k+6}^2 - P_{k+9}^2| over k = 1, 2, 3."""
    from .regions import FeasibleRegionFamily, shared_operators

    ops = shared_operators()
    names = [f"Q{i}" for i in range(1, 13)]
    fam = FeasibleRegionFamily("shared12", "sphere", tuple(names), tuple(ops[n] for n in names), ())
    P = fr_points_batch(fam, theta, phi)
    err = 0.0
    for k in range(3):
        d = P[:, k] ** 2 + P[:, k + 3] ** 2 - P[:, k + 6] ** 2 - P[:, k + 9] ** 2
        err = max(err, float(np.max(np.abs(d))))
    return err


def suite_validity(samples: int, seed: int, starts: int = 256) -> dict:
    """Auto-offset witnesses pass the oracle; wrong-parity and undersized ones fail."""
    rng = make_rng(seed)
    rows, failures = [], []
    for fid in CATALOG:
        fam = family(fid)
        worst = np.inf
        for k in range(samples):
            w = build_linear(fam, random_coefficients(fam, rng))
            m = separable_min_numeric(w, starts=starts, seed=seed + k).minimum
            worst = min(worst, m)
            if m < -1e-6:
                failures.append({"check": "auto witness", "family": fid, "coeffs": list(w.a), "minimum": m})
        rows.append({"family": fid, "witnesses": samples, "worst_minimum": float(worst)})
    for ctrl in negative_controls():
        m = separable_min_numeric(ctrl["witness"], starts=starts, seed=seed).minimum
        rows.append({"control": ctrl["name"], "minimum": m})
        if m >= -1e-3:
            failures.append({"check": "negative control", "control": ctrl["name"], "minimum": m})
    return {"suite": "validity", "rows": rows, "failures": failures, "passed": not failures}


def negative_controls() -> list[dict]:
    """Witnesses that must be rejected: wrong sign parity and offsets at 0.9 of a tight support value."""
    out = [{"name": "polygon parity +1, a0 = 1", "witness": build_linear("polygon6", [1, 1, 1, 1, 1, 1], 1.0)}]
    tight = [
        ("polygon6", [1, 1, 1, 1, 1, -1], None),
        ("sphere9", [0.6, 0.8, 0, 0, 0, 0, 0, 0, 0], None),
        ("sphere15", [0, 0, 0, 0, 0, 0, 0.6, 0, 0.8], None),
        ("cone7", [1, 0, 0, 0, 0, 0], 1),
        ("caseB9", [0.3, -0.4, 0.5, 0.1, 0, 0, 0, 0.2, 0], None),
    ]
    for fid, a, branch in tight:
        h = build_linear(fid, a, branch=branch).a0
        out.append({"name": f"{fid} a0 = 0.9 h", "witness": build_linear(fid, a, 0.9 * h, branch)})
    return out


def suite_duality(samples: int, seed: int, starts: int = 256) -> dict:
    """Closed-form primal/dual gaps, and the oracle against the ball value when the cut-plane ledger holds."""
    rng = make_rng(seed)
    rows, failures = [], []
    worst_sphere = worst_env = 0.0
    for _ in range(samples):
        a = rng.normal(size=9)
        worst_sphere = max(worst_sphere, abs(sphere_duality(a).gap))
        q = rng.normal(size=9)
        worst_env = max(worst_env, abs(envelope_duality(q, a0=float(rng.uniform(0.1, 3))).gap))
    rows.append({"check": "sphere gap", "instances": samples, "max_gap": worst_sphere})
    rows.append({"check": "envelope gap", "instances": samples, "max_gap": worst_env})
    if worst_sphere > 1e-12 or worst_env > 1e-12:
        failures.append({"check": "duality gap", "sphere": worst_sphere, "envelope": worst_env})

    held = agree = 0
    worst_primal = worst_exact = 0.0
    fam = family("sphere9")
    for k in range(samples):
        a = rng.normal(size=9)
        if not sphere_ledger(a)["satisfied"]:
            continue
        held += 1
        m = separable_min_numeric(fam.combine(0.0, a), starts=starts, seed=seed + k).minimum
        d_primal = abs(m + np.linalg.norm(a))
        worst_primal = max(worst_primal, d_primal)
        worst_exact = max(worst_exact, abs(m + sphere_exact_support(a)))
        agree += d_primal <= 1e-6
    rows.append({
        "check": "oracle vs ball value where ledger holds",
        "ledger_held": held,
        "agreeing": agree,
        "max_deviation": worst_primal,
        "max_deviation_from_exact_product_support": worst_exact,
    })  # fmt: skip
    if agree < held:
        failures.append({"check": "oracle vs ball value", "disagreeing": held - agree, "max_deviation": worst_primal})
    return {"suite": "duality", "rows": rows, "failures": failures, "passed": not failures}


def random_ppt_params(fam_id: str, rng: np.random.Generator) -> PptFamilyParams:
    if fam_id == "7.65":
        r = np.concatenate([[rng.uniform(-1, 1)], rng.uniform(-0.5, 0.5, size=6)])
    else:
        r = rng.uniform(-0.6, 0.6, size=9)
    return PptFamilyParams(fam_id, tuple(r))


def suite_ppt(samples: int, seed: int, certificates: bool = True) -> dict:
    """Closed-form PPT conditions against partial-transpose eigenvalues, then certificates."""
    from .transforms import DEFAULT_TARGETS, nondecomposability_certificate

    rng = make_rng(seed)
    rows, failures = [], []
    for fid in ("7.65", "7.72"):
        disagree = n_ppt = 0
        for _ in range(samples):
            p = random_ppt_params(fid, rng)
            closed, _ = ppt_closed_form(p, tol=1e-9)
            eig = is_ppt(p.matrix(), tol=1e-9).ppt
            disagree += closed != eig
            n_ppt += eig
        rows.append({"family": fid, "draws": samples, "ppt": n_ppt, "disagreements": disagree})
        if disagree:
            failures.append({"check": "closed form", "family": fid, "disagreements": disagree})
    if certificates:
        for fid in ("7.65", "7.72"):
            cert = nondecomposability_certificate(DEFAULT_TARGETS[fid], fid, seed=seed)
            ok = cert is not None and cert.value <= -1e-3 and min(cert.eigen_ppt["min_eigenvalues"]) >= -1e-12
            rows.append({"certificate": fid, "found": cert is not None, **(cert.to_dict() if cert else {})})
            if not ok:
                failures.append({"check": "certificate", "family": fid})
    return {"suite": "ppt", "rows": rows, "failures": failures, "passed": not failures}


def suite_orbit(seed: int, starts: int = 32) -> dict:
    from .transforms import apply_axis_map, canonical_key, full_group, orbit, polygon_witnesses, orbit_maps

    bases = polygon_witnesses()
    maps = orbit_maps()
    rep = orbit(bases, maps, revalidate=True, starts=starts, seed=seed)
    group = full_group()
    base = bases[0].polynomial()
    images = {canonical_key(apply_axis_map(base, m)): apply_axis_map(base, m) for m in group}
    closed = all(canonical_key(apply_axis_map(img, m)) in images for img in images.values() for m in group[::7])
    out = rep.to_dict()
    out.update(
        distinct_maps=len({m.key() for m in maps}),
        expected_total=1184,
        raw_product=len(bases) * len(maps),
        group_orbit_size=len(images),
        group_closed=closed,
    )
    failures = list(rep.failures)
    if not closed:
        failures.append({"check": "group closure"})
    return {"suite": "orbit", "report": out, "failures": failures, "passed": not failures}


def run_suite(name: str, samples: int, seed: int, starts: int = 256) -> dict:
    if name == "fr":
        return suite_fr(samples, seed)
    if name == "validity":
        return suite_validity(samples, seed, starts)
    if name == "duality":
        return suite_duality(samples, seed, starts)
    if name == "ppt":
        return suite_ppt(samples, seed)
    if name == "orbit":
        return suite_orbit(seed)
    raise ValueError(f"unknown suite {name!r}")


# --- reproduction ---------------------------------------------------------


def _row(case: str, quantity: str, computed: float, expected: float, tol: float) -> dict:
    return {
        "case": case,
        "quantity": quantity,
        "computed": float(computed),
        "expected": float(expected),
        "tol": tol,
        "pass": bool(abs(computed - expected) <= tol),
    }


def reproduce_upb(seed: int = 42) -> list[dict]:
    rho = named_state("upb").rho
    rows = [_row("upb", "caseA16 envelope / 8", detect_envelope("caseA16", rho).normalized, UPB_EXPECTED, 1e-9)]
    coeffs = expand_density(rho)
    for label, s in UPB_EXPANSION.items():
        rows.append(_row("upb", f"r_{label}", coeffs.get(label), s / 32, 1e-12))
    others = max((abs(v) for k, v in coeffs.items() if k not in UPB_EXPANSION and k != "III"), default=0.0)
    rows.append(_row("upb", "largest unlisted coefficient", others, 0.0, 1e-12))
    mins = is_ppt(rho, tol=1e-12).min_eigenvalues
    rows.append(_row("upb", "ppt (1 = all cuts positive)", float(min(mins) >= -1e-12), 1.0, 0.0))
    # informative: the attaining witness with an oracle-corrected offset
    w = envelope_is_tight("caseA16", rho).witness
    m = separable_min_numeric(w, seed=seed).minimum
    corrected = (np.real(np.trace(w.matrix() @ rho)) - m) / 8
    rows.append({"case": "upb", "quantity": "oracle-offset witness / 8 (informative)", "computed": float(corrected),
                 "expected": None, "tol": None, "pass": True})  # fmt: skip
    return rows


def wmix_envelope(p: float) -> float:
    return detect_envelope("caseB9", w_mixture(p)).normalized


def reproduce_wmix() -> list[dict]:
    root = brentq(wmix_envelope, 0.0, 1.0, xtol=1e-15, rtol=1e-15)
    rows = [_row("wmix", "caseB9 envelope root in p", root, WMIX_EXPECTED, 1e-9)]
    for p in (0.25, 0.5, 1.0):
        q = expectations("caseB9", w_mixture(p))
        expect = np.array([0, 0, 2 * p / 3, 0, 0, 2 * p / 3, 0, 0, -p])
        rows.append(_row("wmix", f"max |q - q_expected| at p={p}", float(np.max(np.abs(q - expect))), 0.0, 1e-12))
        rows.append(_row("wmix", f"envelope / 8 at p={p}", wmix_envelope(p), 1 / 8 - 7 * p / 24, 1e-12))
    return rows


def reproduce_ghzw() -> list[dict]:
    rows = []
    for sign in (1, -1):
        rho = named_state("ghz_w", sign=sign).rho
        rows.append(_row("ghzw", f"caseA16 envelope / 8 (sign {sign:+d})",
                         detect_envelope("caseA16", rho).normalized, GHZW_EXPECTED, 1e-9))  # fmt: skip
    return rows


def reproduce(case: str, seed: int = 42) -> list[dict]:
    if case == "upb":
        return reproduce_upb(seed)
    if case == "wmix":
        return reproduce_wmix()
    if case == "ghzw":
        return reproduce_ghzw()
    if case == "all":
        return reproduce_upb(seed) + reproduce_wmix() + reproduce_ghzw()
    raise ValueError(f"unknown case {case!r}")

"""Linear witnesses built from feasible-region support values, detection
values, nonlinear envelopes and the constraint ledgers of the sphere family.

Two value conventions coexist. Validity and envelopes use expectation values
q_i = Tr(Q_i rho). Reported detection numbers equal Tr(W rho)/8 because they
are written in terms of expansion coefficients rho = sum_J r_J sigma_J; every
report carries both.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .pauli import DIM, PauliPolynomial, expand_density, hs_inner, realize_matrix
from .regions import (
    SPHERE9_PAIRS,
    FeasibleRegionFamily,
    family,
    polygon_sign_patterns,
    support_bound,
)
from .states import state_expectations

DETECT_TOL = 1e-9
LEDGER_TOL = 1e-12
ROUTE_TOL = 1e-10

VALID, CONSERVATIVE, INVALID = "valid", "conservative", "invalid"


def _resolve(fam) -> FeasibleRegionFamily:
    return fam if isinstance(fam, FeasibleRegionFamily) else family(fam)


# --- ledgers --------------------------------------------------------------


@dataclass(frozen=True)
class ConstraintLedger:
    """Pairwise cut-plane conditions (x_i +- x_j)^2 <= scale on the sphere9 pairs.

    ``kind`` is ``coefficients`` (x = A, scale R = sum A_i^2) or ``envelope``
    (x = q, scale T = (R / a0^2) sum q_i^2 with R taken at the optimum).
    """

    kind: str
    scale: float
    slacks: dict
    satisfied: bool

    @classmethod
    def from_values(cls, kind: str, x: Sequence[float], scale: float) -> "ConstraintLedger":
        x = np.asarray(x, dtype=float)
        slacks = {}
        for i, j in SPHERE9_PAIRS:
            slacks[f"{i + 1}+{j + 1}"] = float(scale - (x[i] + x[j]) ** 2)
            slacks[f"{i + 1}-{j + 1}"] = float(scale - (x[i] - x[j]) ** 2)
        return cls(kind, float(scale), slacks, all(v >= -LEDGER_TOL for v in slacks.values()))

    @classmethod
    def for_coefficients(cls, a: Sequence[float]) -> "ConstraintLedger":
        a = np.asarray(a, dtype=float)
        return cls.from_values("coefficients", a, float(np.dot(a, a)))

    @classmethod
    def for_envelope(cls, q: Sequence[float], a0: float = 1.0, R: float | None = None) -> "ConstraintLedger":
        q = np.asarray(q, dtype=float)
        R = a0**2 if R is None else R  # the optimum sits on sum A_i^2 = a0^2
        return cls.from_values("envelope", q, R / a0**2 * float(np.dot(q, q)))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "scale": self.scale, "slacks": self.slacks, "satisfied": self.satisfied}


# --- witnesses ------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """W = a0 III + sum_i a_i Q_i over the operators of ``family``.

    ``validity`` is ``valid`` when a0 reaches a support value known to be
    attained, ``conservative`` when a0 reaches an upper bound that may not be
    attained, and ``invalid`` when a0 is below the analytic requirement.
    """

    family: str
    a0: float
    a: tuple[float, ...]
    validity: str
    required_a0: float
    ledger: ConstraintLedger | None = None
    branch: int | None = None
    notes: dict = field(default_factory=dict)
    fam: FeasibleRegionFamily | None = field(default=None, repr=False, compare=False)

    def family_obj(self) -> FeasibleRegionFamily:
        return self.fam if self.fam is not None else family(self.family)

    def polynomial(self) -> PauliPolynomial:
        return self.family_obj().combine(self.a0, self.a)

    def matrix(self) -> np.ndarray:
        return realize_matrix(self.polynomial())

    def to_dict(self) -> dict:
        out = {
            "family": self.family,
            "a0": self.a0,
            "coeffs": list(self.a),
            "validity": self.validity,
            "required_a0": self.required_a0,
            "terms": self.polynomial().to_terms(),
        }
        if self.branch is not None:
            out["branch"] = self.branch
        if self.ledger is not None:
            out["ledger"] = self.ledger.to_dict()
        if self.notes:
            out["notes"] = self.notes
        return out


def _cone_coeffs(fam: FeasibleRegionFamily, a: np.ndarray, branch: int | None) -> tuple[np.ndarray, int | None]:
    if a.shape == (6,):
        if branch not in (1, -1):
            raise ValueError("cone witnesses given six coefficients need branch=+1 or -1")
        a = np.append(a, branch * np.linalg.norm(a))
    elif branch is None and a.shape == (fam.dim,):
        branch = 1 if a[6] >= 0 else -1
    return a, branch


def build_linear(fam, a: Sequence[float], a0: float | str = "auto", branch: int | None = None) -> Witness:
    """Linear witness for coefficient vector ``a``.

    ``a0="auto"`` sets a0 to the analytic support value, so the analytic
    separable minimum is exactly zero. A numeric ``a0`` below that value
    still builds, marked ``invalid`` (useful as a negative control).
    Cone families accept six coefficients plus ``branch``; the apex
    coefficient is then ``branch * |a|``.
    """
    fam = _resolve(fam)
    a = np.asarray(a, dtype=float)
    if fam.kind == "cone":
        a, branch = _cone_coeffs(fam, a, branch)
    a = fam._coeffs(a)
    bound = support_bound(fam, a)
    h = bound.value
    if isinstance(a0, str):
        if a0 != "auto":
            raise ValueError(f"a0 must be 'auto' or a number, got {a0!r}")
        if h <= 0:
            raise ValueError("zero coefficient vector gives no witness")
        a0_value = h
    else:
        a0_value = float(a0)
        if a0_value <= 0:
            raise ValueError("a0 must be positive")
    if a0_value < h * (1 - 1e-12):
        validity = INVALID
    else:
        validity = VALID if bound.tight else CONSERVATIVE
    ledger = ConstraintLedger.for_coefficients(a) if fam.id == "sphere9" else None
    notes = {"support_method": bound.method}
    if bound.exact is not None:
        notes["exact_support"] = bound.exact
    return Witness(fam.id, a0_value, tuple(float(x) for x in a), validity, h, ledger, branch, notes, fam)


def witness_from_json(obj: dict) -> Witness:
    """Decode ``{"family", "a0", "coeffs", "branch"?}``; a0 may be "auto".

    A CLI artifact wrapping the witness under a "witness" key is accepted too.
    """
    if "family" not in obj and isinstance(obj.get("witness"), dict):
        obj = obj["witness"]
    return build_linear(obj["family"], obj["coeffs"], obj.get("a0", "auto"), obj.get("branch"))


def load_witness_file(path: str | Path) -> Witness:
    with open(path) as fh:
        return witness_from_json(json.load(fh))


# --- detection ------------------------------------------------------------


@dataclass(frozen=True)
class DetectionReport:
    value: float  # Tr(W rho)
    normalized: float  # Tr(W rho) / 8
    detected: bool
    dense_value: float
    paired_value: float
    witness: dict
    state: str = ""

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "normalized": self.normalized,
            "detected": self.detected,
            "dense_value": self.dense_value,
            "paired_value": self.paired_value,
            "witness": self.witness,
            "state": self.state,
        }


def detect_linear(w: Witness, rho: np.ndarray, state: str = "") -> DetectionReport:
    """Tr(W rho) from dense matrices and from label-wise pairing with the expansion of rho."""
    rho = np.asarray(rho, dtype=complex)
    poly = w.polynomial()
    dense = float(np.real(np.trace(realize_matrix(poly) @ rho)))
    paired = hs_inner(poly, expand_density(rho))
    if abs(dense - paired) > ROUTE_TOL * max(1.0, abs(dense)):
        raise RuntimeError(f"trace routes disagree: dense {dense!r}, paired {paired!r}")
    return DetectionReport(dense, dense / DIM, dense < -DETECT_TOL, dense, paired, w.to_dict(), state)


@dataclass(frozen=True)
class EnvelopeReport:
    """Minimum of Tr(W rho) over the family's linear witnesses with offset a0.

    ``certified`` is False when the witnesses the formula ranges over are not
    all separability-preserving (case A); ``certified_value`` is then the
    minimum over the witnesses whose validity the analytic bound does prove.
    """

    family: str
    a0: float
    value: float
    normalized: float
    detected: bool
    q: tuple[float, ...]
    branch: int | None = None
    certified: bool = True
    certified_value: float | None = None

    def __float__(self) -> float:
        return self.value

    def to_dict(self) -> dict:
        out = {
            "family": self.family,
            "a0": self.a0,
            "value": self.value,
            "normalized": self.normalized,
            "detected": self.detected,
            "q": list(self.q),
            "certified": self.certified,
        }
        if self.branch is not None:
            out["branch"] = self.branch
        if self.certified_value is not None:
            out["certified_value"] = self.certified_value
            out["certified_normalized"] = self.certified_value / DIM
        return out


def _case_a_blocks(q: np.ndarray) -> list[np.ndarray]:
    return [np.array([q[0] + q[1], q[2] + q[3]]), q[4:8], q[8:12], q[12:16]]


def _case_b_blocks(q: np.ndarray) -> list[np.ndarray]:
    return [q[0:3], q[3:6], q[6:9]]


def polygon_gauge(q: np.ndarray) -> tuple[float, np.ndarray]:
    """max(max_s s.q, max_i |q_i|) and the polar vertex attaining it."""
    best, vertex = -np.inf, None
    for s in polygon_sign_patterns():
        v = np.array(s, dtype=float)
        val = float(v @ q)
        if val > best:
            best, vertex = val, v
    for i in range(len(q)):
        v = np.zeros(len(q))
        v[i] = 1.0 if q[i] >= 0 else -1.0
        if abs(q[i]) > best:
            best, vertex = abs(float(q[i])), v
    return best, vertex


def expectations(fam, rho: np.ndarray) -> np.ndarray:
    return state_expectations(rho, _resolve(fam).operators)


def detect_envelope(fam, rho: np.ndarray, a0: float = 1.0) -> EnvelopeReport:
    """Nonlinear envelope value for ``rho`` in the family's closed form.

    sphere: a0 (1 - |q|); cone: a0 (1 - |q_apex| - |q_1..6|), the smaller of
    the two branches; case A: a0 (1 - sum of four block norms) with the first
    block on (q1 + q2, q3 + q4); case B: a0 (1 - sum of three block norms);
    polygon: a0 (1 - gauge of q).
    """
    fam = _resolve(fam)
    return envelope_from_expectations(fam, expectations(fam, rho), a0)


def envelope_from_expectations(fam, q: Sequence[float], a0: float = 1.0) -> EnvelopeReport:
    """Envelope value from precomputed q_i = Tr(Q_i rho)."""
    fam = _resolve(fam)
    a0 = float(a0)
    q = np.asarray(q, dtype=float)
    branch = None
    certified, certified_value = True, None
    if fam.kind == "sphere":
        value = a0 * (1 - np.linalg.norm(q))
    elif fam.kind == "cone":
        branch = -1 if q[6] > 0 else 1
        value = a0 * (1 - abs(q[6]) - np.linalg.norm(q[:6]))
    elif fam.kind == "caseA":
        norms = [np.linalg.norm(b) for b in _case_a_blocks(q)]
        value = a0 * (1 - sum(norms))
        certified = False
        certified_value = float(a0 * (1 - max(norms)))
    elif fam.kind == "caseB":
        value = a0 * (1 - sum(np.linalg.norm(b) for b in _case_b_blocks(q)))
    elif fam.kind == "polygon":
        value = a0 * (1 - polygon_gauge(q)[0])
    else:
        raise ValueError(f"no envelope for family kind {fam.kind!r}")
    value = float(value)
    return EnvelopeReport(
        fam.id, a0, value, value / DIM, value < -DETECT_TOL, tuple(float(x) for x in q),
        branch, certified, certified_value,
    )  # fmt: skip


@dataclass(frozen=True)
class EnvelopeOptimum:
    tight: bool
    witness: Witness
    degenerate: bool
    ledger: ConstraintLedger | None = None


def _unit(v: np.ndarray, fallback_dim: int) -> tuple[np.ndarray, bool]:
    n = float(np.linalg.norm(v))
    if n == 0:
        e = np.zeros(fallback_dim)
        e[0] = 1.0
        return e, True
    return v / n, False


def envelope_is_tight(fam, rho: np.ndarray, a0: float = 1.0) -> EnvelopeOptimum:
    """Linear witness attaining the envelope value for ``rho``.

    Coefficients point along -q block by block, scaled to the family's
    validity boundary. ``tight`` reports the envelope ledger for sphere9 and
    whether the attaining witness is provably valid elsewhere.
    """
    fam = _resolve(fam)
    q = expectations(fam, rho)
    degenerate = False
    ledger = None
    if fam.kind == "sphere":
        u, degenerate = _unit(q, fam.dim)
        w = build_linear(fam, -a0 * u, a0)
        if fam.id == "sphere9":
            ledger = ConstraintLedger.for_envelope(q, a0)
    elif fam.kind == "cone":
        u, degenerate = _unit(q[:6], 6)
        branch = -1 if q[6] > 0 else 1
        w = build_linear(fam, np.append(-a0 * u, branch * a0), a0, branch=branch)
        degenerate = degenerate and q[6] == 0
    elif fam.kind in ("caseA", "caseB"):
        blocks = _case_a_blocks(q) if fam.kind == "caseA" else _case_b_blocks(q)
        units = []
        flags = []
        for b in blocks:
            u, d = _unit(b, len(b))
            units.append(u if not d else np.zeros(len(b)))
            flags.append(d)
        degenerate = all(flags)
        if degenerate:
            units[0] = _unit(blocks[0], len(blocks[0]))[0]
        if fam.kind == "caseA":
            u1 = units[0]
            a = np.concatenate([[u1[0], u1[0], u1[1], u1[1]], *units[1:]])
        else:
            a = np.concatenate(units)
        w = build_linear(fam, -a0 * a, a0)
    elif fam.kind == "polygon":
        g, vertex = polygon_gauge(q)
        degenerate = not np.any(q)
        w = build_linear(fam, -a0 * vertex, a0)
    else:
        raise ValueError(f"no envelope for family kind {fam.kind!r}")
    tight = ledger.satisfied if ledger is not None else w.validity == VALID
    return EnvelopeOptimum(bool(tight and not degenerate), w, bool(degenerate), ledger)

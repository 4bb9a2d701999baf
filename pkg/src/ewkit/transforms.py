"""Per-qubit Pauli-axis relabelings, witness orbits with numeric revalidation,
and the search for PPT states a witness detects (non-decomposability).

An axis map permutes the letters X, Y, Z independently on each qubit and
keeps coefficients. Every such map is a per-qubit orthogonal map of Bloch
vectors, so it sends the product-state image set to itself and witnesses to
witnesses.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .oracle import make_rng, separable_min_numeric
from .pauli import PauliPolynomial, expand_density, hs_inner, realize_matrix
from .regions import FeasibleRegionFamily, family
from .states import PPT_FAMILIES, PptFamilyParams, is_ppt, ppt_closed_form
from .witness import Witness, detect_linear, envelope_from_expectations, envelope_is_tight

IDENTITY_PERM = "XYZ"


@dataclass(frozen=True)
class AxisMap:
    """Images of (X, Y, Z) on each qubit, e.g. ``("XYZ", "XZY", "XYZ")``."""

    perms: tuple[str, str, str]
    name: str = ""

    def __post_init__(self):
        perms = tuple(self.perms)
        if len(perms) != 3 or any(sorted(p) != ["X", "Y", "Z"] for p in perms):
            raise ValueError(f"each qubit needs a permutation of XYZ, got {perms}")
        object.__setattr__(self, "perms", perms)
        if not self.name:
            object.__setattr__(self, "name", "|".join(perms))

    @classmethod
    def identity(cls) -> "AxisMap":
        return cls((IDENTITY_PERM,) * 3, "id")

    def letter(self, qubit: int, ch: str) -> str:
        return ch if ch == "I" else self.perms[qubit]["XYZ".index(ch)]

    def label(self, label: str) -> str:
        return "".join(self.letter(q, ch) for q, ch in enumerate(label))

    def __matmul__(self, other: "AxisMap") -> "AxisMap":
        """``self @ other`` applies ``other`` first."""
        perms = tuple("".join(self.perms[q]["XYZ".index(other.perms[q][k])] for k in range(3)) for q in range(3))
        return AxisMap(perms, f"{self.name} {other.name}")

    def key(self) -> tuple[str, str, str]:
        return self.perms


def single_qubit_map(qubit: int, mapping: dict[str, str], name: str = "") -> AxisMap:
    perm = "".join(mapping.get(ch, ch) for ch in "XYZ")
    perms = [IDENTITY_PERM] * 3
    perms[qubit - 1] = perm
    return AxisMap(tuple(perms), name)


_TOKEN = re.compile(r"M([123])\(([xyz])(<->|->)([xyz])(?:->([xyz]))?(?:->([xyz]))?\)")


def parse_axis_map(text: str) -> AxisMap:
    """Parse products like ``M3(y<->z) M2(x->y->z->x)``; the rightmost factor acts first.

    ``x<->y`` swaps two axes; ``x->y->z->x`` (or the short ``x->y->z``)
    is the cycle x to y, y to z, z to x.
    """
    tokens = _TOKEN.findall(text)
    leftover = _TOKEN.sub("", text).strip()
    if not tokens or leftover:
        raise ValueError(f"cannot parse axis map {text!r}")
    result = AxisMap.identity()
    for qubit, a, arrow, b, c, d in reversed(tokens):
        a, b, c, d = a.upper(), b.upper(), c.upper(), d.upper()
        if arrow == "<->":
            if c or a == b:
                raise ValueError(f"bad transposition in {text!r}")
            mapping = {a: b, b: a}
        else:
            if not c or len({a, b, c}) != 3 or (d and d != a):
                raise ValueError(f"bad cycle in {text!r}")
            mapping = {a: b, b: c, c: a}
        result = single_qubit_map(int(qubit), mapping) @ result
    return replace(result, name=text)


# the 36 maps that generate the polygonal witness set from the base witness
ORBIT_MAP_TEXT: tuple[str, ...] = (
    "M3(y<->z)", "M3(x<->y)", "M3(x->y->z->x)", "M3(x->z->y->x)", "M3(x<->z)", "M2(x<->y) M3(x<->y)",
    "M2(y<->z)", "M1(y<->z) M2(y<->z)", "M1(y<->z) M2(x->y->z->x)", "M2(x->y->z->x)",
    "M2(x->y->z->x) M3(x<->y)", "M2(x<->z)",
    "M1(x->y->z->x)", "M1(x<->z)", "M2(x<->z) M3(x->y->z->x)", "M3(y<->z) M2(x<->y) M3(x<->y)",
    "M3(y<->z) M2(y<->z)", "M3(y<->z) M1(y<->z) M2(y<->z) M2(x->y->z->x)",
    "M3(x<->y) M2(x<->y) M3(x<->y)", "M3(x->y->z->x) M2(x<->y) M3(x<->y)", "M3(x<->y) M2(y<->z)",
    "M3(x<->y) M1(y<->z) M2(y<->z)", "M3(x->y->z->x) M2(y<->z)", "M3(x->y->z->x) M1(y<->z) M2(y<->z)",
    "M3(x->y->z->x) M2(x<->y) M3(x<->y)", "M3(x<->z)", "M3(x->z->y->x) M2(y<->z)",
    "M3(x->z->y->x) M1(y<->z) M2(x->y->z->x)", "M3(x<->z) M2(y<->z)", "M3(x<->z) M1(y<->z) M2(x->y->z->x)",
    "M3(y<->z) M1(y<->z) M2(y<->z) M2(x->y->z->x)", "M3(y<->z) M2(x->y->z->x)", "M3(x<->z) M2(x<->z)",
    "M3(x<->z) M2(x->y->z->x) M3(x<->y)", "M3(x<->y) M2(x->y->z->x)", "M3(x<->y) M1(x<->z)",
)  # fmt: skip


def orbit_maps() -> list[AxisMap]:
    return [parse_axis_map(t) for t in ORBIT_MAP_TEXT]


def full_group() -> list[AxisMap]:
    """All 6^3 per-qubit permutation triples."""
    perms = ["".join(p) for p in itertools.permutations("XYZ")]
    return [AxisMap((p1, p2, p3)) for p1 in perms for p2 in perms for p3 in perms]


def compose(*maps: AxisMap) -> AxisMap:
    """compose(a, b, c) acts as a(b(c(.)))."""
    out = AxisMap.identity()
    for m in maps:
        out = out @ m
    return out


def apply_axis_map(obj, m: AxisMap):
    """Relabel a PauliPolynomial, a FeasibleRegionFamily or a Witness."""
    if isinstance(obj, PauliPolynomial):
        return PauliPolynomial({m.label(k): v for k, v in obj.items()})
    if isinstance(obj, FeasibleRegionFamily):
        return replace(
            obj,
            id=f"{obj.id}@{m.name}",
            operators=tuple(apply_axis_map(q, m) for q in obj.operators),
            base=obj.id,
        )
    if isinstance(obj, Witness):
        fam = apply_axis_map(obj.family_obj(), m)
        return replace(obj, family=fam.id, fam=fam)
    raise TypeError(f"cannot apply an axis map to {type(obj).__name__}")


def canonical_key(poly: PauliPolynomial) -> tuple:
    return tuple(sorted((k, round(v, 12) + 0.0) for k, v in poly.items()))


@dataclass
class OrbitReport:
    base_count: int
    map_count: int
    generated: int
    distinct: int
    validated: int
    failures: list
    images: list

    def to_dict(self, include_images: bool = False) -> dict:
        out = {
            "base_count": self.base_count,
            "map_count": self.map_count,
            "generated": self.generated,
            "distinct": self.distinct,
            "validated": self.validated,
            "failures": self.failures,
        }
        if include_images:
            out["images"] = [p.to_terms() for p in self.images]
        return out


def orbit(bases: Sequence, maps: Sequence[AxisMap], revalidate: bool = True, starts: int = 32,
          seed: int = 42, tol: float = 1e-6) -> OrbitReport:
    """All images of ``bases`` under ``maps``, deduplicated by canonical term set.

    With ``revalidate`` every distinct image goes through the separability
    oracle; images whose minimum falls below ``-tol`` are listed as failures.
    """
    polys = [b if isinstance(b, PauliPolynomial) else b.polynomial() for b in bases]
    seen: dict[tuple, PauliPolynomial] = {}
    generated = 0
    for p in polys:
        for m in maps:
            img = apply_axis_map(p, m)
            generated += 1
            seen.setdefault(canonical_key(img), img)
    images = list(seen.values())
    validated, failures = 0, []
    if revalidate:
        for img in images:
            res = separable_min_numeric(img, starts=starts, seed=seed)
            if res.minimum >= -tol:
                validated += 1
            else:
                failures.append({"terms": img.to_terms(), "minimum": res.minimum})
    return OrbitReport(len(polys), len(maps), generated, len(images), validated, failures, images)


def polygon_witnesses() -> list[Witness]:
    """The 32 polygonal witnesses, one per sign pattern with product -1."""
    from .regions import polygon_sign_patterns
    from .witness import build_linear

    return [build_linear("polygon6", s) for s in polygon_sign_patterns()]


# --- non-decomposability ---------------------------------------------------

DEFAULT_TARGETS = {"7.65": "cone7[swap=1]", "7.72": "caseB9"}


@dataclass
class Certificate:
    params: PptFamilyParams
    rho: np.ndarray
    value: float
    dense_value: float
    paired_value: float
    closed_form_ppt: bool
    closed_form_values: list
    eigen_ppt: dict
    target: str
    witness: dict
    witness_oracle_min: float | None

    def to_dict(self) -> dict:
        return {
            "family": self.params.family,
            "r": list(self.params.r),
            "target": self.target,
            "value": self.value,
            "dense_value": self.dense_value,
            "paired_value": self.paired_value,
            "closed_form_ppt": self.closed_form_ppt,
            "closed_form_values": self.closed_form_values,
            "eigen_ppt": self.eigen_ppt,
            "witness": self.witness,
            "witness_oracle_min": self.witness_oracle_min,
        }


def _value_fn(target):
    if isinstance(target, Witness):
        wm = realize_matrix(target.polynomial())
        return lambda rho: float(np.real(np.einsum("ij,ji->", wm, rho)))
    fam = target if isinstance(target, FeasibleRegionFamily) else family(target)
    mats = np.array([realize_matrix(q) for q in fam.operators])
    return lambda rho: envelope_from_expectations(fam, np.real(np.einsum("kij,ji->k", mats, rho))).value


def _family_matrix_fn(ppt_family: str):
    ops = np.array([realize_matrix(o) for o in PPT_FAMILIES[ppt_family]])
    eye = np.eye(8, dtype=complex)
    return lambda r: (eye + np.tensordot(r, ops, axes=1)) / 8


def _grid_candidates(ppt_family: str, levels: int, rng: np.random.Generator, n_random: int) -> Iterable[np.ndarray]:
    """Block-structured parameter points: each block along a signed axis or a random direction."""
    axes = [np.eye(3)[k] * s for k in range(3) for s in (1, -1)]
    if ppt_family == "7.65":
        grid = np.linspace(-1, 1, 2 * levels + 1)
        for r1 in grid:
            room = (1 - abs(r1)) / 2  # 1 - |r1| - 2 R_k >= 0
            mags = np.linspace(0, room, levels + 1)
            for u, v in itertools.product(axes, axes):
                for R1, R2 in itertools.product(mags, mags):
                    yield np.concatenate([[r1], R1 * u, R2 * v])
        for _ in range(n_random):
            r1 = rng.uniform(-1, 1)
            room = (1 - abs(r1)) / 2
            u, v = rng.normal(size=(2, 3))
            yield np.concatenate([[r1], rng.uniform(0, room) * u / np.linalg.norm(u),
                                  rng.uniform(0, room) * v / np.linalg.norm(v)])  # fmt: skip
    else:
        mags = np.linspace(0, 1, levels + 1)
        for u, v, w in itertools.product(axes, axes, axes):
            for a, b, c in itertools.product(mags, mags, mags):
                yield np.concatenate([a * u, b * v, c * w])
        for _ in range(n_random):
            x = rng.normal(size=9)
            yield x / np.linalg.norm(x) * rng.uniform(0, 1.2)


def _shrink_to_ppt(ppt_family: str, r: np.ndarray, margin: float) -> np.ndarray | None:
    """Scale the non-identity part down until every closed-form value clears ``margin``."""
    for scale in np.linspace(1, 0, 41):
        p = PptFamilyParams(ppt_family, tuple(r * scale))
        ok, values = ppt_closed_form(p)
        if min(values) >= margin * (1 if ppt_family == "7.65" else 1 / 8):
            return r * scale
    return None


def nondecomposability_certificate(target, ppt_family: str = "7.65", budget: int = 2000, seed: int = 42,
                                   margin: float = 1e-6, threshold: float = -1e-6,
                                   oracle_check: bool = True) -> Certificate | None:
    """Search a parameterized PPT family for a state that ``target`` detects.

    ``target`` is a linear Witness or a family (id or object) whose envelope
    is used. Candidates come from a block-structured grid plus ``budget``
    random points, all pulled inside the closed-form PPT region with a small
    margin; the best one is refined by a seeded local search. A certificate
    is returned only if the eigenvalue PPT check and both trace routes agree.
    """
    if ppt_family not in ("7.65", "7.72"):
        raise ValueError("ppt_family must be '7.65' or '7.72'")
    value_of = _value_fn(target)
    matrix_of = _family_matrix_fn(ppt_family)
    rng = make_rng(seed)
    best_r, best_v = None, np.inf
    for r in _grid_candidates(ppt_family, 4 if ppt_family == "7.65" else 2, rng, budget):
        r = _shrink_to_ppt(ppt_family, r, margin)
        if r is None:
            continue
        v = value_of(matrix_of(r))
        if v < best_v:
            best_r, best_v = r, v
    if best_r is None:
        return None
    step = 0.05
    for _ in range(budget):
        cand = _shrink_to_ppt(ppt_family, best_r + step * rng.normal(size=best_r.shape), margin)
        if cand is None:
            continue
        v = value_of(matrix_of(cand))
        if v < best_v:
            best_r, best_v = cand, v
        else:
            step = max(step * 0.98, 1e-4)
    if best_v >= threshold:
        return None

    params = PptFamilyParams(ppt_family, tuple(float(x) for x in best_r))
    rho = params.matrix()
    cf_ok, cf_values = ppt_closed_form(params)
    eig = is_ppt(rho, tol=1e-12)
    if isinstance(target, Witness):
        w = target
    else:
        w = envelope_is_tight(target, rho).witness
    dense = float(np.real(np.trace(w.matrix() @ rho)))
    paired = hs_inner(w.polynomial(), expand_density(rho))
    if not (cf_ok and eig.ppt and dense < threshold and paired < threshold):
        return None
    oracle_min = separable_min_numeric(w, seed=seed).minimum if oracle_check else None
    name = target.family if isinstance(target, Witness) else (
        target.id if isinstance(target, FeasibleRegionFamily) else str(target))
    return Certificate(params, rho, float(best_v), dense, paired, cf_ok, cf_values, eig.to_dict(), name,
                       w.to_dict(), oracle_min)  # fmt: skip


def detection_of(target, rho: np.ndarray) -> float:
    """Detection value of a witness (linear trace) or family (envelope)."""
    if isinstance(target, Witness):
        return detect_linear(target, rho).value
    return _value_fn(target)(rho)

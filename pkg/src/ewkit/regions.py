"""Feasible-region families: operator lists, constraint blocks, membership and
analytic support values.

A family maps a separable state rho_s to the point P_i = Tr(Q_i rho_s). Every
block below describes a convex set that contains all such points; the support
value h(a) = max_P a.P over the blocks gives the offset a linear witness
a0 III + sum a_i Q_i needs to be non-negative on separable states. All blocks
are symmetric under P -> -P, so min_P a.P = -h(a).
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .pauli import PauliPolynomial, ProductStateAngles, expectation_batch

SLACK_TOL = 1e-9
TIE_TOL = 1e-12


@dataclass(frozen=True)
class ConstraintBlock:
    """One convex constraint on FR coordinates (0-based indices).

    kinds and their slack (>= 0 inside):

    - ``halfspace``: bound - sum coeffs_i p_i
    - ``ball``: 1 - sum p_i^2
    - ``paired-ball``: 1 - sum_g (sum_{i in g} p_i)^2 over ``groups``
    - ``cone``: (1 + sign p_apex) - ||p_indices||
    - ``norm-sum``: 1 - sum_g ||p_g|| over ``groups``
    """

    kind: str
    indices: tuple[int, ...]
    coeffs: tuple[float, ...] = ()
    bound: float = 1.0
    apex: int | None = None
    sign: int = 1
    groups: tuple[tuple[int, ...], ...] = ()

    def slack(self, p: np.ndarray) -> np.ndarray:
        """Slack for points ``p`` of shape (..., n)."""
        p = np.asarray(p, dtype=float)
        if self.kind == "halfspace":
            return self.bound - p[..., list(self.indices)] @ np.array(self.coeffs)
        if self.kind == "ball":
            return 1.0 - np.sum(p[..., list(self.indices)] ** 2, axis=-1)
        if self.kind == "paired-ball":
            return 1.0 - sum(np.sum(p[..., list(g)], axis=-1) ** 2 for g in self.groups)
        if self.kind == "cone":
            return 1.0 + self.sign * p[..., self.apex] - np.linalg.norm(p[..., list(self.indices)], axis=-1)
        if self.kind == "norm-sum":
            return 1.0 - sum(np.linalg.norm(p[..., list(g)], axis=-1) for g in self.groups)
        raise ValueError(f"unknown block kind {self.kind!r}")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "indices": list(self.indices)}
        if self.kind == "halfspace":
            out.update(coeffs=list(self.coeffs), bound=self.bound)
        if self.kind == "cone":
            out.update(apex=self.apex, sign=self.sign)
        if self.groups:
            out["groups"] = [list(g) for g in self.groups]
        return out


@dataclass(frozen=True)
class FeasibleRegionFamily:
    id: str
    kind: str  # polygon | sphere | cone | caseA | caseB
    names: tuple[str, ...]
    operators: tuple[PauliPolynomial, ...]
    blocks: tuple[ConstraintBlock, ...]
    ties: tuple[tuple[int, int], ...] = ()
    notes: str = ""
    base: str | None = None
    exact_base: bool = False  # operators are the base layout the exact support formulas assume

    @property
    def dim(self) -> int:
        return len(self.operators)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def combine(self, a0: float, a: Sequence[float]) -> PauliPolynomial:
        """Polynomial a0 III + sum a_i Q_i."""
        a = self._coeffs(a)
        poly = PauliPolynomial.identity(a0)
        for ai, q in zip(a, self.operators):
            poly = poly + q * ai
        return poly

    def _coeffs(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        if a.shape != (self.dim,):
            raise ValueError(f"family {self.id} has {self.dim} operators, got {a.shape[0] if a.ndim else 0} coefficients")
        return a

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "names": list(self.names),
            "operators": [q.to_terms() for q in self.operators],
            "blocks": [b.to_dict() for b in self.blocks],
            "ties": [list(t) for t in self.ties],
            "notes": self.notes,
        }


def _P(**terms) -> PauliPolynomial:
    return PauliPolynomial(terms)


def _pair_ops(first: str, second_sum: tuple[str, str], sign: int) -> PauliPolynomial:
    """first ⊗ (A + sign B) for two-letter strings A, B."""
    return PauliPolynomial({first + second_sum[0]: 1, first + second_sum[1]: sign})


# the twelve operators shared by the cone and sphere families; index k -> Q_{k+1}
_SHARED = {
    "Q1": _pair_ops("Z", ("XX", "YY"), 1),
    "Q2": _pair_ops("X", ("XX", "YY"), 1),
    "Q3": _pair_ops("Y", ("XX", "YY"), 1),
    "Q4": _pair_ops("Z", ("XY", "YX"), -1),
    "Q5": _pair_ops("X", ("XY", "YX"), -1),
    "Q6": _pair_ops("Y", ("XY", "YX"), -1),
    "Q7": _pair_ops("Z", ("XX", "YY"), -1),
    "Q8": _pair_ops("X", ("XX", "YY"), -1),
    "Q9": _pair_ops("Y", ("XX", "YY"), -1),
    "Q10": _pair_ops("Z", ("XY", "YX"), 1),
    "Q11": _pair_ops("X", ("XY", "YX"), 1),
    "Q12": _pair_ops("Y", ("XY", "YX"), 1),
}

def shared_operators() -> dict[str, PauliPolynomial]:
    """Q1..Q12 of the cone and sphere families by name."""
    return dict(_SHARED)


POLYGON_LABELS = ("XXX", "XYY", "YXZ", "YZY", "ZYZ", "ZZX")


def polygon_sign_patterns() -> list[tuple[int, ...]]:
    """The 32 sign vectors ((-1)^i1, ..., (-1)^i5, (-1)^(i1+...+i5+1))."""
    out = []
    for bits in itertools.product((0, 1), repeat=5):
        s = tuple((-1) ** b for b in bits) + ((-1) ** (sum(bits) + 1),)
        out.append(s)
    return out


SPHERE9_PAIRS = ((0, 4), (0, 5), (1, 3), (1, 5), (2, 3), (2, 4))


def _polygon6() -> FeasibleRegionFamily:
    blocks = tuple(
        ConstraintBlock("halfspace", tuple(range(6)), tuple(float(x) for x in s), 1.0)
        for s in polygon_sign_patterns()
    )
    return FeasibleRegionFamily(
        "polygon6",
        "polygon",
        tuple(f"Q{i}" for i in range(1, 7)),
        tuple(PauliPolynomial({lab: 1}) for lab in POLYGON_LABELS),
        blocks,
        notes="32 half-spaces s.P <= 1 over sign patterns with product -1",
    )


def _sphere_operators() -> tuple[tuple[str, ...], tuple[PauliPolynomial, ...]]:
    names = ("Q1", "Q2", "Q3", "Q4", "Q5", "Q6", "Q13", "Q14", "Q15")
    ops = tuple(_SHARED[n] for n in names[:6]) + (_P(IXZ=1), _P(IYZ=1), _P(IZI=1))
    return names, ops


def _sphere9() -> FeasibleRegionFamily:
    names, ops = _sphere_operators()
    names = tuple(f"Q{i}" for i in range(1, 10))
    halfspaces = tuple(
        ConstraintBlock("halfspace", (i, j), (float(si), float(sj)), 1.0)
        for i, j in SPHERE9_PAIRS
        for si in (1, -1)
        for sj in (1, -1)
    )
    return FeasibleRegionFamily(
        "sphere9",
        "sphere",
        names,
        ops,
        (ConstraintBlock("ball", tuple(range(9))),) + halfspaces,
        notes="hyper-ball sum P_i^2 <= 1 cut by 24 planes +-P_i +-P_j <= 1",
        exact_base=True,
    )


def _sphere15() -> FeasibleRegionFamily:
    names, ops = _sphere_operators()
    return FeasibleRegionFamily(
        "sphere15",
        "sphere",
        names,
        ops,
        (ConstraintBlock("ball", tuple(range(9))),),
        notes="ball over Q1..Q6, Q13..Q15; Q7..Q12 enter through block swaps",
        exact_base=True,
    )


def _cone7() -> FeasibleRegionFamily:
    names = ("Q1", "Q2", "Q3", "Q4", "Q5", "Q6", "Q13")
    ops = tuple(_SHARED[n] for n in names[:6]) + (_P(IZZ=1),)
    blocks = tuple(ConstraintBlock("cone", tuple(range(6)), apex=6, sign=s) for s in (1, -1))
    return FeasibleRegionFamily(
        "cone7", "cone", names, ops, blocks, notes="sum_{i<=6} P_i^2 <= (1 +- P_13)^2", exact_base=True
    )


_CASE_A_LABELS = (
    ("XZZ", 1), ("XXX", 1), ("ZXZ", 1), ("ZZX", 1),
    ("ZXI", -1), ("ZZI", -1), ("XZI", 1), ("XXI", 1),
    ("IZX", -1), ("IZZ", -1), ("IXZ", 1), ("IXX", 1),
    ("XIZ", -1), ("ZIZ", -1), ("ZIX", 1), ("XIX", 1),
)  # fmt: skip


def _caseA16() -> FeasibleRegionFamily:
    blocks = (
        ConstraintBlock("paired-ball", (0, 1, 2, 3), groups=((0, 1), (2, 3))),
        ConstraintBlock("ball", (4, 5, 6, 7)),
        ConstraintBlock("ball", (8, 9, 10, 11)),
        ConstraintBlock("ball", (12, 13, 14, 15)),
    )
    return FeasibleRegionFamily(
        "caseA16",
        "caseA",
        tuple(f"Q{i}" for i in range(1, 17)),
        tuple(PauliPolynomial({lab: s}) for lab, s in _CASE_A_LABELS),
        blocks,
        ties=((0, 1), (2, 3)),
        notes="coefficients must satisfy A1 = A2 and A3 = A4",
    )


CASE_B_LABELS = ("XXX", "YXX", "ZXX", "XYY", "YYY", "ZYY", "XZZ", "YZZ", "ZZZ")


def _caseB9() -> FeasibleRegionFamily:
    groups = ((0, 1, 2), (3, 4, 5), (6, 7, 8))
    return FeasibleRegionFamily(
        "caseB9",
        "caseB",
        tuple(f"Q{i}" for i in range(1, 10)),
        tuple(PauliPolynomial({lab: 1}) for lab in CASE_B_LABELS),
        (ConstraintBlock("norm-sum", tuple(range(9)), groups=groups),),
        notes="sum of the three block norms <= 1",
    )


# --- block swaps and identity replacements --------------------------------

_SWAP_PAIRS = {1: (("Q1", "Q4"), ("Q7", "Q10")), 2: (("Q2", "Q5"), ("Q8", "Q11")), 3: (("Q3", "Q6"), ("Q9", "Q12"))}


def _frame(axis) -> np.ndarray:
    """Orthonormal frame (rows) whose first row is ``axis``; identity for the x axis."""
    n = np.asarray(axis, dtype=float)
    x = np.array([1.0, 0.0, 0.0])
    v = np.cross(x, n)
    c = float(np.dot(x, n))
    if np.linalg.norm(v) < 1e-15:
        rot = np.eye(3) if c > 0 else np.diag([-1.0, -1.0, 1.0])
    else:
        vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
        rot = np.eye(3) + vx + vx @ vx / (1 + c)
    return (rot @ np.eye(3)).T


def _replace_identity(poly: PauliPolynomial, party: int, direction) -> PauliPolynomial:
    out = {}
    for label, c in poly.items():
        if label[party - 1] != "I":
            raise ValueError(f"party {party} of {label} is not an identity")
        for letter, w in zip("XYZ", direction):
            if abs(w) > 0:
                new = label[: party - 1] + letter + label[party:]
                out[new] = out.get(new, 0.0) + c * w
    return PauliPolynomial(out)


def spherical_variant(base_id: str, swaps: Sequence[int] = (), expand: Sequence[tuple[str, int]] = (),
                      axis: Sequence[float] = (1.0, 0.0, 0.0), check_samples: int = 1000,
                      seed: int = 0) -> FeasibleRegionFamily:
    """Derive a new family from ``sphere15`` or ``cone7``.

    ``swaps`` picks identities k in {1, 2, 3} of P_k^2 + P_{k+3}^2 = P_{k+6}^2 + P_{k+9}^2
    and replaces the left pair of operators with the right pair.
    ``expand`` (sphere15 only) lists (operator name, party) slots whose identity
    factor is replaced by the three axes of the frame built on ``axis``; the
    new operators are appended after the remaining ones.

    The result is checked on ``check_samples`` random product states.
    """
    if base_id not in ("sphere15", "cone7"):
        raise ValueError("spherical variants derive from 'sphere15' or 'cone7'")
    swaps = tuple(sorted(set(swaps)))
    if any(k not in _SWAP_PAIRS for k in swaps):
        raise ValueError(f"swap selectors must be in {{1, 2, 3}}, got {swaps}")
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1) > 1e-12:
        raise ValueError("axis must be a unit 3-vector")
    base = family(base_id)
    if not swaps and not expand:
        return base
    if expand and base_id != "sphere15":
        raise ValueError("identity replacement applies to sphere15 only")

    names = list(base.names)
    ops = list(base.operators)
    for k in swaps:
        (old1, old2), (new1, new2) = _SWAP_PAIRS[k]
        for old, new in ((old1, new1), (old2, new2)):
            i = names.index(old)
            names[i], ops[i] = new, _SHARED[new]

    frame = _frame(axis)
    targets: dict[str, list[int]] = {}
    for name, party in expand:
        if name not in ("Q13", "Q14", "Q15"):
            raise ValueError(f"identity replacement targets Q13, Q14 or Q15, got {name!r}")
        targets.setdefault(name, []).append(int(party))
    appended_names, appended_ops = [], []
    next_index = 16
    for name in ("Q13", "Q14", "Q15"):
        if name not in targets:
            continue
        i = names.index(name)
        polys = [ops[i]]
        for party in sorted(set(targets[name])):
            if ops[i].keys() and next(iter(ops[i]))[party - 1] != "I":
                raise ValueError(f"{name} has no identity at party {party}")
            polys = [_replace_identity(p, party, e) for p in polys for e in frame]
        for p in polys:
            appended_names.append(f"Q{next_index}")
            appended_ops.append(p)
            next_index += 1
        del names[i], ops[i]
    names += appended_names
    ops += appended_ops

    if base.kind == "cone":
        blocks = tuple(ConstraintBlock("cone", tuple(range(6)), apex=6, sign=s) for s in (1, -1))
    else:
        blocks = (ConstraintBlock("ball", tuple(range(len(ops)))),)
    tag = []
    if swaps:
        tag.append("swap=" + ",".join(map(str, swaps)))
    if expand:
        tag.append("expand=" + ",".join(f"{n}@{p}" for n, p in expand))
        tag.append("axis=" + ",".join(f"{x:.6g}" for x in axis))
    fam = FeasibleRegionFamily(
        f"{base_id}[{';'.join(tag)}]",
        base.kind,
        tuple(names),
        tuple(ops),
        blocks,
        notes=f"variant of {base_id}",
        base=base_id,
    )
    if check_samples:
        rng = np.random.default_rng(seed)
        th, ph = sample_product_angles(check_samples, rng)
        ok, margins = membership_batch(fam, fr_points_batch(fam, th, ph))
        if not ok.all():
            raise ValueError(f"variant {fam.id} fails containment (worst slack {margins.min():.3g})")
    return fam


def enumerate_variant_selectors(base_id: str) -> list[dict]:
    """Every swap subset (and, for sphere15, identity-slot subset) the generator accepts."""
    swap_sets = [s for r in range(4) for s in itertools.combinations((1, 2, 3), r)]
    if base_id == "cone7":
        return [{"swaps": s, "expand": ()} for s in swap_sets]
    slots = (("Q13", 1), ("Q14", 1), ("Q15", 1), ("Q15", 3))
    slot_sets = [s for r in range(5) for s in itertools.combinations(slots, r)]
    return [{"swaps": s, "expand": e} for e in slot_sets for s in swap_sets]


_BUILDERS = {
    "polygon6": _polygon6,
    "sphere9": _sphere9,
    "cone7": _cone7,
    "sphere15": _sphere15,
    "caseA16": _caseA16,
    "caseB9": _caseB9,
}

CATALOG = ("polygon6", "sphere9", "cone7", "sphere15", "sphere15_v41", "caseA16", "caseB9")

ALIASES = {
    "polygon": "polygon6",
    "sphere": "sphere9",
    "cone": "cone7",
    "caseA": "caseA16",
    "caseB": "caseB9",
}

_cache: dict[str, FeasibleRegionFamily] = {}


def parse_variant_id(fid: str) -> dict:
    """Invert the id format ``base[swap=1,2;expand=Q13@1;axis=x,y,z]``."""
    base, _, body = fid.partition("[")
    kw: dict = {"base_id": base}
    for part in filter(None, body[:-1].split(";")):
        key, _, val = part.partition("=")
        if key == "swap":
            kw["swaps"] = [int(v) for v in val.split(",")]
        elif key == "expand":
            kw["expand"] = [(n, int(q)) for n, q in (item.split("@") for item in val.split(","))]
        elif key == "axis":
            axis = np.array([float(v) for v in val.split(",")])
            kw["axis"] = axis / np.linalg.norm(axis)
        else:
            raise ValueError(f"unknown variant field {key!r} in {fid!r}")
    return kw


def family(fid: str) -> FeasibleRegionFamily:
    """Catalog lookup; accepts the short aliases polygon, sphere, cone, caseA, caseB."""
    fid = ALIASES.get(fid, fid)
    if fid in _cache:
        return _cache[fid]
    if fid in _BUILDERS:
        fam = _BUILDERS[fid]()
    elif fid == "sphere15_v41":
        fam = replace(spherical_variant("sphere15", expand=[("Q13", 1)]), id="sphere15_v41")
    elif "[" in fid and fid.endswith("]"):
        fam = spherical_variant(**parse_variant_id(fid))
    else:
        raise ValueError(f"unknown family {fid!r}; catalog: {', '.join(CATALOG)}")
    _cache[fid] = fam
    return fam


# --- FR points and membership ---------------------------------------------


def sample_product_angles(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Uniformly distributed product states: theta = arccos(U[-1, 1]), phi = U[0, 2 pi)."""
    theta = np.arccos(rng.uniform(-1.0, 1.0, size=(n, 3)))
    phi = rng.uniform(0.0, 2 * np.pi, size=(n, 3))
    return theta, phi


def fr_points_batch(fam: FeasibleRegionFamily, theta, phi) -> np.ndarray:
    theta = np.atleast_2d(theta)
    phi = np.atleast_2d(phi)
    return np.stack([expectation_batch(q, theta, phi) for q in fam.operators], axis=-1)


def fr_point(fam: FeasibleRegionFamily, nu: ProductStateAngles) -> np.ndarray:
    return fr_points_batch(fam, np.array([nu.theta]), np.array([nu.phi]))[0]


def fr_point_of_state(fam: FeasibleRegionFamily, rho: np.ndarray) -> np.ndarray:
    from .states import state_expectations

    return state_expectations(rho, fam.operators)


def membership_batch(fam: FeasibleRegionFamily, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(inside flags of shape (N,), slacks of shape (N, n_blocks))."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[-1] != fam.dim:
        raise ValueError(f"point dimension {points.shape[-1]} does not match family {fam.id} ({fam.dim})")
    slacks = np.stack([b.slack(points) for b in fam.blocks], axis=-1)
    return np.all(slacks >= -SLACK_TOL, axis=-1), slacks


def membership(fam: FeasibleRegionFamily, point) -> tuple[bool, list[float]]:
    point = np.asarray(point, dtype=float)
    if point.ndim != 1:
        raise ValueError("membership expects a single point")
    ok, slacks = membership_batch(fam, point[None, :])
    return bool(ok[0]), [float(s) for s in slacks[0]]


# --- analytic support -----------------------------------------------------


@dataclass(frozen=True)
class SupportBound:
    """h(a) = max a.P over the family's blocks.

    ``tight`` is True when the value is provably attained by a product state,
    False when it only bounds the product-state maximum from above.
    """

    value: float
    tight: bool
    method: str
    exact: float | None = None
    ledger: dict = field(default_factory=dict)


def check_ties(fam: FeasibleRegionFamily, a: np.ndarray) -> None:
    for i, j in fam.ties:
        if abs(a[i] - a[j]) > TIE_TOL * max(1.0, abs(a[i]), abs(a[j])):
            raise ValueError(
                f"family {fam.id} requires {fam.names[i]} and {fam.names[j]} coefficients to be equal "
                f"(got {a[i]!r}, {a[j]!r})"
            )


@functools.lru_cache(maxsize=1)
def _polygon_corner_points() -> np.ndarray:
    """polygon6 coordinates of the 216 products of single-qubit Pauli eigenstates."""
    single = [(0.0, 0.0), (np.pi, 0.0), (np.pi / 2, 0.0), (np.pi / 2, np.pi),
              (np.pi / 2, np.pi / 2), (np.pi / 2, 3 * np.pi / 2)]  # fmt: skip
    combos = list(itertools.product(single, repeat=3))
    theta = np.array([[c[q][0] for q in range(3)] for c in combos])
    phi = np.array([[c[q][1] for q in range(3)] for c in combos])
    return fr_points_batch(family("polygon6"), theta, phi)


def polygon_lp_support(a: np.ndarray) -> float:
    """max a.P over the 32 polygon half-spaces and the box |P_i| <= 1."""
    res = linprog(
        -np.asarray(a, dtype=float),
        A_ub=np.array(polygon_sign_patterns(), dtype=float),
        b_ub=np.ones(32),
        bounds=[(-1.0, 1.0)] * 6,
        method="highs",
    )
    if res.status != 0:
        raise RuntimeError(f"polygon LP failed: {res.message}")
    return float(-res.fun)


def sphere_ledger(a: Sequence[float], pairs=SPHERE9_PAIRS) -> dict:
    """Slacks R - (A_i +- A_j)^2 of the cut-plane conditions, R = sum A_i^2."""
    a = np.asarray(a, dtype=float)
    R = float(np.dot(a, a))
    slacks = {}
    for i, j in pairs:
        slacks[f"A{i + 1}+A{j + 1}"] = R - (a[i] + a[j]) ** 2
        slacks[f"A{i + 1}-A{j + 1}"] = R - (a[i] - a[j]) ** 2
    return {"R": R, "slacks": slacks, "satisfied": all(v >= -1e-12 for v in slacks.values())}


def _first_six_sigma(a6: np.ndarray) -> float:
    """Largest singular value of [[a1, a2, a3], [a4, a5, a6]]."""
    return float(np.linalg.svd(np.asarray(a6).reshape(2, 3), compute_uv=False)[0])


def sphere_exact_support(a: Sequence[float]) -> float:
    """Product-state maximum of a.P for the sphere9 / sphere15 operator layout.

    Qubit-1 Bloch vector u, s = sin t2 sin t3: the first six coordinates give
    s (u.M1 cos d + u.M2 sin d) with independent phase d, so their joint
    maximum is s * sigma_max(M); the last three add sin t2 cos t3 (a7, a8)
    and cos t2 a9, giving sqrt(sigma_max^2 + a7^2 + a8^2 + a9^2).
    """
    a = np.asarray(a, dtype=float)
    return float(np.sqrt(_first_six_sigma(a[:6]) ** 2 + np.dot(a[6:9], a[6:9])))


def cone_exact_support(a: Sequence[float]) -> float:
    """Product-state maximum of a.P for the cone7 layout: max(|A13|, sigma_max)."""
    a = np.asarray(a, dtype=float)
    return max(abs(float(a[6])), _first_six_sigma(a[:6]))


def support_bound(fam: FeasibleRegionFamily, a: Sequence[float]) -> SupportBound:
    a = fam._coeffs(a)
    check_ties(fam, a)
    close = lambda x, y: abs(x - y) <= 1e-12 * max(1.0, abs(x))  # noqa: E731
    if fam.kind == "polygon":
        # the half-spaces only bound the region from outside; the LP value is
        # attained when some Pauli-eigenstate product reaches it
        h = polygon_lp_support(a)
        attained = float(np.max(_polygon_corner_points() @ a))
        return SupportBound(h, close(h, attained), "polygon LP", attained if close(h, attained) else None)
    if fam.kind == "sphere":
        h = float(np.linalg.norm(a))
        ledger = sphere_ledger(a) if fam.id == "sphere9" else {}
        if fam.exact_base:
            exact = sphere_exact_support(a)
            return SupportBound(h, close(h, exact), "ball norm", exact, ledger)
        return SupportBound(h, False, "ball norm", None, ledger)
    if fam.kind == "cone":
        n6 = float(np.linalg.norm(a[:6]))
        h = max(abs(float(a[6])), n6)
        if fam.exact_base:
            exact = cone_exact_support(a)
            return SupportBound(h, close(h, exact), "cone", exact)
        return SupportBound(h, abs(a[6]) >= n6 * (1 - 1e-12), "cone")
    if fam.kind == "caseA":
        norms = [float(np.hypot(a[0], a[2]))] + [float(np.linalg.norm(a[k:k + 4])) for k in (4, 8, 12)]
        nonzero = sum(n > 0 for n in norms)
        return SupportBound(float(sum(norms)), nonzero <= 1, "sum of block norms")
    if fam.kind == "caseB":
        norms = [float(np.linalg.norm(a[k:k + 3])) for k in (0, 3, 6)]
        return SupportBound(max(norms), True, "max of block norms")
    raise ValueError(f"no support rule for family kind {fam.kind!r}")


def separable_min_analytic(fam: FeasibleRegionFamily, a0: float, a: Sequence[float]) -> float:
    """Minimum of a0 + sum a_i P_i over the family's constraint set."""
    return float(a0) - support_bound(fam, a).value


"""Optimality certificates: product states in a witness kernel and the linear
systems showing no pure projector can be subtracted from the witness.

A witness W is optimal when no |psi><psi| can be removed from it while
keeping it a witness. Any such psi must be orthogonal to every product state
with <nu|W|nu> = 0, so kernel product states spanning the whole space (or
the relevant subspace) rule psi out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .pauli import PauliPolynomial, ProductStateAngles, expectation_product

RANK_CUTOFF = 1e-10
KERNEL_TOL = 1e-9

POLYGON_TERMS = ("ZZZ", "XXX", "XZY", "YXZ", "YYY", "ZYX")

# (theta, phi) of the +1 and -1 eigenstates of each Pauli letter
_EIGEN_ANGLES = {
    "Z": ((0.0, 0.0), (np.pi, 0.0)),
    "X": ((np.pi / 2, 0.0), (np.pi / 2, np.pi)),
    "Y": ((np.pi / 2, np.pi / 2), (np.pi / 2, 3 * np.pi / 2)),
}


@dataclass(frozen=True)
class KernelStateRecipe:
    description: str
    angles: ProductStateAngles
    term: str = ""

    def ket(self) -> np.ndarray:
        return self.angles.ket()


def polygon_signs(bits: Sequence[int]) -> tuple[int, ...]:
    bits = tuple(int(b) for b in bits)
    if len(bits) != 5 or any(b not in (0, 1) for b in bits):
        raise ValueError("polygonal witness index needs five bits i1..i5")
    return tuple((-1) ** b for b in bits) + ((-1) ** (sum(bits) + 1),)


def polygon_witness(bits: Sequence[int] = (0, 0, 0, 0, 0)) -> PauliPolynomial:
    """III + sum_k s_k T_k over ZZZ, XXX, XZY, YXZ, YYY, ZYX (a0 = a1 = 1)."""
    poly = PauliPolynomial.identity()
    for label, s in zip(POLYGON_TERMS, polygon_signs(bits)):
        poly = poly + PauliPolynomial({label: s})
    return poly


def sphere_angles(A: Sequence[float]) -> tuple[float, float]:
    """(psi1, psi2) with cos psi1 = A2 / |(A2, A3)| and cos psi2 = A1 / |A|."""
    A1, A2, A3 = (float(x) for x in A)
    if np.hypot(A2, A3) == 0:
        raise ValueError("A2 and A3 cannot both vanish")
    return float(np.arctan2(A3, A2)), float(np.arctan2(np.hypot(A2, A3), A1))


def sphere_witness(A: Sequence[float]) -> PauliPolynomial:
    """III + (A1 ZII + A2 (XXX + XYY) + A3 (YXY + YYX)) / |A|."""
    A1, A2, A3 = (float(x) for x in A)
    n = float(np.linalg.norm(A))
    return PauliPolynomial({"III": 1.0, "ZII": A1 / n, "XXX": A2 / n, "XYY": A2 / n, "YXY": A3 / n, "YYX": A3 / n})


def sphere_degenerate(A: Sequence[float], tol: float = 1e-12) -> bool:
    psi1, psi2 = sphere_angles(A)
    bad1 = any(abs(psi1 - v) < tol for v in (0.0, np.pi / 2, -np.pi / 2, np.pi, -np.pi))
    bad2 = any(abs(psi2 - v) < tol for v in (0.0, np.pi, -np.pi))
    return bad1 or bad2


# rows: (theta1 rule, phi1 sign, phi2, phi3); rule "minus" means psi2 - theta1 = pi
_NU_TABLE = (
    ("minus", 1, np.pi / 4, np.pi / 4),
    ("minus", -1, -np.pi / 4, -np.pi / 4),
    ("plus", 1, np.pi / 4, -3 * np.pi / 4),
    ("plus", -1, 3 * np.pi / 4, -np.pi / 4),
    ("minus", 1, 5 * np.pi / 4, -3 * np.pi / 4),
    ("minus", -1, 3 * np.pi / 4, -5 * np.pi / 4),
    ("plus", 1, -3 * np.pi / 4, np.pi / 4),
    ("plus", -1, -np.pi / 4, 3 * np.pi / 4),
)


def kernel_states(witness_id: str, **params) -> list[KernelStateRecipe]:
    """Closed-form product states with zero witness expectation.

    ``polygon`` (bits=i1..i5): for each of the six terms, the four product
    eigenstates of that term whose eigenvalue cancels the identity; every
    other term vanishes on them.
    ``sphere`` (A=(A1, A2, A3)): the eight angle recipes nu_1..nu_8.
    """
    out = []
    if witness_id == "polygon":
        signs = polygon_signs(params.get("bits", (0, 0, 0, 0, 0)))
        for label, s in zip(POLYGON_TERMS, signs):
            for e in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1), (1, 1, -1), (1, -1, 1), (-1, 1, 1), (-1, -1, -1)):
                if s * e[0] * e[1] * e[2] != -1:
                    continue
                th, ph = zip(*(_EIGEN_ANGLES[ch][0 if v == 1 else 1] for ch, v in zip(label, e)))
                desc = " ".join(f"|{ch.lower()};{'+' if v == 1 else '-'}>" for ch, v in zip(label, e))
                out.append(KernelStateRecipe(desc, ProductStateAngles(th, ph), label))
    elif witness_id == "sphere":
        psi1, psi2 = sphere_angles(params["A"])
        for k, (rule, s1, p2, p3) in enumerate(_NU_TABLE, start=1):
            t1 = psi2 - np.pi if rule == "minus" else np.pi - psi2
            nu = ProductStateAngles.normalized((t1, np.pi / 2, np.pi / 2), (s1 * psi1, p2, p3))
            out.append(KernelStateRecipe(f"nu_{k}", nu))
    else:
        raise ValueError(f"unknown witness id {witness_id!r}; expected 'polygon' or 'sphere'")
    return out


def witness_for(witness_id: str, **params) -> PauliPolynomial:
    if witness_id == "polygon":
        return polygon_witness(params.get("bits", (0, 0, 0, 0, 0)))
    if witness_id == "sphere":
        return sphere_witness(params["A"])
    raise ValueError(f"unknown witness id {witness_id!r}")


def numeric_rank(m: np.ndarray, cutoff: float = RANK_CUTOFF) -> int:
    if m.size == 0:
        return 0
    return int(np.sum(np.linalg.svd(m, compute_uv=False) > cutoff))


@dataclass(frozen=True)
class OrthogonalitySystem:
    matrix: np.ndarray
    columns: tuple[str, ...]
    rank: int
    null_dim: int
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "shape": list(self.matrix.shape),
            "columns": list(self.columns),
            "rank": self.rank,
            "null_dim": self.null_dim,
            "degenerate": self.degenerate,
        }


def _z_basis(bits: str) -> np.ndarray:
    v = np.zeros(8, dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def orthogonality_system(witness_id: str, **params) -> OrthogonalitySystem:
    """Linear system <nu_k|psi> = 0 over the amplitudes psi may still carry.

    polygon: psi lies in the span of the Z-basis states outside the ZZZ
    kernel (four amplitudes); rows are the XXX-kernel states.
    sphere: psi has all eight Z-basis amplitudes; rows are nu_1..nu_8.
    """
    if witness_id == "polygon":
        signs = polygon_signs(params.get("bits", (0, 0, 0, 0, 0)))
        cols = [b for b in ("000", "011", "101", "110", "001", "010", "100", "111")
                if signs[0] * (-1) ** b.count("1") == 1]  # fmt: skip
        rows = [r for r in kernel_states("polygon", **params) if r.term == "XXX"]
        m = np.array([[np.vdot(r.ket(), _z_basis(c)) for c in cols] for r in rows])
        labels = tuple("a_" + c.replace("0", "+").replace("1", "-") for c in cols)
        rank = numeric_rank(m)
        return OrthogonalitySystem(m, labels, rank, len(cols) - rank)
    if witness_id == "sphere":
        recipes = kernel_states("sphere", **params)
        m = np.array([r.ket().conj() for r in recipes])
        labels = tuple("a_" + format(i, "03b").replace("0", "+").replace("1", "-") for i in range(8))
        rank = numeric_rank(m)
        return OrthogonalitySystem(m, labels, rank, 8 - rank, sphere_degenerate(params["A"]))
    raise ValueError(f"unknown witness id {witness_id!r}")


def kernel_span_rank(w, states: Sequence, tol: float = KERNEL_TOL) -> int:
    """Rank of the span of kernel product states; raises if a state is not in the kernel."""
    poly = w if isinstance(w, PauliPolynomial) else w.polynomial()
    kets = []
    for s in states:
        nu = s.angles if isinstance(s, KernelStateRecipe) else s
        val = expectation_product(poly, nu)
        if abs(val) > tol:
            raise ValueError(f"state {nu} is not in the kernel: <nu|W|nu> = {val:.3g}")
        kets.append(nu.ket())
    return numeric_rank(np.array(kets)) if kets else 0


def optimality_certificate(witness_id: str, extra_states: Sequence = (), **params) -> dict:
    """JSON-ready summary: kernel size, span rank and the optimality verdict."""
    poly = witness_for(witness_id, **params)
    recipes = kernel_states(witness_id, **params)
    states = list(recipes) + list(extra_states)
    rank = kernel_span_rank(poly, states)
    system = orthogonality_system(witness_id, **params)
    degenerate = system.degenerate
    return {
        "witness": poly.to_terms(),
        "params": {k: list(v) for k, v in params.items()},
        "kernel_states": len(states),
        "span_rank": rank,
        "system": system.to_dict(),
        "optimal": bool(rank == 8 and system.null_dim == 0),
        "degenerate": bool(degenerate),
    }

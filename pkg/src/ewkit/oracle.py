"""Numeric ground truth: global minimum of a witness over pure product states,
numeric support values of feasible regions, and closed-form duality reports.

The minimization runs a batched BFGS with Armijo backtracking over the six
Bloch angles from a scrambled Sobol design plus the 216 Pauli-eigenstate
corners. By convexity, the minimum over pure product states equals the
minimum over all separable states.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from .pauli import PauliPolynomial, ProductStateAngles

DEFAULT_STARTS = 256
DEFAULT_SEED = 42
MAX_ITER = 200
GTOL = 1e-10


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox generator; every reproducible run goes through here."""
    return np.random.Generator(np.random.Philox(int(seed) & (2**64 - 1)))


# --- objective ------------------------------------------------------------


def objective(C: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values and angle gradients of sum C_ijk a_i b_j c_k at angle rows ``x`` (N, 6).

    a, b, c are the (1, Bloch vector) factors of the three qubits.
    """
    n = x.shape[0]
    th, ph = x[:, :3], x[:, 3:]
    st, ct, sp, cp = np.sin(th), np.cos(th), np.sin(ph), np.cos(ph)
    v = np.empty((n, 3, 4))
    v[..., 0] = 1.0
    v[..., 1] = st * cp
    v[..., 2] = st * sp
    v[..., 3] = ct
    a, b, c = v[:, 0], v[:, 1], v[:, 2]
    Cc = (c @ C.reshape(16, 4).T).reshape(n, 4, 4)  # C contracted with the third factor
    ga = np.einsum("nij,nj->ni", Cc, b)
    gb = np.einsum("nij,ni->nj", Cc, a)
    gc = np.einsum("nik,ni->nk", np.einsum("ijk,nj->nik", C, b), a)
    f = np.einsum("ni,ni->n", ga, a)
    partial = np.stack([ga, gb, gc], axis=1)  # (N, 3, 4)
    grad = np.empty((n, 6))
    grad[:, :3] = partial[..., 1] * ct * cp + partial[..., 2] * ct * sp - partial[..., 3] * st
    grad[:, 3:] = partial[..., 2] * st * cp - partial[..., 1] * st * sp
    return f, grad


def pauli_corners() -> np.ndarray:
    """Angles of the 6^3 products of single-qubit Pauli eigenstates."""
    single = [(0.0, 0.0), (np.pi, 0.0), (np.pi / 2, 0.0), (np.pi / 2, np.pi),
              (np.pi / 2, np.pi / 2), (np.pi / 2, 3 * np.pi / 2)]  # fmt: skip
    rows = []
    for s1 in single:
        for s2 in single:
            for s3 in single:
                rows.append([s1[0], s2[0], s3[0], s1[1], s2[1], s3[1]])
    return np.array(rows)


def start_points(starts: int, seed: int, corners: bool = True) -> np.ndarray:
    sobol = qmc.Sobol(d=6, scramble=True, seed=make_rng(seed))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)  # balance warning for non powers of two
        u = sobol.random(starts)
    x = u * np.array([np.pi] * 3 + [2 * np.pi] * 3)
    if corners:
        x = np.vstack([x, pauli_corners()])
    return x


def bfgs_batch(C: np.ndarray, x0: np.ndarray, max_iter: int = MAX_ITER, gtol: float = GTOL):
    """Independent BFGS runs, one per row of ``x0``; returns (x, f, |g|, best history)."""
    x = x0.copy()
    n, d = x.shape
    f, g = objective(C, x)
    H = np.broadcast_to(np.eye(d), (n, d, d)).copy()
    history = [float(f.min())]
    active = np.linalg.norm(g, axis=1) >= gtol
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        xa, fa, ga, Ha = x[idx], f[idx], g[idx], H[idx]
        p = -np.einsum("nij,nj->ni", Ha, ga)
        slope = np.einsum("ni,ni->n", ga, p)
        bad = slope >= 0
        if bad.any():  # reset curvature where the direction is not a descent direction
            Ha[bad] = np.eye(d)
            p[bad] = -ga[bad]
            slope[bad] = -np.einsum("ni,ni->n", ga[bad], ga[bad])
        t = np.ones(len(idx))
        pending = np.ones(len(idx), dtype=bool)
        f_new = fa.copy()
        g_new = ga.copy()
        for _ls in range(30):
            j = np.nonzero(pending)[0]
            if j.size == 0:
                break
            ft, gt = objective(C, xa[j] + t[j, None] * p[j])
            ok = ft <= fa[j] + 1e-4 * t[j] * slope[j]
            f_new[j[ok]], g_new[j[ok]] = ft[ok], gt[ok]
            pending[j[ok]] = False
            t[j[~ok]] *= 0.5
        moved = ~pending
        s = t[:, None] * p
        s[~moved] = 0.0
        xa = xa + s
        y = g_new - ga
        sy = np.einsum("ni,ni->n", s, y)
        upd = moved & (sy > 1e-16)
        if upd.any():
            rho = 1.0 / sy[upd]
            Hu = Ha[upd]
            su, yu = s[upd], y[upd]
            Hy = np.einsum("nij,nj->ni", Hu, yu)
            yHy = np.einsum("ni,ni->n", yu, Hy)
            Hu = (
                Hu
                - rho[:, None, None] * (np.einsum("ni,nj->nij", su, Hy) + np.einsum("ni,nj->nij", Hy, su))
                + (rho**2 * yHy + rho)[:, None, None] * np.einsum("ni,nj->nij", su, su)
            )
            Ha[upd] = Hu
        x[idx], f[idx], g[idx], H[idx] = xa, f_new, g_new, Ha
        gn = np.linalg.norm(g_new, axis=1)
        # a failed line search or a decrease at rounding level ends the start
        progress = fa - f_new > 1e-15 * (1.0 + np.abs(fa))
        still = moved & progress & (gn >= gtol)
        active[idx] = still
        history.append(float(f.min()))
    return x, f, np.linalg.norm(g, axis=1), history


@dataclass(frozen=True)
class OracleResult:
    minimum: float
    argmin: ProductStateAngles
    starts: int
    converged: bool
    grad_norm: float
    seed: int
    history: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "minimum": self.minimum,
            "argmin": {"theta": list(self.argmin.theta), "phi": list(self.argmin.phi)},
            "starts": self.starts,
            "converged": self.converged,
            "grad_norm": self.grad_norm,
            "seed": self.seed,
            "history": self.history,
        }


def _as_polynomial(target) -> PauliPolynomial:
    if isinstance(target, PauliPolynomial):
        return target
    poly = getattr(target, "polynomial", None)
    if callable(poly):
        return poly()
    raise TypeError(f"cannot minimize object of type {type(target).__name__}")


def separable_min_numeric(target, starts: int = DEFAULT_STARTS, seed: int = DEFAULT_SEED,
                          corners: bool = True, max_iter: int = MAX_ITER) -> OracleResult:
    """Multi-start minimum of <nu|W|nu> over pure product states.

    ``target`` is a PauliPolynomial or anything with a ``polynomial()`` method
    (a Witness). Deterministic for a fixed seed; the first ``n`` Sobol starts
    are shared by every run with ``starts >= n``.
    """
    if starts < 1:
        raise ValueError("starts must be >= 1")
    poly = _as_polynomial(target)
    C = poly.coefficient_tensor()
    x0 = start_points(starts, seed, corners)
    x, f, gn, history = bfgs_batch(C, x0, max_iter=max_iter)
    # the unpolished starting values are part of the search as well
    f0, _ = objective(C, x0)
    k = int(np.argmin(f))
    best_x = x[k]
    if f0.min() < f[k]:
        k0 = int(np.argmin(f0))
        best_x, best_f, best_g = x0[k0], float(f0[k0]), float("nan")
    else:
        best_f, best_g = float(f[k]), float(gn[k])
    nu = ProductStateAngles.normalized(best_x[:3], best_x[3:])
    converged = bool(np.isfinite(best_g) and best_g < 1e-7)
    return OracleResult(best_f, nu, len(x0), converged, best_g, int(seed), history)


def fr_support_numeric(fam, direction: Sequence[float], starts: int = DEFAULT_STARTS,
                       seed: int = DEFAULT_SEED) -> float:
    """max over product states of sum d_i Tr(Q_i rho); a lower bound on the true support."""
    poly = fam.combine(0.0, direction)
    return -separable_min_numeric(-poly, starts=starts, seed=seed).minimum


# --- duality --------------------------------------------------------------


@dataclass(frozen=True)
class DualityReport:
    problem: str
    primal: float
    dual: float
    multiplier: float

    @property
    def gap(self) -> float:
        return self.primal - self.dual

    def to_dict(self) -> dict:
        return {"problem": self.problem, "primal": self.primal, "dual": self.dual,
                "gap": self.gap, "multiplier": self.multiplier}


def sphere_duality(a: Sequence[float]) -> DualityReport:
    """min a.P over the unit ball against its Lagrange dual.

    g(lam) = -lam - |a|^2 / (4 lam), maximized at lam = |a|/2.
    """
    a = np.asarray(a, dtype=float)
    norm2 = float(np.dot(a, a))
    if norm2 == 0:
        raise ValueError("zero coefficient vector has no unique multiplier")
    lam = np.sqrt(norm2) / 2
    primal = -np.sqrt(norm2)
    dual = -lam - norm2 / (4 * lam)
    return DualityReport("sphere_primal", float(primal), float(dual), float(lam))


def envelope_duality(q: Sequence[float], a0: float = 1.0, r0: float = 1.0) -> DualityReport:
    """min a0 r0 + A.q subject to |A|^2 <= a0^2, against its dual.

    g(mu) = a0 r0 - mu a0^2 - |q|^2 / (4 mu), maximized at mu = |q| / (2 a0).
    """
    q = np.asarray(q, dtype=float)
    norm2 = float(np.dot(q, q))
    if norm2 == 0 or a0 <= 0:
        raise ValueError("envelope duality needs nonzero q and a0 > 0")
    mu = np.sqrt(norm2) / (2 * a0)
    primal = a0 * (r0 - np.sqrt(norm2))
    dual = a0 * r0 - mu * a0**2 - norm2 / (4 * mu)
    return DualityReport("envelope", float(primal), float(dual), float(mu))


def duality_report(problem: str, **kw) -> DualityReport:
    if problem == "sphere_primal":
        return sphere_duality(kw["a"])
    if problem == "envelope":
        return envelope_duality(kw["q"], kw.get("a0", 1.0), kw.get("r0", 1.0))
    raise ValueError(f"unknown duality problem {problem!r}")

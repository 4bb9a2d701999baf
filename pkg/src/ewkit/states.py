"""Named three-qubit density matrices, partial transposes and PPT checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path
from typing import Sequence

import numpy as np

from .pauli import DIM, PauliPolynomial, ProductStateAngles, pauli_matrix, realize_matrix

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
PPT_TOL = 1e-10

_K0 = np.array([1.0, 0.0], dtype=complex)
_K1 = np.array([0.0, 1.0], dtype=complex)
_KP = (_K0 + _K1) / np.sqrt(2)
_KM = (_K0 - _K1) / np.sqrt(2)


def ket(*factors) -> np.ndarray:
    return reduce(np.kron, factors)


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def basis_ket(bits: str) -> np.ndarray:
    """Computational basis ket, e.g. ``basis_ket("011")``."""
    return ket(*(_K0 if b == "0" else _K1 for b in bits))


UPB_VECTORS = (
    ket(_K0, _K1, _KP),
    ket(_K1, _KP, _K0),
    ket(_KP, _K0, _K1),
    ket(_KM, _KM, _KM),
)

W_KET = (basis_ket("001") + basis_ket("010") + basis_ket("100")) / np.sqrt(3)
W_BAR_KET = (basis_ket("110") + basis_ket("101") + basis_ket("011")) / np.sqrt(3)


def ghz_ket(sign: int = 1) -> np.ndarray:
    if sign not in (1, -1):
        raise ValueError("GHZ sign must be +1 or -1")
    return (basis_ket("000") + sign * basis_ket("111")) / np.sqrt(2)


def min_eigenvalue(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])


def check_density(rho, hermitian_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL, psd_tol=PSD_TOL) -> np.ndarray:
    """Return ``rho`` as a complex array or raise ValueError if it is not a density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (DIM, DIM):
        raise ValueError(f"expected {DIM}x{DIM} matrix, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > hermitian_tol:
        raise ValueError("matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > trace_tol:
        raise ValueError(f"trace is {np.trace(rho).real:.15g}, expected 1")
    lam = min_eigenvalue(rho)
    if lam < -psd_tol:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {lam:.3g})")
    return rho


def product_density(nu: ProductStateAngles) -> np.ndarray:
    return projector(nu.ket())


# --- parameterized PPT families -------------------------------------------

FAMILY_65_OPERATORS: tuple[PauliPolynomial, ...] = (
    PauliPolynomial({"IZZ": 1}),
    PauliPolynomial({"ZXX": 1, "ZYY": 1}),
    PauliPolynomial({"XXX": 1, "XYY": 1}),
    PauliPolynomial({"YXX": 1, "YYY": 1}),
    PauliPolynomial({"ZXY": 1, "ZYX": 1}),
    PauliPolynomial({"XXY": 1, "XYX": 1}),
    PauliPolynomial({"YXY": 1, "YYX": 1}),
)

FAMILY_72_LABELS = ("XXX", "YXX", "ZXX", "XYY", "YYY", "ZYY", "XZZ", "YZZ", "ZZZ")
FAMILY_72_OPERATORS = tuple(PauliPolynomial({lab: 1}) for lab in FAMILY_72_LABELS)

PPT_FAMILIES = {"7.65": FAMILY_65_OPERATORS, "7.72": FAMILY_72_OPERATORS}


@dataclass(frozen=True)
class PptFamilyParams:
    """Coefficients r_1..r_n of one of the two parameterized PPT families.

    ``7.65``: rho = (III + r1 IZZ + r2 Z(XX+YY) + r3 X(XX+YY) + r4 Y(XX+YY)
    + r5 Z(XY+YX) + r6 X(XY+YX) + r7 Y(XY+YX)) / 8.

    ``7.72``: rho = (III + sum_i r_i L_i) / 8 over the nine labels
    XXX YXX ZXX XYY YYY ZYY XZZ YZZ ZZZ.
    """

    family: str
    r: tuple[float, ...]

    def __post_init__(self):
        if self.family not in PPT_FAMILIES:
            raise ValueError(f"unknown PPT family {self.family!r}; expected one of {sorted(PPT_FAMILIES)}")
        r = tuple(float(x) for x in self.r)
        if len(r) != len(PPT_FAMILIES[self.family]):
            raise ValueError(f"family {self.family} takes {len(PPT_FAMILIES[self.family])} coefficients, got {len(r)}")
        object.__setattr__(self, "r", r)

    @property
    def R1(self) -> float:
        self._need_65()
        return float(np.linalg.norm(self.r[1:4]))

    @property
    def R2(self) -> float:
        self._need_65()
        return float(np.linalg.norm(self.r[4:7]))

    def _need_65(self):
        if self.family != "7.65":
            raise AttributeError("block norms R1, R2 are defined for family 7.65 only")

    def polynomial(self) -> PauliPolynomial:
        poly = PauliPolynomial.identity(1 / DIM)
        for ri, op in zip(self.r, PPT_FAMILIES[self.family]):
            poly = poly + op * (ri / DIM)
        return poly

    def matrix(self) -> np.ndarray:
        return realize_matrix(self.polynomial())


def ppt_closed_form(params: PptFamilyParams, tol: float = 1e-9) -> tuple[bool, list[float]]:
    """Closed-form PPT conditions of the two families.

    Family 7.65 returns the eight values 1 +- r1 +- 2 R_k (k = 1, 2); family 7.72
    returns the eight values (1 +- |v|)/8 for the four signed block sums v.
    The flag is true iff every value is >= -tol.
    """
    r = np.array(params.r)
    if params.family == "7.65":
        r1 = r[0]
        values = [
            1 + s1 * r1 + s2 * 2 * R
            for R in (params.R1, params.R2)
            for s1 in (1, -1)
            for s2 in (1, -1)
        ]
    else:
        a, b, c = r[0:3], r[3:6], r[6:9]
        values = []
        for v in (a + b - c, a - b + c, -a + b + c, a + b + c):
            n = float(np.linalg.norm(v))
            values += [(1 + n) / 8, (1 - n) / 8]
    values = [float(v) for v in values]
    return all(v >= -tol for v in values), values


# --- named states ---------------------------------------------------------


@dataclass(frozen=True)
class NamedState:
    name: str
    rho: np.ndarray = field(repr=False)
    params: dict = field(default_factory=dict)
    positive: bool = True


def upb_state() -> np.ndarray:
    return (np.eye(DIM) - sum(projector(v) for v in UPB_VECTORS)) / 4


def w_mixture(p: float) -> np.ndarray:
    if not 0 <= p <= 1:
        raise ValueError(f"mixing parameter p must be in [0, 1], got {p}")
    return (1 - p) / DIM * np.eye(DIM) + p * projector(W_KET)


def ghz_w_mixture(sign: int = 1) -> np.ndarray:
    return projector(ghz_ket(sign)) / 4 + 3 / 8 * (projector(W_KET) + projector(W_BAR_KET))


def named_state(name: str, **params) -> NamedState:
    """Build one of the catalog states.

    Names: ``upb``, ``w_mix`` (p), ``ghz_w`` (sign, default +1), ``ghz``
    (sign), ``w``, ``mixed``, ``ppt_f1`` (r, 7 values), ``ppt_f2`` (r, 9 values).
    PPT-family matrices that fail positivity are returned with
    ``positive=False`` instead of raising.
    """
    if name == "upb":
        rho = upb_state()
    elif name == "w_mix":
        p = float(params.get("p", 1.0))
        params = {"p": p}
        rho = w_mixture(p)
    elif name == "ghz_w":
        sign = int(params.get("sign", 1))
        params = {"sign": sign}
        rho = ghz_w_mixture(sign)
    elif name == "ghz":
        sign = int(params.get("sign", 1))
        params = {"sign": sign}
        rho = projector(ghz_ket(sign))
    elif name == "w":
        rho = projector(W_KET)
    elif name == "mixed":
        rho = np.eye(DIM, dtype=complex) / DIM
    elif name in ("ppt_f1", "ppt_f2"):
        fam = "7.65" if name == "ppt_f1" else "7.72"
        pp = PptFamilyParams(fam, tuple(params["r"]))
        rho = pp.matrix()
        return NamedState(name, rho, {"r": list(pp.r)}, min_eigenvalue(rho) >= -PSD_TOL)
    else:
        raise ValueError(f"unknown state {name!r}")
    return NamedState(name, check_density(rho), params, True)


# --- partial transpose ----------------------------------------------------


def partial_transpose(rho: np.ndarray, party: int) -> np.ndarray:
    """Transpose the 2-dimensional factor of ``party`` (1, 2 or 3)."""
    if party not in (1, 2, 3):
        raise ValueError("party must be 1, 2 or 3")
    t = np.asarray(rho).reshape([2] * 6)
    axes = list(range(6))
    i = party - 1
    axes[i], axes[i + 3] = axes[i + 3], axes[i]
    return t.transpose(axes).reshape(DIM, DIM)


@dataclass(frozen=True)
class PptReport:
    """Minimum eigenvalue of the partial transpose for the cuts 1|23, 2|13, 3|12."""

    min_eigenvalues: tuple[float, float, float]
    tol: float = PPT_TOL

    @property
    def ppt(self) -> bool:
        return all(v >= -self.tol for v in self.min_eigenvalues)

    def to_dict(self) -> dict:
        return {
            "bipartitions": ["1|23", "2|13", "3|12"],
            "min_eigenvalues": list(self.min_eigenvalues),
            "tol": self.tol,
            "ppt": self.ppt,
        }


def is_ppt(rho: np.ndarray, tol: float = PPT_TOL) -> PptReport:
    return PptReport(tuple(min_eigenvalue(partial_transpose(rho, k)) for k in (1, 2, 3)), tol)


# --- state files ----------------------------------------------------------


def state_from_json(obj: dict) -> np.ndarray:
    """Decode ``{"pauli": [{"label", "coeff"}, ...]}`` or ``{"dense": [[re, im] x 64]}``."""
    if "pauli" in obj:
        rho = realize_matrix(PauliPolynomial.from_terms(obj["pauli"]))
    elif "dense" in obj:
        entries = np.asarray(obj["dense"], dtype=float)
        if entries.shape != (DIM * DIM, 2):
            raise ValueError(f"dense state needs {DIM * DIM} [re, im] pairs, got shape {entries.shape}")
        rho = (entries[:, 0] + 1j * entries[:, 1]).reshape(DIM, DIM)
    else:
        raise ValueError("state file must contain a 'pauli' or 'dense' key")
    return check_density(rho)


def state_to_json(rho: np.ndarray, form: str = "dense") -> dict:
    rho = np.asarray(rho, dtype=complex)
    if form == "dense":
        return {"dense": [[float(z.real), float(z.imag)] for z in rho.ravel()]}
    from .pauli import expand_density

    return {"pauli": expand_density(rho).to_terms()}


def load_state_file(path: str | Path) -> np.ndarray:
    with open(path) as fh:
        return state_from_json(json.load(fh))


def pauli_coefficient(rho: np.ndarray, label: str) -> float:
    """Tr(sigma_label rho)."""
    return float(np.real(np.trace(pauli_matrix(label) @ rho)))


def state_expectations(rho: np.ndarray, operators: Sequence[PauliPolynomial]) -> np.ndarray:
    """q_i = Tr(Q_i rho) for each operator."""
    rho = np.asarray(rho)
    return np.array([float(np.real(np.trace(realize_matrix(q) @ rho))) for q in operators])

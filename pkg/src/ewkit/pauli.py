"""Three-qubit Pauli strings: dense realization, Hilbert-Schmidt expansion and
factorized expectation values on product states.

Basis order is the computational basis |abc> in lexicographic order with qubit 1
as the most significant bit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping

import numpy as np

N_QUBITS = 3
DIM = 2**N_QUBITS
LETTERS = "IXYZ"
ZERO_CUTOFF = 1e-15

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

ALL_LABELS: tuple[str, ...] = tuple("".join(t) for t in itertools.product(LETTERS, repeat=N_QUBITS))


def check_label(label: str) -> str:
    if len(label) != N_QUBITS or any(ch not in LETTERS for ch in label):
        raise ValueError(f"invalid Pauli label {label!r}: need {N_QUBITS} letters from {LETTERS}")
    return label


class PauliPolynomial(Mapping[str, float]):
    """Real-weighted sum of three-qubit Pauli strings.

    Immutable. Coefficients with magnitude below 1e-15 are dropped on
    construction so that equal operators compare equal.

    >>> w = PauliPolynomial({"III": 1.0, "XXX": 0.5})
    >>> (w + w)["XXX"]
    1.0
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[str, float] | Iterable[tuple[str, float]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[str, float] = {}
        for label, coeff in items:
            check_label(label)
            c = complex(coeff)
            if abs(c.imag) > 0:
                raise ValueError(f"coefficient of {label} must be real, got {coeff!r}")
            acc[label] = acc.get(label, 0.0) + float(c.real)
        self._terms = {k: v for k, v in sorted(acc.items()) if abs(v) >= ZERO_CUTOFF}

    @classmethod
    def single(cls, label: str, coeff: float = 1.0) -> "PauliPolynomial":
        return cls({label: coeff})

    @classmethod
    def identity(cls, coeff: float = 1.0) -> "PauliPolynomial":
        return cls({"I" * N_QUBITS: coeff})

    def __getitem__(self, label: str) -> float:
        return self._terms[label]

    def get(self, label, default=0.0):
        return self._terms.get(label, default)

    def __iter__(self):
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v:+.6g}" for k, v in self._terms.items())
        return f"PauliPolynomial({{{body}}})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __add__(self, other: "PauliPolynomial") -> "PauliPolynomial":
        if not isinstance(other, PauliPolynomial):
            return NotImplemented
        return PauliPolynomial(itertools.chain(self._terms.items(), other._terms.items()))

    def __neg__(self) -> "PauliPolynomial":
        return self * -1.0

    def __sub__(self, other: "PauliPolynomial") -> "PauliPolynomial":
        return self + (-other)

    def __mul__(self, scalar: float) -> "PauliPolynomial":
        s = float(scalar)
        return PauliPolynomial({k: s * v for k, v in self._terms.items()})

    __rmul__ = __mul__

    def isclose(self, other: "PauliPolynomial", atol: float = 1e-12) -> bool:
        labels = set(self) | set(other)
        return all(abs(self.get(k) - other.get(k)) <= atol for k in labels)

    def to_terms(self) -> list[dict]:
        """JSON-ready list ``[{"label": ..., "coeff": ...}]``."""
        return [{"label": k, "coeff": v} for k, v in self._terms.items()]

    @classmethod
    def from_terms(cls, terms: Iterable[Mapping]) -> "PauliPolynomial":
        return cls((t["label"], t["coeff"]) for t in terms)

    def coefficient_tensor(self) -> np.ndarray:
        """4x4x4 real tensor C with C[i, j, k] the coefficient of sigma_i sigma_j sigma_k."""
        out = np.zeros((4,) * N_QUBITS)
        for label, c in self._terms.items():
            out[tuple(LETTERS.index(ch) for ch in label)] = c
        return out


def pauli_matrix(label: str) -> np.ndarray:
    check_label(label)
    return reduce(np.kron, (_SINGLE[ch] for ch in label))


def realize_matrix(poly: PauliPolynomial) -> np.ndarray:
    """Dense 8x8 Hermitian matrix of ``poly``."""
    out = np.zeros((DIM, DIM), dtype=complex)
    for label, c in poly.items():
        out += c * pauli_matrix(label)
    return out


def hs_inner(a: PauliPolynomial, b: PauliPolynomial) -> float:
    """Tr(A B), computed label-wise as 8 * sum of coefficient products."""
    return DIM * sum(c * b.get(label) for label, c in a.items())


def pauli_expectations(rho: np.ndarray) -> dict[str, float]:
    """Tr(sigma_J rho) for all 64 labels."""
    rho = np.asarray(rho)
    return {label: float(np.real(np.trace(pauli_matrix(label) @ rho))) for label in ALL_LABELS}


def expand_density(rho: np.ndarray, atol: float = 1e-10) -> PauliPolynomial:
    """Expansion coefficients r_J = Tr(sigma_J rho)/8, so rho = sum_J r_J sigma_J.

    Raises ValueError for non-Hermitian or non-unit-trace input.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (DIM, DIM):
        raise ValueError(f"expected {DIM}x{DIM} matrix, got {rho.shape}")
    if not np.allclose(rho, rho.conj().T, atol=atol, rtol=0):
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise ValueError(f"density matrix trace is {np.trace(rho).real:.12g}, expected 1")
    return PauliPolynomial({k: v / DIM for k, v in pauli_expectations(rho).items()})


# --- product states -------------------------------------------------------


@dataclass(frozen=True)
class ProductStateAngles:
    """Bloch angles of a pure three-qubit product state.

    Qubit j is cos(theta_j/2)|0> + exp(i phi_j) sin(theta_j/2)|1>.
    """

    theta: tuple[float, float, float]
    phi: tuple[float, float, float]

    def __post_init__(self):
        theta = tuple(float(t) for t in self.theta)
        phi = tuple(float(p) for p in self.phi)
        if len(theta) != N_QUBITS or len(phi) != N_QUBITS:
            raise ValueError("need three theta and three phi values")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def normalized(cls, theta: Iterable[float], phi: Iterable[float]) -> "ProductStateAngles":
        """Fold arbitrary real angles into theta in [0, pi], phi in [0, 2 pi).

        The folded state equals the input state up to a global phase.
        """
        th_out, ph_out = [], []
        for t, p in zip(theta, phi):
            t = float(np.mod(t, 2 * np.pi))
            if t > np.pi:
                t = 2 * np.pi - t
                p = p + np.pi
            th_out.append(t)
            ph_out.append(float(np.mod(p, 2 * np.pi)))
        return cls(tuple(th_out), tuple(ph_out))

    def in_range(self) -> bool:
        return all(0 <= t <= np.pi for t in self.theta) and all(0 <= p < 2 * np.pi for p in self.phi)

    def as_array(self) -> np.ndarray:
        return np.array(self.theta + self.phi)

    @classmethod
    def from_array(cls, x) -> "ProductStateAngles":
        x = np.asarray(x, dtype=float)
        return cls(tuple(x[:3]), tuple(x[3:6]))

    def bloch_vectors(self) -> np.ndarray:
        """3x3 array, row j = (x, y, z) Bloch vector of qubit j."""
        return bloch_vectors(np.array(self.theta), np.array(self.phi))

    def ket(self) -> np.ndarray:
        th, ph = np.array(self.theta), np.array(self.phi)
        qubits = [np.array([np.cos(t / 2), np.exp(1j * p) * np.sin(t / 2)]) for t, p in zip(th, ph)]
        return reduce(np.kron, qubits)


def bloch_vectors(theta, phi) -> np.ndarray:
    """Bloch vectors for angle arrays of shape (..., 3); returns shape (..., 3, 3)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def _with_identity(bloch: np.ndarray) -> np.ndarray:
    ones = np.ones(bloch.shape[:-1] + (1,))
    return np.concatenate([ones, bloch], axis=-1)


def expectation_batch(poly: PauliPolynomial, theta, phi) -> np.ndarray:
    """<nu|poly|nu> for a batch of product states; theta, phi of shape (N, 3)."""
    v = _with_identity(bloch_vectors(theta, phi))
    return np.einsum("ijk,ni,nj,nk->n", poly.coefficient_tensor(), v[:, 0], v[:, 1], v[:, 2])


def expectation_product(poly: PauliPolynomial, nu: ProductStateAngles) -> float:
    """<nu|poly|nu> from per-qubit Bloch factors (sin t cos p, sin t sin p, cos t, 1 for I)."""
    b = nu.bloch_vectors()
    total = 0.0
    for label, c in poly.items():
        term = c
        for q, ch in enumerate(label):
            if ch != "I":
                term *= b[q, LETTERS.index(ch) - 1]
        total += term
    return float(total)

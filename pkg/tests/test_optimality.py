import itertools

import numpy as np
import pytest

from ewkit.optimality import (
    kernel_span_rank,
    kernel_states,
    numeric_rank,
    optimality_certificate,
    orthogonality_system,
    polygon_signs,
    polygon_witness,
    sphere_angles,
    sphere_degenerate,
    sphere_witness,
)
from ewkit.oracle import separable_min_numeric
from ewkit.pauli import PauliPolynomial, ProductStateAngles, expectation_product

ALL_BITS = list(itertools.product((0, 1), repeat=5))


def test_polygon_signs():
    assert polygon_signs((0, 0, 0, 0, 0)) == (1, 1, 1, 1, 1, -1)
    assert all(np.prod(polygon_signs(b)) == -1 for b in ALL_BITS)
    with pytest.raises(ValueError):
        polygon_signs((0, 1))


@pytest.mark.parametrize("bits", ALL_BITS[::5])
def test_polygon_kernel_states(bits):
    w = polygon_witness(bits)
    states = kernel_states("polygon", bits=bits)
    assert len(states) == 24
    for s in states:
        assert abs(expectation_product(w, s.angles)) <= 1e-9
    assert kernel_span_rank(w, states) == 8
    assert separable_min_numeric(w, starts=32).minimum >= -1e-9


@pytest.mark.parametrize("i1", [0, 1])
def test_polygon_orthogonality_system(i1):
    sys = orthogonality_system("polygon", bits=(i1, 0, 0, 0, 0))
    assert sys.matrix.shape == (4, 4)
    assert sys.rank == 4 and sys.null_dim == 0


@pytest.mark.parametrize("A", [(1, 1, 1), (1, 2, 0.5), (-0.3, 0.7, 1.1)])
def test_sphere_kernel_states(A):
    w = sphere_witness(A)
    states = kernel_states("sphere", A=A)
    assert len(states) == 8
    for s in states:
        assert abs(expectation_product(w, s.angles)) <= 1e-9
        assert s.angles.in_range()
    sys = orthogonality_system("sphere", A=A)
    assert sys.rank == 8 and sys.null_dim == 0 and not sys.degenerate


def test_sphere_angles():
    psi1, psi2 = sphere_angles((1, 1, 1))
    assert psi1 == pytest.approx(np.pi / 4)
    assert psi2 == pytest.approx(np.arccos(1 / np.sqrt(3)))
    with pytest.raises(ValueError):
        sphere_angles((1, 0, 0))


def test_degenerate_control():
    # psi1 = 0 when A3 = 0
    A = (1, 1, 0)
    assert sphere_degenerate(A)
    sys = orthogonality_system("sphere", A=A)
    assert sys.degenerate and sys.rank < 8


def test_oracle_kernel_state_matches_recipe():
    A = (1, 2, 0.5)
    res = separable_min_numeric(sphere_witness(A), seed=1)
    assert abs(res.minimum) < 1e-9
    overlaps = [abs(np.vdot(s.ket(), res.argmin.ket())) for s in kernel_states("sphere", A=A)]
    assert max(overlaps) == pytest.approx(1.0, abs=1e-6)


def test_span_rank_with_oracle_states():
    A = (1, 1, 1)
    w = sphere_witness(A)
    extra = [separable_min_numeric(w, starts=32, seed=s).argmin for s in range(3)]
    assert kernel_span_rank(w, list(kernel_states("sphere", A=A)) + extra, tol=1e-8) == 8


def test_span_rank_edge_cases():
    assert kernel_span_rank(PauliPolynomial.identity(2.0), []) == 0
    nu = ProductStateAngles((0, 0, 0), (0, 0, 0))
    with pytest.raises(ValueError):
        kernel_span_rank(PauliPolynomial.identity(2.0), [nu])


def test_rank_stable_under_tiny_perturbation():
    kets = np.array([s.ket() for s in kernel_states("sphere", A=(1, 1, 1))])
    noise = np.random.default_rng(0).normal(size=kets.shape) * 1e-12
    assert numeric_rank(kets + noise) == numeric_rank(kets) == 8
    sys = orthogonality_system("sphere", A=(1, 1, 0))
    assert numeric_rank(sys.matrix + 1e-12) == sys.rank


def test_certificates():
    cert = optimality_certificate("sphere", A=(1, 1, 1))
    assert cert["optimal"] and cert["span_rank"] == 8 and not cert["degenerate"]
    cert = optimality_certificate("polygon", bits=(1, 0, 1, 1, 0))
    assert cert["optimal"] and cert["kernel_states"] == 24
    assert not optimality_certificate("sphere", A=(1, 1, 0))["optimal"]
    with pytest.raises(ValueError):
        optimality_certificate("cone")

import numpy as np
import pytest

from quartic_waring.errors import DegenerateInput
from quartic_waring.numerics import (
    DEFAULT_TOL,
    Tolerance,
    det,
    eigenvalues,
    kernel_basis,
    matrix_rank,
    poly_roots,
)


def _sorted(zs):
    return sorted(np.round(np.asarray(zs, complex), 8), key=lambda z: (z.real, z.imag))


def test_roots_of_z_squared_minus_one():
    assert _sorted(poly_roots([1, 0, -1])) == _sorted([1, -1])


def test_double_root_at_zero():
    r = poly_roots([1, 0, 0])
    assert len(r) == 2 and np.allclose(r, 0)


def test_cubic_roots():
    assert _sorted(poly_roots([1, -2, -1, 2])) == _sorted([1, -1, 2])


def test_all_zero_coefficients_rejected():
    with pytest.raises(DegenerateInput):
        poly_roots([0, 0, 0])


def test_tolerance_ordering_enforced():
    with pytest.raises(ValueError):
        Tolerance(zero_eps=1e-6, rank_eps=1e-8, residual_eps=1e-4)


@pytest.mark.parametrize("deg", range(1, 9))
def test_roots_reproduce_monic_polynomial(rng, deg):
    for _ in range(20):
        c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
        c[0] = 1
        back = np.poly(poly_roots(c))
        assert np.abs(back - c).max() <= DEFAULT_TOL.residual_eps


def test_kernel_of_identity_is_empty():
    assert len(kernel_basis(np.eye(3))) == 0


def test_kernel_of_zero_map_is_everything():
    assert len(kernel_basis(np.zeros((2, 3)))) == 3


def test_kernel_of_pure_power_catalecticant():
    M = np.array([[24, 0, 0], [0, 0, 0], [0, 0, 0]], dtype=complex)
    assert len(kernel_basis(M)) == 2


def test_rank_det_eigenvalues():
    assert matrix_rank(np.eye(3)) == 3
    assert np.isclose(det(np.array([[0, 0, 2], [0, 4, 0], [2, 0, 0]])), -16)
    assert _sorted(eigenvalues(np.array([[0, 1], [1, 0]]))) == _sorted([1, -1])


def test_rank_nullity_and_orthonormal_kernel(rng):
    for _ in range(50):
        r = rng.integers(1, 5)
        M = (rng.standard_normal((6, r)) @ rng.standard_normal((r, 7))).astype(complex)
        K = np.asarray(kernel_basis(M))
        assert matrix_rank(M) + len(K) == 7
        assert np.linalg.norm(M @ K.T) <= DEFAULT_TOL.rank_eps * np.linalg.norm(M)
        assert np.allclose(K.conj() @ K.T, np.eye(len(K)), atol=DEFAULT_TOL.zero_eps)

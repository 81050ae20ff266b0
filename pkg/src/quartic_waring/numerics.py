"""Complex scalar arithmetic, root finding and dense linear algebra.

The base field is modeled by complex doubles.  Every decision of the form
"is this zero?" goes through a :class:`Tolerance`, so callers can tighten or
loosen the whole ladder in one place.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput


@dataclass(frozen=True)
class Tolerance:
    zero_eps: float = 1e-10
    rank_eps: float = 1e-8
    residual_eps: float = 1e-6

    def __post_init__(self):
        if not (0 < self.zero_eps <= self.rank_eps <= self.residual_eps < 1):
            raise ValueError(
                "need 0 < zero_eps <= rank_eps <= residual_eps < 1, got "
                f"{self.zero_eps}, {self.rank_eps}, {self.residual_eps}"
            )


DEFAULT_TOL = Tolerance()


def as_scalar(z) -> complex:
    z = complex(z)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise DegenerateInput(f"non-finite scalar {z!r}")
    return z


def check_finite(a, what="input"):
    a = np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(a)):
        raise DegenerateInput(f"{what} contains NaN or infinity")
    return a


def _polyval_with_derivative(coeffs, z):
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for c in coeffs:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def poly_roots(coeffs, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """All roots of ``coeffs[0] z^n + ... + coeffs[n]`` with multiplicity.

    Leading coefficients below ``zero_eps`` (relative to the coefficient
    scale) are dropped, so the result may have fewer than ``len(coeffs) - 1``
    entries; callers working projectively read the deficit as roots at
    infinity.  Roots are companion-matrix eigenvalues polished by one Newton
    step; roots closer than ``zero_eps`` are merged into a cluster.
    """
    c = check_finite(coeffs, "coefficients").ravel()
    if c.size == 0:
        raise DegenerateInput("empty coefficient list")
    scale = np.max(np.abs(c))
    if scale <= tol.zero_eps:
        raise DegenerateInput("all coefficients vanish")
    c = c / scale
    nz = np.flatnonzero(np.abs(c) > tol.zero_eps)
    c = c[nz[0]:]
    n = c.size - 1
    if n == 0:
        return np.zeros(0, dtype=complex)
    comp = np.zeros((n, n), dtype=complex)
    comp[0, :] = -c[1:] / c[0]
    comp[1:, :-1] = np.eye(n - 1)
    roots = np.linalg.eigvals(comp)

    p, dp = _polyval_with_derivative(c, roots)
    ok = np.abs(dp) > tol.zero_eps * (1 + np.abs(p))
    step = np.where(ok, p / np.where(ok, dp, 1), 0)
    cand = roots - step
    pc, _ = _polyval_with_derivative(c, cand)
    roots = np.where(np.abs(pc) <= np.abs(p), cand, roots)

    # merge clusters so that repeated roots come back identical
    out = roots.copy()
    used = np.zeros(n, dtype=bool)
    for i in range(n):
        if used[i]:
            continue
        close = np.abs(roots - roots[i]) <= tol.zero_eps * max(1.0, abs(roots[i]))
        close &= ~used
        out[close] = roots[close].mean()
        used |= close
    order = np.lexsort((out.imag, out.real))
    return out[order]


def _singular_values(m):
    return np.linalg.svd(m, compute_uv=False)


def _as_matrix(m):
    m = check_finite(m, "matrix")
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DegenerateInput(f"expected a nonempty matrix, got shape {m.shape}")
    return m


def numeric_rank_from_sv(s, tol: Tolerance = DEFAULT_TOL) -> int:
    if s.size == 0 or s[0] <= tol.zero_eps:
        return 0
    return int(np.sum(s > tol.rank_eps * s[0]))


def matrix_rank(matrix, tol: Tolerance = DEFAULT_TOL) -> int:
    m = _as_matrix(matrix)
    return numeric_rank_from_sv(_singular_values(m), tol)


def kernel_basis(matrix, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the numeric null space, one vector per row."""
    m = _as_matrix(matrix)
    _, s, vh = np.linalg.svd(m)
    r = numeric_rank_from_sv(s, tol)
    return vh[r:].conj()


def det(matrix) -> complex:
    m = _as_matrix(matrix)
    if m.shape[0] != m.shape[1]:
        raise DegenerateInput("determinant of a non-square matrix")
    return complex(np.linalg.det(m))


def eigenvalues(matrix) -> np.ndarray:
    m = _as_matrix(matrix)
    return np.linalg.eigvals(m)


def projective_distance(u, v) -> float:
    """Sine of the angle between the lines spanned by ``u`` and ``v``."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    c = abs(np.vdot(u, v)) / (nu * nv)
    return float(np.sqrt(max(0.0, 1.0 - min(1.0, c) ** 2)))


def random_complex(rng: np.random.Generator, *shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def fit_univariate(xs, ys, degree: int) -> np.ndarray:
    """Highest-first coefficients of the degree-``degree`` interpolant."""
    xs = np.asarray(xs, dtype=complex)
    v = np.vander(xs, degree + 1)
    coef, *_ = np.linalg.lstsq(v, np.asarray(ys, dtype=complex), rcond=None)
    return coef

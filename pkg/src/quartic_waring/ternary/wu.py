"""Quartics annihilated by a product of two independent lines.

Then ``f = f0(x1, x2) + f1(x0, x2)`` and the only freedom is sliding a
multiple of ``x2^4`` between the summands.  Each summand has rank at most
four, and a slide bringing one of them to rank three or less always exists
unless ``f`` is itself a binary form, which is checked first.
"""
from __future__ import annotations

import numpy as np

from ..apolarity import DualForm, Form, contract, linear_form, multiply, polarization_matrix, substitute
from ..binary import binary_decompose
from ..decomposition import Decomposition
from ..errors import DegenerateInput, MembershipFailure, SearchExhausted
from ..numerics import DEFAULT_TOL, Tolerance, kernel_basis, random_complex
from .system import X1_4, binary_quartic, complete_dual_basis, embed_matrix, to_coords

_EMB = [
    np.array([[0, 1, 0], [0, 0, 1]], dtype=complex),  # (u1, u2)
    np.array([[1, 0, 0], [0, 0, 1]], dtype=complex),  # (u0, u2)
]


def two_variable_operator(f: Form, tol: Tolerance = DEFAULT_TOL):
    """A dual linear form killing ``f``, or ``None``."""
    K = kernel_basis(polarization_matrix(f.normalized(), 1), tol)
    return K[0] if len(K) else None


def decompose_in_two_variables(f: Form, ell=None, tol: Tolerance = DEFAULT_TOL, rng=None) -> Decomposition:
    """Decompose a ternary form that only depends on two variables."""
    if ell is None:
        ell = two_variable_operator(f, tol)
        if ell is None:
            raise DegenerateInput("form genuinely depends on three variables")
    ell = np.asarray(ell, dtype=complex)
    _, _, vh = np.linalg.svd(ell[None, :])
    D = np.stack([vh[1], vh[2], ell / np.linalg.norm(ell)])
    E = np.linalg.inv(D)
    F = to_coords(f, D)
    restrict = np.array([[1, 0], [0, 1], [0, 0]], dtype=complex)
    g = substitute(F, restrict)
    back = substitute(g, restrict.T)
    if np.linalg.norm(back.coeffs - F.coeffs) > tol.residual_eps * max(F.norm(), 1e-300):
        raise MembershipFailure("form does not depend on two variables only")
    d = binary_decompose(g, tol, rng)
    return d.mapped(E @ restrict, nvars=3, provenance="BINARY_FALLBACK")


def _det_affine(g: Form, direction: Form):
    """Root of ``k -> det cat(g + k direction)`` (affine in ``k`` since the
    direction is a fourth power), or ``None``."""
    d0 = np.linalg.det(polarization_matrix(g, 2))
    d1 = np.linalg.det(polarization_matrix(g + direction, 2))
    slope = d1 - d0
    if abs(slope) <= 1e-14 * (abs(d0) + abs(d1) + 1e-300):
        return None
    return -d0 / slope


def _safe_decompose(g: Form, tol, rng):
    if g.norm() <= tol.zero_eps:
        return Decomposition([], 2, 4)
    return binary_decompose(g, tol, rng)


def decompose_two_lines(f: Form, x0, x1, tol: Tolerance = DEFAULT_TOL, rng=None) -> Decomposition:
    """At most seven terms for ``f`` with ``x0 x1`` annihilating ``f``."""
    rng = rng if rng is not None else np.random.default_rng(0)
    x0 = np.asarray(x0, dtype=complex)
    x1 = np.asarray(x1, dtype=complex)
    scale = f.norm()
    fn = f.normalized()
    if np.linalg.matrix_rank(np.stack([x0, x1]), tol=tol.rank_eps * max(np.abs(x0).max(), np.abs(x1).max())) < 2:
        raise DegenerateInput("the two lines must be independent")
    prod = multiply(linear_form(x0, DualForm), linear_form(x1, DualForm))
    res = contract(prod, fn).norm() / (np.linalg.norm(x0) * np.linalg.norm(x1))
    if res > tol.residual_eps:
        raise MembershipFailure(f"x0 x1 does not annihilate f (residual {res:.2e})")
    ell = two_variable_operator(fn, tol)
    if ell is not None:
        out = decompose_in_two_variables(fn, ell, tol, rng)
        out.provenance = "WU"
        return _scaled(out, scale)

    D = np.stack([x0, x1, complete_dual_basis(x0, x1)])
    E = np.linalg.inv(D)
    F = to_coords(fn, D)
    A = np.concatenate([embed_matrix(M) for M in _EMB], axis=1)
    x, *_ = np.linalg.lstsq(A, F.coeffs, rcond=None)
    if np.linalg.norm(A @ x - F.coeffs) > tol.residual_eps * F.norm():
        raise MembershipFailure("f is not in V0 + V1")
    f0, f1 = binary_quartic(x[:5]), binary_quartic(x[5:])

    ks = [0.0]
    for k in (_det_affine(f0, X1_4), _det_affine(f1, -X1_4)):
        if k is not None:
            ks.append(k)
    ks += list(random_complex(rng, 3))

    best = None
    for k in ks:
        try:
            d0 = _safe_decompose(f0 + X1_4 * k, tol, rng)
            d1 = _safe_decompose(f1 - X1_4 * k, tol, rng)
        except Exception:
            continue
        total = len(d0) + len(d1)
        parts = [d.mapped(E @ M.T, nvars=3) for d, M in zip((d0, d1), _EMB) if len(d)]
        if not parts or Decomposition.concat(parts, "WU").residual(fn) > tol.residual_eps:
            continue
        if best is None or total < best[0]:
            best = (total, d0, d1, k)
        if total <= 6:
            break
    if best is not None and best[0] <= 7:
        _, d0, d1, k = best
        parts = [d.mapped(E @ M.T, nvars=3) for d, M in zip((d0, d1), _EMB) if len(d)]
        out = Decomposition.concat(parts, "WU")
        out.diagnostics["slide"] = complex(k)
        return _scaled(out, scale)
    raise SearchExhausted("no slide brings the two summands to seven terms")


def _scaled(d: Decomposition, s) -> Decomposition:
    d.terms = [(c * s, v) for c, v in d.terms]
    return d

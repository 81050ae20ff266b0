"""Quartics killed by the square of a line ``l``.

Then ``g = l . f`` is a cubic killed by ``l``.  If ``g`` is a cube ``z^3``
the pair ``(l, m)`` with ``m . z = 0`` annihilates ``f``.  Otherwise a cubic
``p`` apolar to ``f`` meets the line ``l = 0`` in three points, and the three
tangents of ``p`` there give a new apolar product of lines.
"""
from __future__ import annotations

import numpy as np

from ..apolarity import DualForm, Form, contract, linear_form, polarization_matrix, power
from ..decomposition import Decomposition
from ..errors import CaseAnalysisExhausted, HypothesisViolation, WaringError
from ..numerics import DEFAULT_TOL, Tolerance, kernel_basis, matrix_rank, poly_roots, random_complex
from .general import decompose_general, decompose_special
from .system import Dependency, SplitCubic
from .wu import decompose_in_two_variables, decompose_two_lines

FINE_BUDGET = 10


def _kills(op: DualForm, f: Form, tol) -> bool:
    return contract(op, f).norm() <= tol.residual_eps * f.norm() * max(op.norm(), 1e-300)


def _restricted_roots(p: DualForm, ell, tol):
    """Points of ``p = 0`` on the line ``ell = 0`` (dual coordinates)."""
    _, _, vh = np.linalg.svd(np.asarray(ell, dtype=complex)[None, :])
    a, b = vh[1].conj(), vh[2].conj()
    ts = np.array([0.0, 1.0, -1.0, 2.0, -2.0])
    vals = [p(a + t * b) for t in ts]
    coef = np.polyfit(ts, vals, 3)
    roots = poly_roots(coef, tol)
    pts = [a + t * b for t in roots]
    if len(roots) < 3:
        pts.append(b)
    return pts


def _distinct(vs, tol):
    sep = np.sqrt(tol.rank_eps)
    for i in range(len(vs)):
        for j in range(i):
            u, w = vs[i] / np.linalg.norm(vs[i]), vs[j] / np.linalg.norm(vs[j])
            if 1 - abs(np.vdot(u, w)) <= sep ** 2:
                return False
    return True


def _route(f, sc, ell, tol, rng):
    if sc.dependency is Dependency.INDEPENDENT:
        return decompose_general(f, sc, tol, rng)
    for v in sc.factors:
        if _kills(power(linear_form(v, DualForm), 2), f, tol):
            ln, vn = ell / np.linalg.norm(ell), v / np.linalg.norm(v)
            return decompose_two_lines(f, ln - vn, ln + vn, tol, rng)
    return decompose_special(f, sc, tol, rng)


def decompose_square(f: Form, ell, tol: Tolerance = DEFAULT_TOL, rng=None) -> Decomposition:
    """At most seven terms for ``f`` with ``ell^2 . f = 0``."""
    rng = rng if rng is not None else np.random.default_rng(0)
    ell = np.asarray(ell, dtype=complex)
    scale = f.norm()
    fn = f.normalized()
    lf = linear_form(ell, DualForm)
    if not _kills(power(lf, 2), fn, tol):
        raise HypothesisViolation("the square of the line does not annihilate f", ell)
    g = contract(lf, fn)
    if g.norm() <= tol.residual_eps * np.linalg.norm(ell):
        d = decompose_in_two_variables(fn, ell, tol, rng)
    elif matrix_rank(polarization_matrix(g, 2), tol) == 1:
        u, _, _ = np.linalg.svd(polarization_matrix(g, 2))
        z = u[:, 0]
        y = ell.conj() / np.vdot(ell, ell).real
        m = np.cross(y, z)
        d = decompose_two_lines(fn, ell, m, tol, rng)
    else:
        d = _fine(fn, ell, tol, rng)
    d.provenance = "FINE"
    d.terms = [(c * scale, v) for c, v in d.terms]
    return d


def _fine(f, ell, tol, rng):
    P = kernel_basis(polarization_matrix(f, 3), tol)
    last = None
    for _ in range(FINE_BUDGET):
        p = DualForm(3, 3, random_complex(rng, len(P)) @ P)
        pts = _restricted_roots(p, ell, tol)
        if len(pts) != 3 or not _distinct(pts, tol):
            continue
        xs = [contract(power(linear_form(q), 2), p).coeffs for q in pts]
        if min(np.linalg.norm(x) for x in xs) <= tol.zero_eps:
            continue
        sc = SplitCubic.from_vectors(*xs, tol=tol)
        if sc.dependency is Dependency.REPEATED or sc.residual(f) > tol.residual_eps:
            continue
        try:
            return _route(f, sc, ell, tol, rng)
        except WaringError as e:
            last = e
    raise CaseAnalysisExhausted("no usable tangent triangle", {"last": repr(last)})

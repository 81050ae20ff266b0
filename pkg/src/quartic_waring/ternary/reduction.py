"""Search for three distinct lines whose product annihilates a ternary quartic."""
from __future__ import annotations

import numpy as np

from ..apolarity import DualForm, Form, contract, linear_form, pair, polarization_matrix, power
from ..binary import operator_roots
from ..errors import SearchExhausted
from ..numerics import (
    DEFAULT_TOL,
    Tolerance,
    fit_univariate,
    kernel_basis,
    poly_roots,
    projective_distance,
    random_complex,
)
from .system import Dependency, SplitCubic


def conic_matrix(q) -> np.ndarray:
    """Symmetric matrix of a dual quadric given in graded-lex coefficients."""
    q = np.asarray(q, dtype=complex)
    return np.array([
        [q[0], q[1] / 2, q[2] / 2],
        [q[1] / 2, q[3], q[4] / 2],
        [q[2] / 2, q[4] / 2, q[5]],
    ])


def factor_conic(Q, tol: Tolerance = DEFAULT_TOL):
    """Split a rank-two symmetric matrix into two linear factors.

    Returns ``(v, w)`` with ``Q`` proportional to ``(v w^T + w v^T) / 2``, or
    ``None`` when ``Q`` is not numerically of rank two.
    """
    _, s, vh = np.linalg.svd(Q)
    if s[0] == 0 or s[2] > np.sqrt(tol.rank_eps) * s[0] or s[1] <= np.sqrt(tol.rank_eps) * s[0]:
        return None
    B = np.stack([vh[0].conj(), vh[1].conj(), vh[2].conj()], axis=1)
    H = B.T @ Q @ B
    pts = operator_roots([H[0, 0], 2 * H[0, 1], H[1, 1]], tol)
    if len(pts) != 2:
        return None
    Binv = np.linalg.inv(B)
    out = []
    for al, be in pts:
        v = np.array([be, -al, 0]) @ Binv
        out.append(v / np.linalg.norm(v))
    return tuple(out)


def _singular_members(qa, qb, tol):
    """Singular members of the pencil ``qa + s qb`` (including ``qb``)."""
    A, B = conic_matrix(qa), conic_matrix(qb)
    ss = np.array([0, 1, -1, 2, -2], dtype=complex)
    vals = [np.linalg.det(A + s * B) for s in ss]
    coef = fit_univariate(ss, vals, 3)
    out = []
    if np.max(np.abs(coef)) == 0:
        return out
    roots = poly_roots(coef, tol)
    out += [A + s * B for s in roots]
    if len(roots) < 3:
        out.append(B)
    return out


def _valid(x0, x1, ell, f, tol):
    sep = np.sqrt(tol.rank_eps)
    vs = (x0, x1, ell)
    if min(projective_distance(vs[i], vs[j]) for i in range(3) for j in range(i)) <= sep:
        return None
    sc = SplitCubic.from_vectors(x0, x1, ell, tol)
    if sc.residual(f) > tol.residual_eps:
        return None
    return sc


def _score(sc: SplitCubic):
    rank = {Dependency.INDEPENDENT: 0, Dependency.PAIRWISE_ONLY: 1, Dependency.REPEATED: 2}
    cond = sc.conditioning() if sc.dependency is Dependency.INDEPENDENT else 1.0
    return (rank[sc.dependency], -min(sc.min_angle(), cond))


def _candidates_from_pencils(x0, V, G, f, tol, rng, pencils=2):
    found = []
    for _ in range(pencils):
        qa, qb = random_complex(rng, 2, len(V)) @ V
        for Q in _singular_members(qa, qb, tol):
            fac = factor_conic(Q, tol)
            if fac is None:
                continue
            sc = _valid(x0, fac[0], fac[1], f, tol)
            if sc is not None:
                found.append(sc)
    return found


def _x0_pencil_candidates(x0, V, G, f, tol, rng):
    """Pencils through ``x0 * w`` inside ``V``; used when every singular conic
    found so far was divisible by ``x0``."""
    x0f = linear_form(x0, DualForm)
    M = np.stack([
        (x0f * linear_form(np.eye(3)[j], DualForm)).coeffs for j in range(3)
    ], axis=1)
    W = kernel_basis(G @ M, tol)
    found = []
    for w in W:
        q0 = M @ w
        for _ in range(2):
            q = random_complex(rng, len(V)) @ V
            for Q in _singular_members(q, q0, tol):
                fac = factor_conic(Q, tol)
                if fac is None:
                    continue
                sc = _valid(x0, fac[0], fac[1], f, tol)
                if sc is not None:
                    found.append(sc)
    return found


def find_apolar_product(f: Form, tol: Tolerance = DEFAULT_TOL, seed=0, rng=None, budget=12) -> SplitCubic:
    """Distinct ``x0, x1, l`` with ``x0 x1 l`` annihilating ``f``.

    Pick ``x0`` with ``x0^4 . f != 0``; the quadrics killing ``g = x0 . f`` form
    a space ``V`` of dimension at least three, and its singular members factor
    as ``x1 * l``.
    """
    if f.nvars != 3 or f.degree != 4:
        raise ValueError("find_apolar_product expects a ternary quartic")
    if f.norm() <= tol.zero_eps:
        raise SearchExhausted("zero form")
    rng = rng if rng is not None else np.random.default_rng(seed)
    fn = f.normalized()
    best = []
    for trial in range(budget):
        trials = [x / np.linalg.norm(x) for x in random_complex(rng, 3, 3)]
        vals = [abs(pair(power(linear_form(x, DualForm), 4), fn)) for x in trials]
        k = int(np.argmax(vals))
        if vals[k] <= tol.zero_eps * 24:
            continue
        x0 = trials[k]
        g = contract(linear_form(x0, DualForm), fn)
        G = polarization_matrix(g, 2)
        V = kernel_basis(G, tol)
        if len(V) < 2:
            continue
        found = _candidates_from_pencils(x0, V, G, fn, tol, rng)
        if not found:
            found = _x0_pencil_candidates(x0, V, G, fn, tol, rng)
        best.extend(found)
        good = [sc for sc in best if sc.dependency is Dependency.INDEPENDENT and sc.conditioning() > 0.05]
        if good:
            break
    if not best:
        raise SearchExhausted("no apolar product of three distinct lines found")
    best.sort(key=_score)
    return best[0]

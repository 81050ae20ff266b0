"""Seven-term decompositions through a splitter system.

For a split ``F = F_0(p) + F_1(p) + F_2(p)`` the total rank is at most
``r0 + r1 + r2``.  Binary quartics on the rank locus ``R`` of a plane have
rank two or less (rank one at a singular point), the third summand is at
most rank three, so the search looks for parameters ``p`` putting two
summands on their loci, or one summand at a rank-one point.
"""
from __future__ import annotations

import numpy as np

from ..apolarity import DualForm, Form, contract, linear_form, multiply, power
from ..binary import QuarticStratum, binary_decompose, classify_plane, classify_plane_degenerate, quartic_stratum
from ..decomposition import Decomposition
from ..errors import (
    CaseAnalysisExhausted,
    ClassificationError,
    DimensionCollapse,
    HypothesisViolation,
    MembershipFailure,
    WaringError,
)
from ..numerics import DEFAULT_TOL, Tolerance, fit_univariate, kernel_basis, poly_roots, random_complex
from .system import (
    Dependency,
    SplitCubic,
    SplitterSystem,
    build_general_splitter,
    build_special_splitter,
)
from .wu import decompose_two_lines

MAX_DEPTH = 3
RANK_ONE_BUDGET = 20
TAU_TRIES = 3


def _rescaled(d: Decomposition, s) -> Decomposition:
    d.terms = [(c * s, ell) for c, ell in d.terms]
    return d


def _binary_or_empty(g: Form, tol, rng):
    if g.norm() <= tol.zero_eps:
        return Decomposition([], 2, 4)
    return binary_decompose(g, tol, rng)


def evaluate_split(sysm: SplitterSystem, p, tol: Tolerance, rng, limit=7):
    """Decompose the three summands at ``p``; ``None`` if the total exceeds ``limit``."""
    parts = []
    total = 0
    for i in range(3):
        try:
            d = _binary_or_empty(sysm.part(i, p), tol, rng)
        except WaringError:
            return None
        total += len(d)
        if total > limit:
            return None
        parts.append(d)
    lifted = [sysm.lift(d, i) for i, d in enumerate(parts) if len(d)]
    out = Decomposition.concat(lifted, sysm.variant) if lifted else Decomposition([], 3, 4, sysm.variant)
    if out.residual(sysm.source) > tol.residual_eps:
        return None
    out.diagnostics["split_ranks"] = [len(d) for d in parts]
    return out


def _classify_all(sysm: SplitterSystem, tol, seed):
    cfgs = []
    for i in range(3):
        try:
            if sysm.variant == "GENER":
                cfgs.append(classify_plane(sysm.base[i], *sysm.L[i], tol=tol, seed=seed))
            else:
                cfgs.append(classify_plane_degenerate(sysm.base[i], tol=tol, seed=seed))
        except (ClassificationError, DimensionCollapse):
            cfgs.append(None)
    return cfgs


def _locus_roots(cfg, start, step, tol):
    """Values ``t`` with ``start + t step`` on the locus of ``cfg``; ``None``
    when the whole line lies on the locus."""
    ts = np.array([0.0, 1.0, -1.0, 2.0])
    vals = [cfg.locus_value(*(start + t * step)) for t in ts]
    coef = fit_univariate(ts, vals, 2)
    scale = cfg.scale() * (1 + np.abs(start).max() + np.abs(step).max()) ** 2
    if np.max(np.abs(coef)) <= tol.rank_eps * scale:
        return None
    return list(poly_roots(coef, tol))


def _usable(cfg) -> bool:
    return cfg is not None and cfg.case not in ("C2", "D2")


def pair_search(sysm: SplitterSystem, cfgs, tol: Tolerance, rng):
    """Put summands ``i`` and ``j`` on their loci, moving along the kernel
    directions of the other summand so the two conditions decouple."""
    for i in range(3):
        for j in range(i + 1, 3):
            if not (_usable(cfgs[i]) and _usable(cfgs[j])):
                continue
            ki, kj = sysm.kernel_direction(i), sysm.kernel_direction(j)
            n = np.cross(ki.conj(), kj.conj())
            if np.linalg.norm(n) <= tol.rank_eps:
                continue
            Pi, Pj = sysm.proj[i], sysm.proj[j]
            for tau in random_complex(rng, TAU_TRIES):
                betas = _locus_roots(cfgs[i], tau * (Pi @ n), Pi @ kj, tol)
                alphas = _locus_roots(cfgs[j], tau * (Pj @ n), Pj @ ki, tol)
                betas = list(random_complex(rng, 2)) if betas is None else betas
                alphas = list(random_complex(rng, 2)) if alphas is None else alphas
                for b in betas:
                    for a in alphas:
                        d = evaluate_split(sysm, tau * n + a * ki + b * kj, tol, rng)
                        if d is not None:
                            d.diagnostics["pair"] = (i, j)
                            return d
    return None


def rank_one_search(sysm: SplitterSystem, cfgs, tol: Tolerance, rng, budget=RANK_ONE_BUDGET):
    """Pin a summand at a rank-one point of its plane and slide the other two."""
    for i in range(3):
        cfg = cfgs[i]
        if cfg is None or cfg.singular_point is None:
            continue
        target = np.array(cfg.singular_point, dtype=complex)
        p0, *_ = np.linalg.lstsq(sysm.proj[i], target, rcond=None)
        ki = sysm.kernel_direction(i)
        for t in [0.0] + list(random_complex(rng, budget - 1)):
            d = evaluate_split(sysm, p0 + t * ki, tol, rng)
            if d is not None:
                d.diagnostics["rank_one"] = i
                return d
    return None


def _retarget(f: Form, D, T, tol):
    """Split cubic for the dual basis of the basis change ``T`` (columns are
    new linear forms in working coordinates), or ``None`` if not apolar."""
    try:
        rows = np.linalg.solve(T, D)
    except np.linalg.LinAlgError:
        return None
    sc = SplitCubic.from_vectors(*rows, tol=tol)
    if sc.dependency is not Dependency.INDEPENDENT or sc.residual(f) > tol.residual_eps:
        return None
    return sc


def _via_wu(f, sysm, i, tol, rng):
    j, k = [m for m in range(3) if m != i]
    return decompose_two_lines(f, sysm.annihilators[j], sysm.annihilators[k], tol, rng)


def _coef(F: Form, e):
    return F.coefficient(tuple(e))


def _case_one(f, sysm, cfgs, tol, rng, depth):
    """One plane of type C2: trade a basis form for the rank-one form of a
    reducible plane."""
    for j in range(3):
        cfg = cfgs[j]
        if cfg is None or cfg.singular_form is None:
            continue
        ell_u = sysm.embeddings[j].T @ cfg.singular_form
        others = [m for m in range(3) if m != j]
        for a in others:
            if abs(ell_u[a]) <= tol.rank_eps * np.linalg.norm(ell_u):
                continue
            T = np.eye(3, dtype=complex)
            T[:, a] = ell_u
            sc = _retarget(f, sysm.D, T, tol)
            if sc is None:
                continue
            try:
                return decompose_general(f, sc, tol, rng, depth + 1)
            except WaringError:
                continue
    return None


def _case_two(f, sysm, cfgs, tol, rng, depth):
    """At least two planes of type C2."""
    c2 = [i for i in range(3) if cfgs[i] is not None and cfgs[i].case == "C2"]
    i, j = c2[0], c2[1]
    k = 3 - i - j
    if cfgs[i].infinity == "z" and cfgs[j].infinity == "y":
        i, j = j, i
    rows = np.stack([sysm.D[i], sysm.D[j], sysm.D[k]])
    sc = SplitCubic.from_vectors(*rows, tol=tol)
    canon = build_general_splitter(f, sc, tol)
    F = canon.F
    inf0, inf1 = cfgs[i].infinity, cfgs[j].infinity
    tries = []
    if inf0 == "y" and inf1 == "y" and abs(_coef(F, (0, 0, 4))) <= tol.zero_eps:
        return _three_three_one(f, canon, tol, rng)
    if inf0 == "z" and inf1 == "z":
        b0, b1 = _coef(F, (0, 1, 3)), _coef(F, (1, 0, 3))
        if abs(b1) > tol.zero_eps:
            T = np.eye(3, dtype=complex)
            T[1, 0] = b0 / b1
            tries.append(T)
    for kk in random_complex(rng, 4):
        T = np.eye(3, dtype=complex)
        T[0, 2] = kk
        tries.append(T)
    for T in tries:
        sc2 = _retarget(f, canon.D, T, tol)
        if sc2 is None:
            continue
        try:
            return decompose_general(f, sc2, tol, rng, depth + 1)
        except WaringError:
            continue
    return None


def _three_three_one(f, canon, tol, rng):
    """Shared variable with no fourth power: make the third summand a perfect
    fourth power up to ``u0^4, u1^4`` and slide the remaining freedom."""
    F = canon.F
    c31, c22, c13 = _coef(F, (3, 1, 0)), _coef(F, (2, 2, 0)), _coef(F, (1, 3, 0))
    b0, b1 = _coef(F, (0, 3, 1)), _coef(F, (3, 0, 1))
    if abs(b0) <= tol.zero_eps or abs(b1) <= tol.zero_eps:
        return None
    q = np.sqrt(complex(c22) / 6)
    kk = (c31 - 4 * q) / b1
    h = (c13 - 4 * q ** 3) / b0
    T = np.eye(3, dtype=complex)
    T[:, 2] = (h, kk, 1)
    sc = _retarget(f, canon.D, T, tol)
    if sc is None:
        return None
    sysm = build_general_splitter(f, sc, tol)
    cfgs = _classify_all(sysm, tol, 0)
    d = rank_one_search(sysm, cfgs, tol, rng)
    return d if d is not None else pair_search(sysm, cfgs, tol, rng)


def decompose_general(f: Form, sc: SplitCubic, tol: Tolerance = DEFAULT_TOL, rng=None, depth=0) -> Decomposition:
    """At most seven terms for ``f`` annihilated by three independent lines."""
    rng = rng if rng is not None else np.random.default_rng(0)
    if sc.dependency is not Dependency.INDEPENDENT:
        raise HypothesisViolation("factors are not linearly independent", None)
    scale = f.norm()
    fn = f.normalized()
    sysm = build_general_splitter(fn, sc, tol)
    for i in range(3):
        if sysm.dims[i] < 3:
            return _rescaled(_via_wu(fn, sysm, i, tol, rng), scale)
    cfgs = _classify_all(sysm, tol, int(rng.integers(1 << 30)))
    d = pair_search(sysm, cfgs, tol, rng)
    if d is None:
        d = rank_one_search(sysm, cfgs, tol, rng)
    if d is None and depth < MAX_DEPTH:
        n_c2 = sum(1 for c in cfgs if c is not None and c.case == "C2")
        if n_c2 == 1:
            d = _case_one(fn, sysm, cfgs, tol, rng, depth)
        elif n_c2 >= 2:
            d = _case_two(fn, sysm, cfgs, tol, rng, depth)
    if d is None:
        raise CaseAnalysisExhausted(
            "no split with total rank at most seven",
            {"cases": [c.case if c else None for c in cfgs], "depth": depth},
        )
    d.provenance = "GENER"
    return _rescaled(d, scale)


def _square_check(f: Form, sc: SplitCubic, tol):
    for v in sc.factors:
        sq = power(linear_form(v, DualForm), 2)
        if contract(sq, f).norm() <= tol.residual_eps * np.linalg.norm(v) ** 2 * f.norm():
            raise HypothesisViolation("the square of a factor annihilates f", v)


def _two_tangent_planes(f, sysm, cfgs, tol, rng):
    """Two planes with empty locus: a pencil member ``m`` of their
    annihilators satisfies ``m l . f = 0`` for the third one."""
    d2 = [i for i in range(3) if cfgs[i] is not None and cfgs[i].case == "D2"]
    i, j = d2[0], d2[1]
    k = 3 - i - j
    ai, aj, ak = (linear_form(sysm.annihilators[m], DualForm) for m in (i, j, k))
    qi = contract(multiply(ai, ak), f).coeffs
    qj = contract(multiply(aj, ak), f).coeffs
    K = kernel_basis(np.stack([qi, qj], axis=1), tol)
    if not len(K):
        return None
    mu, nu = K[0]
    m = mu * sysm.annihilators[i] + nu * sysm.annihilators[j]
    try:
        return decompose_two_lines(f, m, sysm.annihilators[k], tol, rng)
    except WaringError:
        return None


def decompose_special(f: Form, sc: SplitCubic, tol: Tolerance = DEFAULT_TOL, rng=None) -> Decomposition:
    """At most seven terms for ``f`` annihilated by three concurrent lines
    none of whose squares annihilates ``f``."""
    rng = rng if rng is not None else np.random.default_rng(0)
    if sc.dependency is not Dependency.PAIRWISE_ONLY:
        raise HypothesisViolation("factors are not pairwise independent and dependent", None)
    scale = f.norm()
    fn = f.normalized()
    _square_check(fn, sc, tol)
    sysm = build_special_splitter(fn, sc, tol)
    for i in range(3):
        if sysm.dims[i] < 3:
            d = _via_wu(fn, sysm, i, tol, rng)
            d.provenance = "SPE"
            return _rescaled(d, scale)
    cfgs = _classify_all(sysm, tol, int(rng.integers(1 << 30)))
    d = rank_one_search(sysm, cfgs, tol, rng)
    if d is None:
        d = pair_search(sysm, cfgs, tol, rng)
    if d is None and sum(1 for c in cfgs if c is not None and c.case == "D2") >= 2:
        d = _two_tangent_planes(fn, sysm, cfgs, tol, rng)
    if d is None:
        raise CaseAnalysisExhausted(
            "no split with total rank at most seven",
            {"cases": [c.case if c else None for c in cfgs]},
        )
    d.provenance = "SPE"
    return _rescaled(d, scale)

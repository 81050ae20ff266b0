"""Waring rank of binary forms and the rank geometry of planes of quartics.

Binary decompositions follow Sylvester: a square-free operator of minimal
degree annihilating ``f`` factors into linear operators whose zeros are the
linear forms of a minimal decomposition.

A *plane* is ``W = span(f0, y, z)`` viewed through the affine chart
``f0 + a*y + b*z``.  Its rank geometry is read off the polynomial
``D(a, b) = det cat(f0 + a*y + b*z)``, where ``cat`` is the 3x3 middle
catalecticant: ``D = 0`` is the locus of rank != 3.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from numpy.polynomial import polynomial as P

from .apolarity import Form, polarization_matrix, power_coeffs
from .decomposition import Decomposition
from .errors import ClassificationError, DimensionCollapse, SearchExhausted, ZeroForm
from .numerics import (
    DEFAULT_TOL,
    Tolerance,
    kernel_basis,
    numeric_rank_from_sv,
    poly_roots,
    projective_distance,
    random_complex,
)


class QuarticStratum(enum.Enum):
    ZERO = 0
    POWER = 1
    SECANT = 2
    GENERIC = 3
    TANGENT = 4

    @property
    def rank(self) -> int:
        return self.value


def separation_eps(tol: Tolerance) -> float:
    # roots closer than this (chordal) are treated as repeated
    return float(np.sqrt(tol.rank_eps))


def _is_binary(f: Form):
    if f.nvars != 2:
        raise ValueError(f"expected a binary form, got {f.nvars} variables")


def _quadratic_disc(q) -> complex:
    q = np.asarray(q, dtype=complex)
    q = q / np.linalg.norm(q)
    return q[1] ** 2 - 4 * q[0] * q[2]


def quartic_stratum(f: Form, tol: Tolerance = DEFAULT_TOL) -> QuarticStratum:
    _is_binary(f)
    if f.degree != 4:
        raise ValueError("quartic_stratum expects a quartic")
    if f.norm() <= tol.zero_eps:
        return QuarticStratum.ZERO
    m = polarization_matrix(f.normalized(), 2)
    _, s, vh = np.linalg.svd(m)
    r = numeric_rank_from_sv(s, tol)
    if r == 3:
        return QuarticStratum.GENERIC
    if r <= 1:
        return QuarticStratum.POWER
    q = vh[2].conj()
    if abs(_quadratic_disc(q)) <= tol.rank_eps:
        return QuarticStratum.TANGENT
    return QuarticStratum.SECANT


def operator_roots(g, tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """Zeros of a binary operator as points ``(alpha, beta)``.

    ``g`` lists coefficients of ``d0^r, d0^(r-1) d1, ..., d1^r``; each zero
    ``(alpha, beta)`` means ``g`` kills ``(alpha*x0 + beta*x1)**n`` for all n.
    """
    g = np.asarray(g, dtype=complex)
    g = g / np.max(np.abs(g))
    r = g.size - 1
    if abs(g[0]) >= abs(g[-1]):
        roots = poly_roots(g, tol)
        pts = [np.array([t, 1.0]) for t in roots]
        pts += [np.array([1.0, 0.0])] * (r - len(roots))
    else:
        roots = poly_roots(g[::-1], tol)
        pts = [np.array([1.0, t]) for t in roots]
        pts += [np.array([0.0, 1.0])] * (r - len(roots))
    return [p / np.linalg.norm(p) for p in pts]


def _square_free(points, tol) -> bool:
    sep = separation_eps(tol)
    for i in range(len(points)):
        for j in range(i):
            if projective_distance(points[i], points[j]) <= sep:
                return False
    return True


def _fit_powers(f: Form, points, tol):
    """Least-squares coefficients of ``f`` on the powers of the given forms."""
    A = np.stack([power_coeffs(p, f.degree) for p in points], axis=1)
    c, *_ = np.linalg.lstsq(A, f.coeffs, rcond=None)
    res = np.linalg.norm(A @ c - f.coeffs) / f.norm()
    return c, res


def _try_rank(f: Form, r: int, tol: Tolerance, rng, attempts=6):
    if r == f.degree + 1:
        basis = np.eye(r + 1, dtype=complex)
    else:
        basis = kernel_basis(polarization_matrix(f, r), tol)
    if len(basis) == 0:
        return None
    for k in range(attempts if len(basis) > 1 else 1):
        g = basis[0] if len(basis) == 1 else random_complex(rng, len(basis)) @ basis
        pts = operator_roots(g, tol)
        if len(pts) != r or not _square_free(pts, tol):
            continue
        c, res = _fit_powers(f, pts, tol)
        if res <= tol.residual_eps:
            return [(complex(ci), p) for ci, p in zip(c, pts)]
    return None


def binary_decompose(f: Form, tol: Tolerance = DEFAULT_TOL, rng=None) -> Decomposition:
    """Minimal power-sum decomposition of a binary form (Sylvester)."""
    _is_binary(f)
    if f.norm() <= tol.zero_eps:
        raise ZeroForm("cannot decompose the zero form")
    if rng is None:
        rng = np.random.default_rng(0)
    scale = f.norm()
    fn = f.normalized()
    if f.degree == 4:
        ranks = [quartic_stratum(fn, tol).rank]
        ranks += [r for r in range(ranks[0] + 1, 6)]
    else:
        ranks = list(range(1, f.degree + 2))
    if f.degree <= 1:
        return Decomposition([(scale, fn.coeffs.copy())], 2, f.degree)
    for r in ranks:
        terms = _try_rank(fn, r, tol, rng)
        if terms is not None:
            terms = [(c * scale, p) for c, p in terms]
            return Decomposition(terms, 2, f.degree, "BINARY")
    raise SearchExhausted(f"no square-free apolar operator found for {f!r}")


def binary_rank(f: Form, tol: Tolerance = DEFAULT_TOL) -> int:
    return len(binary_decompose(f, tol))


# ----------------------------------------------------------------------------
# planes of binary quartics

MONOMIALS_AB = [(i, j) for d in range(4) for i in range(d, -1, -1) for j in [d - i]]


def det_polynomial(f0: Form, y: Form, z: Form) -> dict:
    """Coefficients ``{(i, j): c}`` of ``det cat(f0 + a y + b z) = sum c a^i b^j``.

    Exact expansion by multilinearity in the columns.
    """
    mats = [polarization_matrix(g, 2) for g in (f0, y, z)]
    out = {m: 0j for m in MONOMIALS_AB}
    for choice in product(range(3), repeat=3):
        cols = np.stack([mats[c][:, k] for k, c in enumerate(choice)], axis=1)
        out[(choice.count(1), choice.count(2))] += np.linalg.det(cols)
    return out


def eval_det_polynomial(coeffs: dict, a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return sum(c * a ** i * b ** j for (i, j), c in coeffs.items())


@dataclass
class RConfiguration:
    """Rank geometry of ``span(f0, y, z)`` in the chart ``f0 + a y + b z``.

    ``locus`` is the polynomial ``D(a, b)`` whose zeros form ``R``;
    ``locus_kind`` says how ``R`` looks: ``'conic'``, ``'reducible_conic'``,
    ``'parabola'``, ``'double_line'``, ``'line'`` or ``'empty'``.
    ``r_prime`` lists the rank-4 points, except in the C2 case where it is
    the string ``'line'`` (``R' = R``).
    """

    case: str
    plane_basis: tuple
    locus: dict
    locus_kind: str
    r_prime: object = field(default_factory=list)
    singular_point: tuple | None = None
    singular_form: np.ndarray | None = None
    infinity: str | None = None
    line: tuple | None = None

    def point_form(self, a, b) -> Form:
        f0, y, z = self.plane_basis
        return f0 + y * a + z * b

    def locus_value(self, a, b):
        return eval_det_polynomial(self.locus, a, b)

    def scale(self) -> float:
        return max(abs(c) for c in self.locus.values())

    def describe(self) -> dict:
        def pt(p):
            return [[float(complex(v).real), float(complex(v).imag)] for v in p]

        d = {
            "case": self.case,
            "locus_kind": self.locus_kind,
            "locus": {f"a^{i}b^{j}": [float(c.real), float(c.imag)] for (i, j), c in self.locus.items() if abs(c) > 0},
        }
        if self.r_prime == "line":
            d["r_prime"] = "line"
        else:
            d["r_prime"] = [pt(p) for p in self.r_prime]
        if self.singular_point is not None:
            d["singular_point"] = pt(self.singular_point)
        if self.infinity is not None:
            d["infinity"] = self.infinity
        if self.line is not None:
            d["line"] = pt(self.line)
        return d


def _plane_dim(f0, y, z, tol):
    m = np.stack([g.coeffs / max(g.norm(), 1e-300) for g in (f0, y, z)])
    return numeric_rank_from_sv(np.linalg.svd(m, compute_uv=False), tol)


def _normalized_det_poly(f0, y, z):
    """Det polynomial in unit-normalized chart coordinates, plus the scalings.

    With ``f0 = n0 F0``, ``y = ny Y``, ``z = nz Z`` the point ``f0 + a y + b z``
    is ``n0 (F0 + A Y + B Z)`` with ``A = a ny / n0``, ``B = b nz / n0``.
    """
    n0, ny, nz = f0.norm(), y.norm(), z.norm()
    c = det_polynomial(f0 * (1 / n0), y * (1 / ny), z * (1 / nz))
    s = max(abs(v) for v in c.values())
    if s == 0:
        raise ClassificationError("determinant vanishes identically on the plane")
    c = {k: v / s for k, v in c.items()}
    return c, (n0, ny, nz)


def _to_caller(c_norm, scales):
    """Re-express normalized-chart coefficients in the caller's (a, b)."""
    n0, ny, nz = scales
    out = {}
    for (i, j), v in c_norm.items():
        out[(i, j)] = v * (ny / n0) ** i * (nz / n0) ** j
    s = max(abs(v) for v in out.values())
    return {k: v / s for k, v in out.items()}


def _cross_poly(r1, r2):
    """Cross product of two 3-vectors of polynomials (lowest-first arrays)."""
    def m(p, q):
        return P.polymul(p, q)

    return [
        P.polysub(m(r1[1], r2[2]), m(r1[2], r2[1])),
        P.polysub(m(r1[2], r2[0]), m(r1[0], r2[2])),
        P.polysub(m(r1[0], r2[1]), m(r1[1], r2[0])),
    ]


def _tangent_points(f0, y, z, a_num, b_num, den, tol, rng):
    """Rank-4 points on a parametrized curve ``a = a_num/den, b = b_num/den``.

    The kernel of the (rank-2) catalecticant along the curve is a polynomial
    vector; its discriminant vanishes exactly where the kernel is a square.
    """
    C0, Cy, Cz = (polarization_matrix(g, 2) for g in (f0, y, z))
    rows = []
    for i in range(3):
        rows.append([
            P.polyadd(P.polyadd(P.polymul(den, [C0[i, k]]), P.polymul(a_num, [Cy[i, k]])),
                      P.polymul(b_num, [Cz[i, k]]))
            for k in range(3)
        ])
    w = random_complex(rng, 3)
    pairs = [(0, 1), (0, 2), (1, 2)]
    v = [np.zeros(1, dtype=complex)] * 3
    for wk, (i, j) in zip(w, pairs):
        cr = _cross_poly(rows[i], rows[j])
        v = [P.polyadd(v[t], wk * cr[t]) for t in range(3)]
    disc = P.polysub(P.polymul(v[1], v[1]), 4 * P.polymul(v[0], v[2]))
    disc = np.trim_zeros(np.asarray(disc, dtype=complex), "b")
    if disc.size <= 1 or np.max(np.abs(disc)) == 0:
        return []
    try:
        roots = poly_roots(disc[::-1], tol)
    except Exception:
        return []
    pts = []
    for u in roots:
        d = P.polyval(u, den)
        if abs(d) <= tol.rank_eps:
            continue
        a, b = P.polyval(u, a_num) / d, P.polyval(u, b_num) / d
        g = f0 + y * a + z * b
        if quartic_stratum(g, tol) is QuarticStratum.TANGENT:
            if all(abs(a - p[0]) + abs(b - p[1]) > 1e-6 * (1 + abs(a) + abs(b)) for p in pts):
                pts.append((complex(a), complex(b)))
    return pts


def _line_param(la, lb, lc):
    """Parametrize ``la*a + lb*b + lc = 0`` as (a_num, b_num, den)."""
    if abs(la) >= abs(lb):
        a0, b0 = -lc / la, 0
    else:
        a0, b0 = 0, -lc / lb
    return np.array([a0, lb]), np.array([b0, -la]), np.array([1.0])


def _rank_one_on_line(f0, y, z, a_of, b_of, tol):
    """Parameter ``s`` with ``cat(f0 + a(s) y + b(s) z)`` of rank one.

    ``a_of``/``b_of`` are affine in ``s``; 2x2 minors are then affine in ``s``
    because the direction has rank one, so the condition is linear.
    """
    def minors(s):
        m = polarization_matrix(f0 + y * a_of(s) + z * b_of(s), 2)
        out = []
        for (i, j) in [(0, 1), (0, 2), (1, 2)]:
            for (k, l) in [(0, 1), (0, 2), (1, 2)]:
                out.append(m[i, k] * m[j, l] - m[i, l] * m[j, k])
        return np.array(out)

    m0, m1 = minors(0.0), minors(1.0)
    slope = m1 - m0
    s = -np.vdot(slope, m0) / np.vdot(slope, slope) if np.vdot(slope, slope) != 0 else 0.0
    return complex(s)


def _finish_c11_singular(cfg, f0, y, z, a_s, b_s, tol):
    g = f0 + y * a_s + z * b_s
    cfg.singular_point = (complex(a_s), complex(b_s))
    if quartic_stratum(g, tol) is QuarticStratum.POWER:
        d = binary_decompose(g, tol)
        c, ell = d.terms[0]
        cfg.singular_form = ell * complex(c) ** 0.25
    else:
        raise ClassificationError(
            f"singular point of R at {cfg.singular_point} is not a fourth power"
        )


def classify_plane(f0: Form, y: Form, z: Form, tol: Tolerance = DEFAULT_TOL, seed=0) -> RConfiguration:
    """Classify ``span(f0, y, z)`` with ``y``, ``z`` distinct fourth powers.

    Returns case ``C11`` (``R`` a conic asymptotic to the ``y`` and ``z``
    directions, possibly reducible with a rank-one singular point), ``C12``
    (``R`` a line in a third direction) or ``C2`` (``R = R'`` a line parallel
    to the ``y`` or ``z`` direction).
    """
    for g in (f0, y, z):
        _is_binary(g)
    if _plane_dim(f0, y, z, tol) < 3:
        raise DimensionCollapse("span(f0, y, z) is not three-dimensional")
    rng = np.random.default_rng(seed)
    cn, scales = _normalized_det_poly(f0, y, z)
    eps = tol.rank_eps
    bad = [k for k in cn if k not in {(0, 0), (1, 0), (0, 1), (1, 1)} and abs(cn[k]) > 1e3 * eps]
    if bad:
        raise ClassificationError(f"det polynomial has unexpected terms {bad}; is L spanned by two powers?")
    locus = _to_caller(cn, scales)
    B, Dl, E, F = locus[(1, 1)], locus[(1, 0)], locus[(0, 1)], locus[(0, 0)]
    Bn, Dn, En, Fn = cn[(1, 1)], cn[(1, 0)], cn[(0, 1)], cn[(0, 0)]
    basis = (f0, y, z)
    locus = {k: v for k, v in locus.items() if k in {(0, 0), (1, 0), (0, 1), (1, 1)}}

    if abs(Bn) > eps:
        K = E * Dl - B * F
        reducible = abs(En * Dn - Bn * Fn) <= eps
        cfg = RConfiguration("C11", basis, locus, "reducible_conic" if reducible else "conic")
        if reducible:
            _finish_c11_singular(cfg, f0, y, z, -E / B, -Dl / B, tol)
        else:
            # (B a + E)(B b + Dl) = K, u = B a + E
            a_num = np.array([0, -E, 1]) / B
            b_num = np.array([K, -Dl]) / B
            den = np.array([0, 1.0])
            cfg.r_prime = _tangent_points(f0, y, z, a_num, b_num, den, tol, rng)
        return cfg

    if abs(Dn) <= eps and abs(En) <= eps:
        raise ClassificationError("R is empty or the whole plane; not an admissible plane")
    if abs(Dn) <= eps:
        cfg = RConfiguration("C2", basis, locus, "line", "line", infinity="y", line=(0, E, F))
        return cfg
    if abs(En) <= eps:
        cfg = RConfiguration("C2", basis, locus, "line", "line", infinity="z", line=(Dl, 0, F))
        return cfg
    cfg = RConfiguration("C12", basis, locus, "line", line=(Dl, E, F))
    cfg.r_prime = _tangent_points(f0, y, z, *_line_param(Dl, E, F), tol, rng)
    return cfg


TANGENT_L = (Form.monomial((4, 0)), Form.monomial((3, 1)))


def classify_plane_degenerate(f0: Form, tol: Tolerance = DEFAULT_TOL, seed=0) -> RConfiguration:
    """Classify ``span(f0, x0^4, x0^3 x1)`` (the two powers have collided).

    Cases: ``D11`` (a parabola with point at infinity ``x0^4``, or a double
    line carrying a fourth power), ``D12`` (a simple line in another
    direction) or ``D2`` (``R`` empty, forcing ``W = span(x0^4, x0^3 x1, x0^2 x1^2)``).
    """
    _is_binary(f0)
    y, z = TANGENT_L
    if _plane_dim(f0, y, z, tol) < 3:
        raise DimensionCollapse("span(f0, x0^4, x0^3 x1) is not three-dimensional")
    rng = np.random.default_rng(seed)
    cn, scales = _normalized_det_poly(f0, y, z)
    eps = tol.rank_eps
    allowed = {(0, 0), (1, 0), (0, 1), (0, 2)}
    bad = [k for k in cn if k not in allowed and abs(cn[k]) > 1e3 * eps]
    if bad:
        raise ClassificationError(f"det polynomial has unexpected terms {bad}")
    locus = _to_caller(cn, scales)
    locus = {k: v for k, v in locus.items() if k in allowed}
    c, Dl, E, F = locus[(0, 2)], locus[(1, 0)], locus[(0, 1)], locus[(0, 0)]
    cnn, Dn, En, Fn = cn[(0, 2)], cn[(1, 0)], cn[(0, 1)], cn[(0, 0)]
    basis = (f0, y, z)

    if abs(cnn) > eps:
        if abs(Dn) > eps:
            cfg = RConfiguration("D11", basis, locus, "parabola")
            s = np.array([0, 1.0])
            a_num = -np.array([F, E, c]) / Dl
            cfg.r_prime = _tangent_points(f0, y, z, a_num, s, np.array([1.0]), tol, rng)
            return cfg
        if abs(En ** 2 - 4 * cnn * Fn) > eps:
            raise ClassificationError("degenerate parabola splits into two lines")
        b0 = -E / (2 * c)
        cfg = RConfiguration("D11", basis, locus, "double_line", line=(0, 1, -b0))
        s = _rank_one_on_line(f0, y, z, lambda t: t, lambda t: b0, tol)
        _finish_c11_singular(cfg, f0, y, z, s, b0, tol)
        return cfg
    if abs(Dn) > eps:
        cfg = RConfiguration("D12", basis, locus, "line", line=(Dl, E, F))
        cfg.r_prime = _tangent_points(f0, y, z, *_line_param(Dl, E, F), tol, rng)
        return cfg
    if abs(En) > eps:
        raise ClassificationError("R is a line through the x0^4 direction")
    return RConfiguration("D2", basis, locus, "empty", [])

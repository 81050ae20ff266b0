"""Adapted coordinates, split cubics and the splitter system.

Working coordinates: given three dual linear forms (rows of ``D``) the form
``F(u) = f(D^T u)`` is ``f`` written in the basis ``E = D^{-1}`` of linear
forms dual to those rows, so the i-th row acts on ``F`` as ``d/du_i``.  A
linear form ``c . u`` in working coordinates is the form ``(E c) . x``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..apolarity import DualForm, Form, contract, linear_form, monomials, multiply, substitute
from ..decomposition import Decomposition
from ..errors import MembershipFailure
from ..numerics import DEFAULT_TOL, Tolerance, numeric_rank_from_sv, projective_distance


class Dependency(enum.Enum):
    INDEPENDENT = "INDEPENDENT"
    PAIRWISE_ONLY = "PAIRWISE_ONLY"
    REPEATED = "REPEATED"


def classify_dependency(vectors, tol: Tolerance = DEFAULT_TOL) -> Dependency:
    vs = [np.asarray(v, complex) / np.linalg.norm(v) for v in vectors]
    sep = np.sqrt(tol.rank_eps)
    for i in range(3):
        for j in range(i):
            if projective_distance(vs[i], vs[j]) <= sep:
                return Dependency.REPEATED
    s = np.linalg.svd(np.stack(vs), compute_uv=False)
    if s[2] <= tol.rank_eps * s[0]:
        return Dependency.PAIRWISE_ONLY
    return Dependency.INDEPENDENT


@dataclass
class SplitCubic:
    """Three dual linear forms whose product annihilates a quartic."""

    x0: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    dependency: Dependency

    @classmethod
    def from_vectors(cls, x0, x1, x2, tol: Tolerance = DEFAULT_TOL):
        vs = [np.asarray(v, dtype=complex) for v in (x0, x1, x2)]
        return cls(*vs, classify_dependency(vs, tol))

    @property
    def factors(self):
        return (self.x0, self.x1, self.x2)

    def cubic(self) -> DualForm:
        a, b, c = (linear_form(v, DualForm) for v in self.factors)
        return multiply(multiply(a, b), c)

    def residual(self, f: Form) -> float:
        scale = f.norm() * np.prod([np.linalg.norm(v) for v in self.factors])
        return contract(self.cubic(), f).norm() / scale

    def min_angle(self) -> float:
        vs = self.factors
        return min(projective_distance(vs[i], vs[j]) for i in range(3) for j in range(i))

    def conditioning(self) -> float:
        vs = np.stack([v / np.linalg.norm(v) for v in self.factors])
        s = np.linalg.svd(vs, compute_uv=False)
        return float(s[2] / s[0])


def to_coords(f: Form, D) -> Form:
    return substitute(f, np.asarray(D).T)


def complete_dual_basis(a, b):
    """A third row making ``[a; b; c]`` well conditioned."""
    c = np.cross(np.conj(a), np.conj(b))
    return c / np.linalg.norm(c)


@lru_cache(maxsize=None)
def _ternary_quartic_monomials():
    return monomials(3, 4)


def embed_matrix(M) -> np.ndarray:
    """15x5 matrix sending binary quartic coefficients (variables ``X0, X1``)
    to the ternary quartic ``g(M[0] . u, M[1] . u)``."""
    M = np.asarray(M, dtype=complex)
    cols = []
    for k in range(5):
        e = np.zeros(5, dtype=complex)
        e[k] = 1
        cols.append(substitute(Form(2, 4, e), M).coeffs)
    return np.stack(cols, axis=1)


def embed(g: Form, M) -> Form:
    return substitute(g, np.asarray(M, dtype=complex))


def binary_quartic(coeffs) -> Form:
    return Form(2, 4, np.asarray(coeffs, dtype=complex))


X0_4 = binary_quartic([1, 0, 0, 0, 0])
X1_4 = binary_quartic([0, 0, 0, 0, 1])
X0_3X1 = binary_quartic([0, 1, 0, 0, 0])


@dataclass
class SplitterSystem:
    """Decompositions ``F = F_0 + F_1 + F_2`` with ``F_i`` binary in its own pair.

    ``embeddings[i]`` (2x3) sends the binary variables of summand ``i`` to
    linear forms in working coordinates.  Every splitting is
    ``F_i(p) = base[i] + (proj[i] @ p)[0] * L[i][0] + (proj[i] @ p)[1] * L[i][1]``
    for ``p`` in C^3; ``kernel_gens[k][i]`` is the ``i``-th component of the
    ``k``-th generator of the kernel of the summation map.
    """

    variant: str
    D: np.ndarray
    E: np.ndarray
    F: Form
    embeddings: list
    base: list
    L: list
    kernel_gens: list
    proj: list
    annihilators: list
    dims: list = field(default_factory=list)
    source: Form | None = None

    def part(self, i: int, p) -> Form:
        c = self.proj[i] @ np.asarray(p, dtype=complex)
        return self.base[i] + self.L[i][0] * c[0] + self.L[i][1] * c[1]

    def sigma(self, parts) -> Form:
        out = Form.zero(3, 4)
        for i, g in enumerate(parts):
            out = out + embed(g, self.embeddings[i])
        return out

    def kernel_direction(self, i: int) -> np.ndarray:
        """Direction in parameter space along which summand ``i`` is constant."""
        _, _, vh = np.linalg.svd(self.proj[i])
        return vh[-1].conj()

    def lift(self, decomp: Decomposition, i: int) -> Decomposition:
        """Binary decomposition of summand ``i`` -> ternary in original variables."""
        return decomp.mapped(self.E @ self.embeddings[i].T, nvars=3)

    def lift_linear(self, vec_u) -> np.ndarray:
        return self.E @ np.asarray(vec_u, dtype=complex)


def _kernel_coords(gen, y, z):
    A = np.stack([y.coeffs, z.coeffs], axis=1)
    c, *_ = np.linalg.lstsq(A, gen.coeffs, rcond=None)
    return c


def _assemble(variant, D, f, embeddings, L, kernel_gens, annihilators, tol):
    D = np.asarray(D, dtype=complex)
    E = np.linalg.inv(D)
    F = to_coords(f, D)
    A = np.concatenate([embed_matrix(M) for M in embeddings], axis=1)
    x, *_ = np.linalg.lstsq(A, F.coeffs, rcond=None)
    res = np.linalg.norm(A @ x - F.coeffs) / max(F.norm(), 1e-300)
    if res > tol.residual_eps:
        raise MembershipFailure(f"form is not in V0+V1+V2 (relative residual {res:.2e})")
    base = [binary_quartic(x[5 * i:5 * i + 5]) for i in range(3)]
    proj = []
    for i in range(3):
        cols = [_kernel_coords(kernel_gens[k][i], *L[i]) for k in range(3)]
        proj.append(np.stack(cols, axis=1))
    sysm = SplitterSystem(variant, D, E, F, embeddings, base, L, kernel_gens, proj, annihilators)
    sysm.source = f
    sysm.dims = [plane_dim(b, *L[i], tol) for i, b in enumerate(base)]
    return sysm


def plane_dim(g, y, z, tol: Tolerance = DEFAULT_TOL) -> int:
    rows = []
    for h in (y, z, g):
        n = h.norm()
        if n > tol.zero_eps:
            rows.append(h.coeffs / n)
    if not rows:
        return 0
    s = np.linalg.svd(np.stack(rows), compute_uv=False)
    return numeric_rank_from_sv(s, tol) if len(rows) == 3 else len(rows)


def build_splitter(f: Form, sc: SplitCubic, tol: Tolerance = DEFAULT_TOL) -> SplitterSystem:
    if sc.dependency is Dependency.INDEPENDENT:
        return build_general_splitter(f, sc, tol)
    if sc.dependency is Dependency.PAIRWISE_ONLY:
        return build_special_splitter(f, sc, tol)
    raise ValueError("a repeated factor has no splitter system")


def build_general_splitter(f: Form, sc: SplitCubic, tol: Tolerance = DEFAULT_TOL) -> SplitterSystem:
    D = np.stack(sc.factors)
    e = np.eye(3)
    # summand i lives in the two variables other than u_i
    embeddings = [e[[1, 2]], e[[0, 2]], e[[0, 1]]]
    L = [(X0_4, X1_4)] * 3
    zero = Form.zero(2, 4)
    kernel_gens = [
        [zero, X0_4, -X0_4],   # (0, u0^4, -u0^4)
        [X0_4, zero, -X1_4],   # (u1^4, 0, -u1^4)
        [X1_4, -X1_4, zero],   # (u2^4, -u2^4, 0)
    ]
    return _assemble("GENER", D, f, embeddings, L, kernel_gens, list(sc.factors), tol)


def special_frame(a, b, ell):
    """Duals ``(lam*a, mu*b, n)`` for ``ell = lam*a + mu*b``.

    In the resulting working coordinates ``a``, ``b`` act as multiples of
    ``d/du0``, ``d/du1`` and ``ell`` acts as ``d/du0 + d/du1``; the third
    basis form ``y = u2`` is killed by ``a`` and ``b``.
    """
    A = np.stack([a, b], axis=1)
    (lam, mu), *_ = np.linalg.lstsq(A, ell, rcond=None)
    n = complete_dual_basis(a, b)
    return np.stack([lam * np.asarray(a), mu * np.asarray(b), n]), (lam, mu)


def build_special_splitter(f: Form, sc: SplitCubic, tol: Tolerance = DEFAULT_TOL) -> SplitterSystem:
    D, _ = special_frame(sc.x0, sc.x1, sc.x2)
    # binary variables (X0, X1) = (y, m_i): L_i = span(y^4, m_i y^3)
    embeddings = [
        np.array([[0, 0, 1], [0, 1, 0]], dtype=complex),
        np.array([[0, 0, 1], [1, 0, 0]], dtype=complex),
        np.array([[0, 0, 1], [1, -1, 0]], dtype=complex),
    ]
    L = [(X0_4, X0_3X1)] * 3
    zero = Form.zero(2, 4)
    kernel_gens = [
        [zero, X0_4, -X0_4],            # (0, y^4, -y^4)
        [X0_4, zero, -X0_4],            # (y^4, 0, -y^4)
        [X0_3X1, -X0_3X1, X0_3X1],      # (u1 y^3, -u0 y^3, (u0-u1) y^3)
    ]
    return _assemble("SPE", D, f, embeddings, L, kernel_gens, list(sc.factors), tol)

"""Homogeneous forms, differential operators and the apolarity calculus.

Forms are dense coefficient vectors over the monomial basis in graded
lexicographic order (``x0 > x1 > x2``).  Coefficients are the plain monomial
coefficients; an operator acts by honest differentiation, so for example
``pair(d0^4, x0^4) == 24``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, factorial, prod

import numpy as np

from .errors import BadDegree, DegreeMismatch
from .numerics import DEFAULT_TOL, Tolerance, check_finite, kernel_basis, matrix_rank

VARS = ("x0", "x1", "x2")


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Exponent tuples of the given degree, graded-lex with x0 > x1 > x2."""
    if degree < 0:
        return ()
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(nvars: int, degree: int) -> dict:
    return {e: i for i, e in enumerate(monomials(nvars, degree))}


@lru_cache(maxsize=None)
def _exponent_array(nvars, degree):
    return np.array(monomials(nvars, degree), dtype=int).reshape(-1, nvars)


@lru_cache(maxsize=None)
def _multinomials(nvars, degree):
    return np.array(
        [factorial(degree) / prod(factorial(k) for k in e) for e in monomials(nvars, degree)]
    )


def n_monomials(nvars: int, degree: int) -> int:
    return comb(degree + nvars - 1, nvars - 1)


@dataclass(frozen=True, eq=False)
class Form:
    nvars: int
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = check_finite(self.coeffs, "coefficients").ravel().copy()
        if self.degree < 0:
            raise BadDegree("negative degree")
        if c.size != n_monomials(self.nvars, self.degree):
            raise ValueError(
                f"{c.size} coefficients for nvars={self.nvars}, degree={self.degree}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, nvars, degree):
        return cls(nvars, degree, np.zeros(n_monomials(nvars, degree), dtype=complex))

    @classmethod
    def from_terms(cls, nvars, degree, terms):
        """Build from a mapping or iterable of ``(exponent tuple, coefficient)``."""
        idx = monomial_index(nvars, degree)
        c = np.zeros(len(idx), dtype=complex)
        items = terms.items() if isinstance(terms, dict) else terms
        for e, v in items:
            e = tuple(e)
            if e not in idx:
                raise DegreeMismatch(f"exponent {e} is not of degree {degree} in {nvars} variables")
            c[idx[e]] += v
        return cls(nvars, degree, c)

    @classmethod
    def monomial(cls, exp, coef=1.0):
        exp = tuple(exp)
        return cls.from_terms(len(exp), sum(exp), {exp: coef})

    def _like(self, coeffs):
        return type(self)(self.nvars, self.degree, coeffs)

    def coefficient(self, exp) -> complex:
        return complex(self.coeffs[monomial_index(self.nvars, self.degree)[tuple(exp)]])

    def terms(self):
        return [(e, complex(c)) for e, c in zip(monomials(self.nvars, self.degree), self.coeffs)]

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def is_zero(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.norm() <= tol.zero_eps

    def normalized(self):
        n = self.norm()
        return self if n == 0 else self._like(self.coeffs / n)

    def _check(self, other):
        if (self.nvars, self.degree) != (other.nvars, other.degree):
            raise DegreeMismatch(
                f"shape ({self.nvars},{self.degree}) vs ({other.nvars},{other.degree})"
            )

    def __add__(self, other):
        self._check(other)
        return self._like(self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return self._like(self.coeffs - other.coeffs)

    def __neg__(self):
        return self._like(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Form):
            return multiply(self, other)
        return self._like(complex(other) * self.coeffs)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __call__(self, point):
        return evaluate(self, point)

    def __repr__(self):
        return f"{type(self).__name__}({format_form(self)})"


class DualForm(Form):
    """A constant-coefficient differential operator; same layout as Form."""


def linear_form(vec, cls=Form):
    vec = np.asarray(vec, dtype=complex).ravel()
    return cls(vec.size, 1, vec)


def as_dual(f: Form) -> DualForm:
    return DualForm(f.nvars, f.degree, f.coeffs)


def as_form(f: Form) -> Form:
    return Form(f.nvars, f.degree, f.coeffs)


def format_form(f: Form, digits: int = 6) -> str:
    names = VARS if f.nvars <= 3 else tuple(f"x{i}" for i in range(f.nvars))
    parts = []
    for e, c in f.terms():
        if abs(c) == 0:
            continue
        mono = "*".join(
            n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
        )
        coef = format_scalar(c, digits)
        parts.append(f"{coef}*{mono}" if mono else coef)
    return " + ".join(parts) if parts else "0"


def format_scalar(c: complex, digits: int = 6) -> str:
    c = complex(c)
    if c.imag == 0:
        return f"{c.real:.{digits}g}"
    return f"({c.real:.{digits}g}{c.imag:+.{digits}g}i)"


def add(f: Form, g: Form) -> Form:
    return f + g


def scale(c, f: Form) -> Form:
    return f * c


def evaluate(f: Form, point) -> complex:
    p = check_finite(point, "point").ravel()
    if p.size != f.nvars:
        raise DegreeMismatch(f"point of length {p.size} for {f.nvars} variables")
    E = _exponent_array(f.nvars, f.degree)
    return complex(np.sum(f.coeffs * np.prod(p[None, :] ** E, axis=1)))


def power(ell: Form, d: int) -> Form:
    """``ell ** d`` for a linear form, expanded by the multinomial theorem."""
    if ell.degree != 1:
        raise BadDegree("power() expects a linear form")
    v = ell.coeffs
    E = _exponent_array(ell.nvars, d)
    coeffs = _multinomials(ell.nvars, d) * np.prod(v[None, :] ** E, axis=1)
    return type(ell)(ell.nvars, d, coeffs)


def power_coeffs(vec, d: int) -> np.ndarray:
    v = np.asarray(vec, dtype=complex)
    E = _exponent_array(v.size, d)
    return _multinomials(v.size, d) * np.prod(v[None, :] ** E, axis=1)


@lru_cache(maxsize=None)
def _product_table(nvars, d1, d2):
    idx = monomial_index(nvars, d1 + d2)
    m1, m2 = monomials(nvars, d1), monomials(nvars, d2)
    return np.array(
        [[idx[tuple(a + b for a, b in zip(e1, e2))] for e2 in m2] for e1 in m1], dtype=int
    )


def multiply(f: Form, g: Form) -> Form:
    if f.nvars != g.nvars:
        raise DegreeMismatch("forms in different numbers of variables")
    table = _product_table(f.nvars, f.degree, g.degree)
    out = np.zeros(n_monomials(f.nvars, f.degree + g.degree), dtype=complex)
    np.add.at(out, table, np.outer(f.coeffs, g.coeffs))
    return type(f)(f.nvars, f.degree + g.degree, out)


@lru_cache(maxsize=None)
def _polarization_table(nvars, total, delta):
    """Index and factor arrays for t -> t contracted into a degree-``total`` form."""
    d = total - delta
    idx = monomial_index(nvars, total)
    rows, cols = monomials(nvars, d), monomials(nvars, delta)
    index = np.zeros((len(rows), len(cols)), dtype=int)
    factor = np.zeros((len(rows), len(cols)))
    for i, r in enumerate(rows):
        for j, t in enumerate(cols):
            e = tuple(a + b for a, b in zip(r, t))
            index[i, j] = idx[e]
            factor[i, j] = prod(factorial(ek) // factorial(rk) for ek, rk in zip(e, r))
    return index, factor


@dataclass(frozen=True, eq=False)
class PolarizationMap:
    """Matrix of ``t -> t contracted into f`` from degree-``source_degree``
    operators to degree-``target_degree`` forms, monomial bases on both sides."""

    source_degree: int
    target_degree: int
    matrix: np.ndarray

    def rank(self, tol: Tolerance = DEFAULT_TOL) -> int:
        return matrix_rank(self.matrix, tol)

    def __call__(self, t: Form) -> np.ndarray:
        return self.matrix @ t.coeffs


def polarization_matrix(f: Form, delta: int) -> np.ndarray:
    if not 0 <= delta <= f.degree:
        raise BadDegree(f"delta={delta} outside [0, {f.degree}]")
    index, factor = _polarization_table(f.nvars, f.degree, delta)
    return f.coeffs[index] * factor


def polarization(f: Form, delta: int) -> PolarizationMap:
    return PolarizationMap(delta, f.degree - delta, polarization_matrix(f, delta))


def contract(s: Form, x: Form) -> Form:
    """``s`` applied to ``x`` as a differential operator.

    Vanishes (as the degree-0 zero form) when ``deg s > deg x``.  The result
    has the type of ``x``, so contracting a form into an operator gives an
    operator.
    """
    if s.nvars != x.nvars:
        raise DegreeMismatch("contraction across different numbers of variables")
    if s.degree > x.degree:
        return type(x).zero(x.nvars, 0)
    return type(x)(x.nvars, x.degree - s.degree, polarization_matrix(x, s.degree) @ s.coeffs)


def pair(s: Form, x: Form) -> complex:
    if s.nvars != x.nvars or s.degree != x.degree:
        raise DegreeMismatch("pairing needs equal degree and number of variables")
    return complex(contract(s, x).coeffs[0])


def apolar_space(f: Form, k: int, tol: Tolerance = DEFAULT_TOL) -> list[DualForm]:
    """Basis of the degree-``k`` operators annihilating ``f``."""
    basis = kernel_basis(polarization_matrix(f, k), tol)
    return [DualForm(f.nvars, k, v) for v in basis]


@lru_cache(maxsize=None)
def _sym_tensor_tables(nvars, degree):
    """Flat-index maps between coefficient vectors and symmetric tensors."""
    idx = monomial_index(nvars, degree)
    grid = np.indices((nvars,) * degree).reshape(degree, -1).T if degree else np.zeros((1, 0), int)
    counts = np.stack([np.sum(grid == v, axis=1) for v in range(nvars)], axis=1)
    mon = np.array([idx[tuple(c)] for c in counts], dtype=int)
    return mon


def substitute(f: Form, M) -> Form:
    """The form ``u -> f(M u)`` in ``M.shape[1]`` new variables."""
    M = np.asarray(M, dtype=complex)
    if M.shape[0] != f.nvars:
        raise DegreeMismatch(f"substitution matrix has {M.shape[0]} rows, need {f.nvars}")
    n_new, d = M.shape[1], f.degree
    if d == 0:
        return type(f)(n_new, 0, f.coeffs.copy())
    mon_old = _sym_tensor_tables(f.nvars, d)
    T = (f.coeffs / _multinomials(f.nvars, d))[mon_old].reshape((f.nvars,) * d)
    for _ in range(d):
        # contract the leading axis and append the new one at the end
        T = np.tensordot(T, M, axes=([0], [0]))
    mon_new = _sym_tensor_tables(n_new, d)
    out = np.zeros(n_monomials(n_new, d), dtype=complex)
    np.add.at(out, mon_new, T.ravel())
    return type(f)(n_new, d, out)

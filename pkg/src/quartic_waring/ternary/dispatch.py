"""Top-level decomposition of ternary quartics into at most seven fourth powers."""
from __future__ import annotations

import numpy as np

from ..apolarity import DualForm, Form, contract, linear_form, multiply, power, substitute
from ..binary import binary_decompose
from ..decomposition import Decomposition
from ..errors import (
    BadDegree,
    DecompositionFailure,
    DegreeMismatch,
    HypothesisViolation,
    WaringError,
    ZeroForm,
)
from ..numerics import DEFAULT_TOL, Tolerance, projective_distance
from .general import decompose_general, decompose_special
from .reduction import find_apolar_product
from .square import decompose_square
from .system import Dependency, SplitCubic
from .wu import decompose_in_two_variables, decompose_two_lines, two_variable_operator

RETRIES = 5


def _kills(op: DualForm, f: Form, tol) -> bool:
    return contract(op, f).norm() <= tol.residual_eps * f.norm() * max(op.norm(), 1e-300)


def _repeated(f, sc: SplitCubic, tol, rng):
    """A square divides the apolar cubic: find ``l^2 . f = 0`` or an
    independent annihilating pair."""
    vs = sc.factors
    for v in vs:
        if _kills(power(linear_form(v, DualForm), 2), f, tol):
            return decompose_square(f, v, tol, rng)
    for i in range(3):
        for j in range(i):
            if projective_distance(vs[i], vs[j]) > np.sqrt(tol.rank_eps):
                prod = multiply(linear_form(vs[i], DualForm), linear_form(vs[j], DualForm))
                if _kills(prod, f, tol):
                    return decompose_two_lines(f, vs[i], vs[j], tol, rng)
    raise HypothesisViolation("repeated factor without a usable square or pair", None)


def _ternary(f: Form, tol: Tolerance, rng) -> Decomposition:
    ell = two_variable_operator(f, tol)
    if ell is not None:
        return decompose_in_two_variables(f, ell, tol, rng)
    sc = find_apolar_product(f, tol, rng=rng)
    if sc.dependency is Dependency.INDEPENDENT:
        return decompose_general(f, sc, tol, rng)
    if sc.dependency is Dependency.PAIRWISE_ONLY:
        try:
            return decompose_special(f, sc, tol, rng)
        except HypothesisViolation as e:
            if e.operator is None:
                raise
            return decompose_square(f, e.operator, tol, rng)
    return _repeated(f, sc, tol, rng)


def _random_change(rng) -> np.ndarray:
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    Q, _ = np.linalg.qr(A)
    return Q


def waring_decompose(f: Form, tol: Tolerance = DEFAULT_TOL, seed: int = 0, retries: int = RETRIES) -> Decomposition:
    """At most seven (ternary) or four (binary) fourth powers summing to ``f``.

    The returned terms are normalized; ``diagnostics`` records the attempt
    that succeeded.
    """
    if f.degree != 4:
        raise BadDegree(f"expected a quartic, got degree {f.degree}")
    if f.nvars not in (2, 3):
        raise DegreeMismatch(f"expected 2 or 3 variables, got {f.nvars}")
    if f.norm() <= tol.zero_eps:
        raise ZeroForm("the zero form has no decomposition")
    rng = np.random.default_rng(seed)
    if f.nvars == 2:
        return binary_decompose(f, tol, rng).normalized()
    limit = 7
    errors = []
    for attempt in range(retries + 1):
        A = np.eye(3, dtype=complex) if attempt == 0 else _random_change(rng)
        g = substitute(f, A)
        try:
            d = _ternary(g, tol, rng)
        except WaringError as e:
            errors.append(f"{type(e).__name__}: {e}")
            continue
        except (np.linalg.LinAlgError, ValueError, ZeroDivisionError) as e:
            errors.append(f"{type(e).__name__}: {e}")
            continue
        # g(u) = f(A u), so a term (w . u)^4 of g is (A^{-T} w . x)^4 of f
        out = d.mapped(np.linalg.inv(A).T, nvars=3)
        res = out.residual(f)
        if len(out) <= limit and res <= tol.residual_eps:
            out = out.normalized()
            out.diagnostics.update({"attempt": attempt, "residual": res})
            return out
        errors.append(f"attempt {attempt}: {len(out)} terms, residual {res:.2e}")
    raise DecompositionFailure("no valid decomposition within the retry budget", {"errors": errors})

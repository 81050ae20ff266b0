"""Independent checks: catalecticant lower bounds and brute-force low-rank fits."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np
from scipy.optimize import least_squares

from .apolarity import Form, monomials, polarization_matrix, power_coeffs
from .decomposition import Decomposition
from .numerics import DEFAULT_TOL, Tolerance, matrix_rank


def cat_lower_bound(f: Form, tol: Tolerance = DEFAULT_TOL) -> int:
    """Largest catalecticant rank; never exceeds the Waring rank."""
    return max(matrix_rank(polarization_matrix(f, k), tol) for k in range(f.degree + 1))


def random_rank_form(r: int, seed: int = 0, nvars: int = 3, degree: int = 4):
    """``sum(l_i^degree)`` for ``r`` unit-norm complex Gaussian linear forms."""
    if not 1 <= r <= 15:
        raise ValueError("r must be in 1..15")
    rng = np.random.default_rng(seed)
    ells = rng.standard_normal((r, nvars)) + 1j * rng.standard_normal((r, nvars))
    ells /= np.linalg.norm(ells, axis=1, keepdims=True)
    coeffs = sum(power_coeffs(ell, degree) for ell in ells)
    return Form(nvars, degree, coeffs), list(ells)


@lru_cache(maxsize=None)
def _power_model(nvars: int, degree: int):
    exps = np.array(monomials(nvars, degree))
    multi = np.array([factorial(degree) / np.prod([factorial(e) for e in row]) for row in exps])
    return exps, multi


class PowerSumModel:
    """Residual ``(sum_i (a_i . x)^d - f) / |f|`` over real parameters
    ``[Re a, Im a]`` with its closed-form Jacobian."""

    def __init__(self, f: Form, r: int):
        self.f = f
        self.r = r
        self.n = f.nvars
        self.scale = f.norm() or 1.0
        self.exps, self.multi = _power_model(f.nvars, f.degree)

    def unpack(self, theta) -> np.ndarray:
        k = self.r * self.n
        return (theta[:k] + 1j * theta[k:]).reshape(self.r, self.n)

    @staticmethod
    def pack(a) -> np.ndarray:
        a = np.asarray(a, dtype=complex).ravel()
        return np.concatenate([a.real, a.imag])

    def _powers(self, a):
        d = self.f.degree
        # pw[i, k, p] = a[i, k] ** p
        return a[:, :, None] ** np.arange(d + 1)[None, None, :]

    def complex_residual(self, a) -> np.ndarray:
        pw = self._powers(a)
        terms = np.ones((self.r, len(self.exps)), dtype=complex)
        for k in range(self.n):
            terms *= pw[:, k, self.exps[:, k]]
        pred = (terms * self.multi).sum(axis=0)
        return (pred - self.f.coeffs) / self.scale

    def residual(self, theta) -> np.ndarray:
        res = self.complex_residual(self.unpack(theta))
        return np.concatenate([res.real, res.imag])

    def complex_jacobian(self, a) -> np.ndarray:
        """``J[m, i, j] = d residual_m / d a[i, j]`` (holomorphic)."""
        pw = self._powers(a)
        J = np.empty((len(self.exps), self.r, self.n), dtype=complex)
        for j in range(self.n):
            e = self.exps[:, j]
            part = e * pw[:, j, np.maximum(e - 1, 0)]
            for k in range(self.n):
                if k != j:
                    part = part * pw[:, k, self.exps[:, k]]
            J[:, :, j] = (part * self.multi).T
        return J / self.scale

    def jacobian(self, theta) -> np.ndarray:
        J = self.complex_jacobian(self.unpack(theta)).reshape(len(self.exps), -1)
        # d/dRe = J, d/dIm = iJ
        top = np.concatenate([J.real, -J.imag], axis=1)
        bottom = np.concatenate([J.imag, J.real], axis=1)
        return np.concatenate([top, bottom], axis=0)

    def objective(self, theta) -> float:
        res = self.residual(theta)
        return float(res @ res)

    def gradient(self, theta) -> np.ndarray:
        return 2 * self.jacobian(theta).T @ self.residual(theta)


@dataclass
class FitReport:
    target_rank: int
    best_residual: float
    restarts: int
    best_terms: Decomposition

    def to_dict(self) -> dict:
        return {
            "target_rank": self.target_rank,
            "best_residual": self.best_residual,
            "restarts": self.restarts,
            "best_terms": self.best_terms.to_dict(),
        }


def _fit_once(model: PowerSumModel, a0, max_nfev):
    theta0 = PowerSumModel.pack(a0)
    # zero rows keep Levenberg-Marquardt usable when parameters outnumber residuals
    pad = max(0, theta0.size - 2 * len(model.exps))

    def fun(theta):
        return np.concatenate([model.residual(theta), np.zeros(pad)])

    def jac(theta):
        J = model.jacobian(theta)
        return np.concatenate([J, np.zeros((pad, J.shape[1]))])

    sol = least_squares(
        fun, theta0, jac=jac, method="lm",
        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev,
    )
    return sol.x, float(np.linalg.norm(model.residual(sol.x)))


def numeric_rank_fit(
    f: Form,
    r: int,
    restarts: int = 50,
    seed: int = 0,
    warm_start=None,
    stop_below: float = 0.0,
    max_nfev: int = 400,
) -> FitReport:
    """Best relative residual of ``sum of r fourth powers ~ f`` over restarts.

    ``warm_start`` (an array of at most ``r`` linear forms) adds one extra
    restart that starts from those forms padded with small random rows, so a
    chain of fits in increasing ``r`` is non-increasing.  Restarts stop early
    once the residual drops to ``stop_below``.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    model = PowerSumModel(f, r)
    rng = np.random.default_rng(seed)
    scale = model.scale ** (1 / f.degree)
    starts = []
    if warm_start is not None and len(warm_start):
        w = np.asarray(warm_start, dtype=complex)[:r]
        pad = 1e-3 * scale * (rng.standard_normal((r - len(w), f.nvars)) + 1j * rng.standard_normal((r - len(w), f.nvars)))
        starts.append(np.concatenate([w, pad]))
    for _ in range(restarts):
        starts.append(scale * (rng.standard_normal((r, f.nvars)) + 1j * rng.standard_normal((r, f.nvars))) / np.sqrt(2 * r))
    best_theta, best_res, done = None, np.inf, 0
    for a0 in starts:
        theta, res = _fit_once(model, a0, max_nfev)
        done += 1
        if res < best_res:
            best_theta, best_res = theta, res
        if best_res <= stop_below:
            break
    a = model.unpack(best_theta)
    terms = Decomposition([(1.0 + 0j, row) for row in a], f.nvars, f.degree, "FIT")
    return FitReport(r, best_res, done, terms)


def model_gradient_check(f: Form, r: int, seed: int = 0, h: float = 1e-5) -> float:
    """Max relative gap between the closed-form gradient and central differences."""
    if r == 0:
        return 0.0
    model = PowerSumModel(f, r)
    rng = np.random.default_rng(seed)
    theta = rng.standard_normal(2 * r * f.nvars) * 0.7
    g = model.gradient(theta)
    fd = np.empty_like(g)
    for k in range(len(theta)):
        e = np.zeros_like(theta)
        e[k] = h
        fd[k] = (model.objective(theta + e) - model.objective(theta - e)) / (2 * h)
    denom = max(np.abs(g).max(), np.abs(fd).max(), 1e-300)
    return float(np.abs(g - fd).max() / denom)

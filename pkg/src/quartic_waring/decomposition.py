from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .apolarity import Form, linear_form, n_monomials, power_coeffs


@dataclass
class Decomposition:
    """``f = sum(c * ell**degree)`` over ``terms``; linear forms are vectors."""

    terms: list
    nvars: int
    degree: int
    provenance: str = "BINARY"
    diagnostics: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def to_form(self) -> Form:
        out = np.zeros(n_monomials(self.nvars, self.degree), dtype=complex)
        for c, ell in self.terms:
            out += c * power_coeffs(ell, self.degree)
        return Form(self.nvars, self.degree, out)

    def residual(self, f: Form) -> float:
        """Relative coefficient-norm residual against ``f``."""
        n = f.norm()
        diff = np.linalg.norm(self.to_form().coeffs - f.coeffs)
        return float(diff / n) if n > 0 else float(diff)

    def normalized(self) -> "Decomposition":
        """Unit-norm linear forms with the largest entry real positive,
        sorted by decreasing ``|c|``."""
        out = []
        for c, ell in self.terms:
            ell = np.asarray(ell, dtype=complex)
            n = np.linalg.norm(ell)
            if n == 0 or c == 0:
                continue
            ell = ell / n
            k = int(np.argmax(np.abs(ell) > np.abs(ell).max() * (1 - 1e-12)))
            phase = ell[k] / abs(ell[k])
            ell = ell / phase
            out.append((complex(c) * (n * phase) ** self.degree, ell))
        out.sort(key=lambda t: -abs(t[0]))
        return Decomposition(out, self.nvars, self.degree, self.provenance, dict(self.diagnostics))

    def mapped(self, basis, nvars=None, provenance=None) -> "Decomposition":
        """Re-express linear forms through ``vec -> basis @ vec``."""
        basis = np.asarray(basis, dtype=complex)
        terms = [(c, basis @ np.asarray(ell)) for c, ell in self.terms]
        return Decomposition(
            terms, nvars or basis.shape[0], self.degree,
            provenance or self.provenance, dict(self.diagnostics),
        )

    def linear_forms(self):
        return [linear_form(ell) for _, ell in self.terms]

    @staticmethod
    def concat(parts, provenance) -> "Decomposition":
        parts = [p for p in parts if p is not None]
        terms = [t for p in parts for t in p.terms]
        return Decomposition(terms, parts[0].nvars, parts[0].degree, provenance)

    def to_dict(self, f: Form | None = None) -> dict:
        d = {
            "terms": [
                {"coef": [c.real, c.imag], "linear": [[z.real, z.imag] for z in np.asarray(ell, complex)]}
                for c, ell in ((complex(c), ell) for c, ell in self.terms)
            ],
            "provenance": self.provenance,
        }
        if f is not None:
            d["residual"] = self.residual(f)
        return d

    @classmethod
    def from_dict(cls, d, degree) -> "Decomposition":
        terms = [
            (complex(*t["coef"]), np.array([complex(*z) for z in t["linear"]]))
            for t in d["terms"]
        ]
        nvars = len(terms[0][1]) if terms else 3
        return cls(terms, nvars, degree, d.get("provenance", ""))

"""Command-line front end.

Polynomials are given as text such as ``"x0^2*x1^2 - 2x0^3*x2"`` (complex
constants as ``(1.5-2i)``) or as a JSON document
``{"nvars": 3, "degree": 4, "terms": [{"exp": [4, 0, 0], "coef": [1, 0]}]}``.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys

import numpy as np

from .apolarity import Form, contract, monomials, multiply, pair, polarization_matrix
from .binary import (
    TANGENT_L,
    QuarticStratum,
    binary_decompose,
    binary_rank,
    classify_plane,
    classify_plane_degenerate,
    quartic_stratum,
)
from .decomposition import Decomposition
from .errors import InhomogeneousError, ParseError, WaringError
from .numerics import DEFAULT_TOL, Tolerance
from .oracle import cat_lower_bound, model_gradient_check, numeric_rank_fit, random_rank_form
from .ternary.dispatch import waring_decompose

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<var>x(?P<idx>\d+))"
    r"|(?P<op>[-+*^()])"
    r"|(?P<imag>i)"
    r")"
)


def _tokens(text):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup) if m.lastgroup else pos
        if m.group("num") is not None:
            out.append(("num", float(m.group("num")), start))
        elif m.group("var") is not None:
            out.append(("var", int(m.group("idx")), start))
        elif m.group("op") is not None:
            out.append((m.group("op"), None, start))
        else:
            out.append(("i", None, start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokens(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self, kind=None):
        tok = self.toks[self.k]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[0]!r}", tok[2])
        self.k += 1
        return tok

    def complex_constant(self):
        """``(re)``, ``(im i)``, ``(re+im i)``."""
        self.take("(")
        sign = 1.0
        if self.peek()[0] in "+-":
            sign = -1.0 if self.take()[0] == "-" else 1.0
        first = sign * self.take("num")[1]
        if self.peek()[0] == "i":
            self.take()
            self.take(")")
            return complex(0, first)
        if self.peek()[0] == ")":
            self.take()
            return complex(first)
        op = self.take()
        if op[0] not in "+-":
            raise ParseError("expected '+' or '-' inside a complex constant", op[2])
        second = self.take("num")[1] * (-1 if op[0] == "-" else 1)
        self.take("i")
        self.take(")")
        return complex(first, second)

    def term(self):
        sign = 1.0
        while self.peek()[0] in "+-":
            if self.take()[0] == "-":
                sign = -sign
        coef = complex(sign)
        exps = {}
        seen = False
        while True:
            kind, val, pos = self.peek()
            if kind == "num":
                self.take()
                coef *= val
            elif kind == "(":
                coef *= self.complex_constant()
            elif kind == "var":
                self.take()
                e = 1
                if self.peek()[0] == "^":
                    self.take()
                    e = int(self.take("num")[1])
                exps[val] = exps.get(val, 0) + e
            else:
                break
            seen = True
            if self.peek()[0] == "*":
                self.take()
                if self.peek()[0] not in ("num", "(", "var"):
                    raise ParseError("dangling '*'", self.peek()[2])
        if not seen:
            raise ParseError(f"expected a term, found {self.peek()[0]!r}", self.peek()[2])
        return coef, exps

    def polynomial(self):
        terms = [self.term()]
        while self.peek()[0] in "+-":
            terms.append(self.term())
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[0]!r}", tok[2])
        return terms


def form_from_document(doc: dict) -> Form:
    try:
        nvars, degree = int(doc["nvars"]), int(doc["degree"])
        terms = doc["terms"]
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"malformed polynomial document: {e}", 0) from None
    if nvars not in (2, 3):
        raise ParseError("nvars must be 2 or 3", 0)
    seen = set()
    data = {}
    for t in terms:
        exp = tuple(int(e) for e in t["exp"])
        if len(exp) != nvars:
            raise ParseError(f"exponent {exp} does not have {nvars} entries", 0)
        if sum(exp) != degree:
            raise InhomogeneousError(f"exponent {exp} is not of degree {degree}", 0)
        if exp in seen:
            raise ParseError(f"repeated exponent {exp}", 0)
        seen.add(exp)
        re_, im = t["coef"]
        data[exp] = complex(re_, im)
    return Form.from_terms(nvars, degree, data)


def form_to_document(f: Form) -> dict:
    return {
        "nvars": f.nvars,
        "degree": f.degree,
        "terms": [
            {"exp": list(e), "coef": [c.real, c.imag]}
            for e, c in f.terms() if c != 0
        ],
    }


def parse_polynomial(text: str, nvars: int | None = None) -> Form:
    """Text or JSON document -> homogeneous ``Form``."""
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", e.pos) from None
        return form_from_document(doc)
    terms = _Parser(text).polynomial()
    top = max((max(ex) for _, ex in terms if ex), default=0)
    n = nvars if nvars is not None else max(2, top + 1)
    if top >= n or n not in (2, 3):
        raise ParseError(f"variables must be among x0..x{n - 1} with 2 or 3 variables", 0)
    degrees = {sum(ex.values()) for _, ex in terms}
    if len(degrees) > 1:
        raise InhomogeneousError(f"terms of different degrees {sorted(degrees)}", 0)
    degree = degrees.pop()
    data = {}
    for c, ex in terms:
        exp = tuple(ex.get(k, 0) for k in range(n))
        data[exp] = data.get(exp, 0) + c
    return Form.from_terms(n, degree, data)


def _num(z) -> str:
    z = complex(z)
    if abs(z.imag) <= 1e-14 * max(1.0, abs(z.real)):
        return f"{z.real:.10g}"
    return f"({z.real:.10g}{z.imag:+.10g}i)"


def _linear(vec) -> str:
    return " + ".join(f"{_num(c)}*x{k}" for k, c in enumerate(vec))


def _decomposition_document(d: Decomposition, f: Form) -> dict:
    return d.to_dict(f)


def _tol(args) -> Tolerance:
    if args.tol is None:
        return DEFAULT_TOL
    return Tolerance(zero_eps=min(DEFAULT_TOL.zero_eps, args.tol * 1e-2), rank_eps=min(DEFAULT_TOL.rank_eps, args.tol), residual_eps=args.tol)


def cmd_decompose(args, out) -> int:
    f = parse_polynomial(args.poly, args.nvars)
    tol = _tol(args)
    d = waring_decompose(f, tol, seed=args.seed)
    res = d.residual(f)
    ok = len(d) <= (7 if f.nvars == 3 else 4) and res <= tol.residual_eps
    if args.json:
        print(json.dumps(_decomposition_document(d, f)), file=out)
    else:
        print(f"terms: {len(d)}", file=out)
        for c, ell in d.terms:
            print(f"  {_num(c)} * ({_linear(ell)})^4", file=out)
        print(f"residual: {res:.3e}", file=out)
        print(f"provenance: {d.provenance}", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def _parse_oracle(spec: str):
    opts = {"r": None, "restarts": 50}
    for part in spec.split(","):
        key, _, val = part.partition("=")
        if key.strip() not in opts or not val:
            raise ParseError(f"bad oracle option {part!r}; expected r=K,restarts=N", 0)
        opts[key.strip()] = int(val)
    if opts["r"] is None or opts["r"] < 1:
        raise ParseError("oracle needs r=K with K >= 1", 0)
    return opts


def cmd_rank(args, out) -> int:
    f = parse_polynomial(args.poly, args.nvars)
    tol = _tol(args)
    lb = cat_lower_bound(f, tol)
    d = waring_decompose(f, tol, seed=args.seed)
    report = {"cat_lower_bound": lb, "decomposition_length": len(d), "residual": d.residual(f)}
    if args.oracle:
        opts = _parse_oracle(args.oracle)
        fit = numeric_rank_fit(f, opts["r"], opts["restarts"], seed=args.seed)
        report["fit"] = {"r": fit.target_rank, "restarts": fit.restarts, "best_residual": fit.best_residual}
    if args.json:
        print(json.dumps(report), file=out)
    else:
        print(f"catalecticant lower bound: {lb}", file=out)
        print(f"decomposition length: {len(d)} (residual {report['residual']:.3e})", file=out)
        if "fit" in report:
            fr = report["fit"]
            print(f"best rank-{fr['r']} fit residual: {fr['best_residual']:.3e} over {fr['restarts']} restarts", file=out)
    return EXIT_OK if report["residual"] <= tol.residual_eps else EXIT_FAIL


def _proportional(g: Form, h: Form, tol) -> bool:
    M = np.stack([g.coeffs, h.coeffs])
    s = np.linalg.svd(M, compute_uv=False)
    return s[0] > 0 and s[1] <= tol.rank_eps * s[0]


def cmd_classify(args, out) -> int:
    f0 = parse_polynomial(args.f0, 2)
    parts = args.L.split(",")
    if len(parts) != 2:
        raise ParseError("--L expects two comma-separated binary quartics", 0)
    y, z = (parse_polynomial(p, 2) for p in parts)
    tol = _tol(args)
    if _proportional(y, TANGENT_L[0], tol) and _proportional(z, TANGENT_L[1], tol):
        cfg = classify_plane_degenerate(f0, tol)
    else:
        cfg = classify_plane(f0, y, z, tol)
    desc = cfg.describe()
    if args.json:
        print(json.dumps(desc), file=out)
    else:
        print(f"case: {desc['case']}", file=out)
        print(f"locus ({desc['locus_kind']}): " + " + ".join(
            f"{_num(complex(*c))}*{k}" for k, c in desc["locus"].items()) + " = 0", file=out)
        for key in ("singular_point", "infinity", "line", "r_prime"):
            if key in desc:
                print(f"{key}: {desc[key]}", file=out)
    return EXIT_OK


def _calculus_suite(n, rng):
    def rand(nv, d):
        return Form(nv, d, rng.standard_normal(len(monomials(nv, d))) + 1j * rng.standard_normal(len(monomials(nv, d))))

    leib = comp = perm = 0.0
    for _ in range(n):
        s, x, y = rand(3, 1), rand(3, 2), rand(3, 2)
        lhs = contract(s, multiply(x, y))
        rhs = multiply(contract(s, x), y) + multiply(x, contract(s, y))
        leib = max(leib, np.abs(lhs.coeffs - rhs.coeffs).max() / max(1.0, np.abs(lhs.coeffs).max()))
        s, t, x = rand(3, 1), rand(3, 2), rand(3, 4)
        lhs = contract(multiply(s, t), x)
        rhs = contract(s, contract(t, x))
        comp = max(comp, np.abs(lhs.coeffs - rhs.coeffs).max() / max(1.0, np.abs(lhs.coeffs).max()))
        e = monomials(3, 4)[rng.integers(15)]
        f = monomials(3, 4)[rng.integers(15)]
        got = pair(Form.monomial(e), Form.monomial(f))
        want = float(np.prod([math.factorial(k) for k in e])) if e == f else 0.0
        perm = max(perm, abs(got - want))
    return {"leibniz": float(leib), "composition": float(comp), "pairing": float(perm)}


def _binary_suite(n, rng, tol):
    bad_stratum = bad_rank = 0
    worst = 0.0
    for _ in range(n):
        f = Form(2, 4, rng.standard_normal(5) + 1j * rng.standard_normal(5))
        st = quartic_stratum(f, tol)
        cat = np.linalg.svd(polarization_matrix(f, 2), compute_uv=False)
        generic = cat[2] > tol.rank_eps * cat[0]
        bad_stratum += generic != (st is QuarticStratum.GENERIC)
        d = binary_decompose(f, tol)
        bad_rank += len(d) != st.rank or binary_rank(f, tol) != st.rank
        worst = max(worst, d.residual(f))
    return {"stratum_mismatches": int(bad_stratum), "rank_mismatches": int(bad_rank), "max_residual": float(worst)}


def _ternary_suite(n, rng, tol):
    failures = 0
    longest = 0
    worst = 0.0
    for k in range(n):
        f = Form(3, 4, rng.standard_normal(15))
        try:
            d = waring_decompose(f, tol, seed=k)
        except WaringError:
            failures += 1
            continue
        longest = max(longest, len(d))
        worst = max(worst, d.residual(f))
    return {"failures": failures, "max_terms": longest, "max_residual": float(worst)}


def selftest_report(n: int, seed: int, tol: Tolerance = DEFAULT_TOL) -> dict:
    rng = np.random.default_rng(seed)
    calc = _calculus_suite(n, rng)
    binary = _binary_suite(n, rng, tol)
    ternary = _ternary_suite(n, rng, tol)
    grad = max(
        model_gradient_check(Form(3, 4, rng.standard_normal(15)), 1 + k % 6, seed=seed + k)
        for k in range(min(n, 100))
    )
    checks = {
        "calculus": max(calc.values()) <= 1e-10,
        "binary": binary["stratum_mismatches"] == 0 and binary["rank_mismatches"] == 0
        and binary["max_residual"] <= tol.residual_eps,
        "ternary": ternary["failures"] == 0 and ternary["max_terms"] <= 7
        and ternary["max_residual"] <= tol.residual_eps,
        "gradient": grad <= 1e-5,
    }
    return {
        "seed": seed,
        "n": n,
        "calculus": calc,
        "binary": binary,
        "ternary": ternary,
        "gradient": {"max_discrepancy": float(grad)},
        "checks": {k: bool(v) for k, v in checks.items()},
        "passed": bool(all(checks.values())),
    }


def cmd_selftest(args, out) -> int:
    report = selftest_report(args.n, args.seed)
    print(json.dumps(report, sort_keys=True), file=out)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_sample(args, out) -> int:
    status = EXIT_OK
    for k in range(args.count):
        f, ells = random_rank_form(args.rank, seed=args.seed + k)
        line = {"seed": args.seed + k, "rank": args.rank, "form": form_to_document(f),
                "witnesses": [[[z.real, z.imag] for z in ell] for ell in ells],
                "cat_lower_bound": cat_lower_bound(f)}
        try:
            d = waring_decompose(f, seed=args.seed + k)
            line["decomposition"] = _decomposition_document(d, f)
            if len(d) > 7 or d.residual(f) > DEFAULT_TOL.residual_eps:
                status = EXIT_FAIL
        except WaringError as e:
            line["error"] = f"{type(e).__name__}: {e}"
            status = EXIT_FAIL
        print(json.dumps(line), file=out)
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quartic-waring", description="Waring decompositions of plane quartics.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, poly=True):
        if poly:
            sp.add_argument("poly", help="polynomial text or JSON document")
            sp.add_argument("--nvars", type=int, choices=(2, 3), default=None)
        sp.add_argument("--tol", type=float, default=None, help="residual tolerance")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("decompose", help="at most seven fourth powers")
    common(sp)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("rank", help="rank bounds")
    common(sp)
    sp.add_argument("--oracle", default=None, help="r=K,restarts=N")
    sp.set_defaults(func=cmd_rank)

    sp = sub.add_parser("classify", help="rank geometry of span(f0, y, z)")
    sp.add_argument("f0")
    sp.add_argument("--L", required=True, help="y,z")
    common(sp, poly=False)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("selftest", help="run the invariant suites")
    sp.add_argument("--n", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_selftest)

    sp = sub.add_parser("sample", help="random instances as JSON lines")
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_sample)
    return p


def run(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (WaringError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL


def main():
    sys.exit(run())

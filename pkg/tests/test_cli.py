import io
import json

import numpy as np
import pytest

from quartic_waring.apolarity import Form
from quartic_waring.cli import form_to_document, parse_polynomial, run
from quartic_waring.decomposition import Decomposition
from quartic_waring.errors import InhomogeneousError, ParseError


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_parse_ternary():
    f = parse_polynomial("x0^4 + x1^4 + x2^4")
    assert f.nvars == 3 and f.degree == 4
    assert [f.coefficient(e) for e in ((4, 0, 0), (0, 4, 0), (0, 0, 4))] == [1, 1, 1]


def test_parse_binary_with_implicit_product():
    f = parse_polynomial("x0^2*x1^2 - 2x0^3*x1")
    assert f.nvars == 2
    assert f.coefficient((2, 2)) == 1 and f.coefficient((3, 1)) == -2


def test_parse_complex_constants():
    f = parse_polynomial("(1.5-2i)x0^4 + (3i)*x1 x2^3 - (2)x2^4")
    assert f.coefficient((4, 0, 0)) == 1.5 - 2j
    assert f.coefficient((0, 1, 3)) == 3j
    assert f.coefficient((0, 0, 4)) == -2


def test_inhomogeneous_rejected():
    with pytest.raises(InhomogeneousError):
        parse_polynomial("x0^3 + x1^4")


@pytest.mark.parametrize("text", ["x0^4 +", "x0^^4", "x0^4 $ x1^4", "(1+2)x0^4", "x7^4"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_polynomial(text)


def test_document_round_trip(rng):
    f = Form(3, 4, rng.standard_normal(15) + 1j * rng.standard_normal(15))
    g = parse_polynomial(json.dumps(form_to_document(f)))
    assert np.abs(g.coeffs - f.coeffs).max() <= 1e-10


def test_decompose_power():
    code, out = call("decompose", "x0^4")
    assert code == 0 and out.startswith("terms: 1")


def test_decompose_witness_json_reproduces_residual():
    code, out = call("decompose", "x0^2*x1^2 - x0^3*x2", "--json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["terms"]) <= 7
    d = Decomposition.from_dict(doc, 4)
    f = parse_polynomial("x0^2*x1^2 - x0^3*x2")
    assert np.isclose(d.residual(f), doc["residual"], rtol=1e-6, atol=1e-15)


def test_classify_c2():
    code, out = call("classify", "x0^3*x1", "--L", "x0^4,x1^4")
    assert code == 0 and "case: C2" in out


def test_classify_tangent_plane_json():
    code, out = call("classify", "x0^2*x1^2", "--L", "x0^4,x0^3*x1", "--json")
    assert code == 0 and json.loads(out)["case"] == "D2"


def test_rank_with_oracle():
    code, out = call("rank", "x0^4 + x1^4 + x2^4", "--oracle", "r=3,restarts=3", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["cat_lower_bound"] == 3 and doc["fit"]["best_residual"] < 1e-6


def test_sample_lines():
    code, out = call("sample", "--rank", "2", "--count", "3", "--seed", "7")
    lines = [json.loads(s) for s in out.splitlines()]
    assert code == 0 and len(lines) == 3
    assert all(len(s["decomposition"]["terms"]) <= 7 for s in lines)


def test_usage_and_parse_errors_exit_two():
    assert call("nonsense")[0] == 2
    assert call("decompose", "x0^3 + x1^4")[0] == 2
    assert call("rank", "x0^4", "--oracle", "q=1")[0] == 2


def test_selftest_small():
    code, out = call("selftest", "--n", "20", "--seed", "3")
    assert code == 0 and json.loads(out)["passed"]

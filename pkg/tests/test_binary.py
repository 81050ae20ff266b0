import numpy as np
import pytest

from quartic_waring.apolarity import Form
from quartic_waring.binary import (
    QuarticStratum,
    binary_decompose,
    binary_rank,
    classify_plane,
    classify_plane_degenerate,
    quartic_stratum,
)
from quartic_waring.errors import DimensionCollapse, ZeroForm

from conftest import random_form


def b(*exp):
    return Form.monomial(tuple(exp))


X4, Y4 = b(4, 0), b(0, 4)


@pytest.mark.parametrize("f, r", [(b(4, 0), 1), (b(3, 1), 4), (b(2, 2), 3), (b(4, 0) + b(0, 4), 2)])
def test_binary_rank_examples(f, r):
    assert binary_rank(f) == r
    d = binary_decompose(f)
    assert len(d) == r
    assert d.residual(f) <= 1e-6


def test_two_powers_decompose_along_axes():
    d = binary_decompose(b(4, 0) + b(0, 4)).normalized()
    dirs = sorted(np.argmax(np.abs(ell)) for _, ell in d.terms)
    assert dirs == [0, 1]


def test_quadric_x0x1_has_two_terms():
    f = Form.monomial((1, 1))
    d = binary_decompose(f)
    assert len(d) == 2 and d.residual(f) < 1e-12


def test_zero_form_rejected():
    with pytest.raises(ZeroForm):
        binary_rank(Form.zero(2, 4))


@pytest.mark.parametrize("f, s", [
    (b(4, 0), QuarticStratum.POWER),
    (b(4, 0) + b(0, 4), QuarticStratum.SECANT),
    (b(2, 2), QuarticStratum.GENERIC),
    (b(3, 1), QuarticStratum.TANGENT),
    (Form.zero(2, 4), QuarticStratum.ZERO),
])
def test_strata(f, s):
    assert quartic_stratum(f) is s


def test_random_quartics_respect_rank_bound(rng):
    for _ in range(200):
        f = random_form(rng, 2, 4)
        d = binary_decompose(f)
        assert len(d) <= 4 and d.residual(f) <= 1e-6


def test_hand_planes():
    c = classify_plane(b(2, 2), X4, Y4)
    assert c.case == "C11" and c.locus_kind == "conic"
    # det = 4(144ab - 4): zero on ab = 1/36
    assert abs(c.locus_value(6.0, 1 / 216)) < 1e-9 * c.scale()
    c = classify_plane(b(3, 1) + b(1, 3), X4, Y4)
    assert c.case == "C12"
    assert abs(c.locus_value(0.7, -0.7)) < 1e-9 * c.scale()
    c = classify_plane(b(3, 1), X4, Y4)
    assert c.case == "C2" and c.r_prime == "line" and c.infinity == "y"
    assert abs(c.locus_value(5.0, 0.0)) < 1e-9 * c.scale()


def test_reducible_conic_has_rank_one_point():
    # (x0 + x1)^4 minus its pure powers gives a plane whose locus splits
    f0 = b(3, 1) * 4 + b(2, 2) * 6 + b(1, 3) * 4
    c = classify_plane(f0, X4, Y4)
    assert c.case == "C11" and c.locus_kind == "reducible_conic"
    assert c.r_prime == []
    a, bb = c.singular_point
    assert quartic_stratum(c.point_form(a, bb)) is QuarticStratum.POWER


def test_collapsed_plane_rejected():
    with pytest.raises(DimensionCollapse):
        classify_plane(X4 + Y4, X4, Y4)


def test_degenerate_planes():
    c = classify_plane_degenerate(b(2, 2))
    assert c.case == "D2" and c.r_prime == []
    c = classify_plane_degenerate(b(0, 4))
    assert c.case in ("D11", "D12") and c.locus_kind != "empty"
    c = classify_plane_degenerate(b(0, 4) + b(1, 3) * 4 + b(2, 2) * 6)
    assert c.case == "D11" and c.locus_kind == "double_line"
    a, bb = c.singular_point
    assert np.allclose((a, bb), (1, 4))
    assert quartic_stratum(c.point_form(a, bb)) is QuarticStratum.POWER


def test_parabola_tangent_points_have_rank_four():
    c = classify_plane_degenerate(b(2, 2) + b(0, 4))
    assert c.case == "D11" and c.locus_kind == "parabola"
    assert len(c.r_prime) == 2
    for a, bb in c.r_prime:
        assert quartic_stratum(c.point_form(a, bb)) is QuarticStratum.TANGENT

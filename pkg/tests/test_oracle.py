import numpy as np
import pytest

from quartic_waring.apolarity import Form
from quartic_waring.oracle import (
    PowerSumModel,
    cat_lower_bound,
    model_gradient_check,
    numeric_rank_fit,
    random_rank_form,
)
from quartic_waring.ternary.dispatch import waring_decompose

from conftest import mono, random_form


def test_lower_bound_examples():
    assert cat_lower_bound(mono(4, 0, 0)) == 1
    assert cat_lower_bound(mono(4, 0, 0) + mono(0, 4, 0) + mono(0, 0, 4)) == 3
    assert cat_lower_bound(Form.monomial((2, 2))) == 3


def test_fit_exact_power():
    rep = numeric_rank_fit(mono(4, 0, 0), 1, restarts=5)
    assert rep.best_residual <= 1e-8
    assert np.isclose(rep.best_terms.residual(mono(4, 0, 0)), rep.best_residual, atol=1e-12)


def test_fit_two_powers_with_one_term_stays_away_from_zero():
    rep = numeric_rank_fit(mono(4, 0, 0) + mono(0, 4, 0), 1, restarts=50)
    assert rep.best_residual >= 1e-3


def test_fit_recovers_rank_three():
    f, _ = random_rank_form(3, seed=11)
    assert cat_lower_bound(f) <= 3
    assert numeric_rank_fit(f, 3, restarts=50, seed=11, stop_below=1e-10).best_residual <= 1e-6


def test_rank_one_instance_is_a_power():
    f, ells = random_rank_form(1, seed=4)
    assert len(ells) == 1 and cat_lower_bound(f) == 1


def test_rank_six_instance_decomposes():
    f, _ = random_rank_form(6, seed=2)
    d = waring_decompose(f)
    assert len(d) <= 7 and d.residual(f) <= 1e-6


def test_random_rank_form_bounds():
    with pytest.raises(ValueError):
        random_rank_form(0)
    with pytest.raises(ValueError):
        random_rank_form(16)


def test_gradient_matches_finite_differences(rng):
    for k in range(20):
        assert model_gradient_check(random_form(rng, 3, 4), 1 + k % 5, seed=k) <= 1e-5


def test_gradient_at_zero_parameters():
    f = mono(2, 1, 1)
    model = PowerSumModel(f, 2)
    theta = np.zeros(12)
    assert np.allclose(model.gradient(theta), 0)
    assert np.isclose(model.objective(theta), 1.0)


def test_empty_model():
    assert model_gradient_check(mono(4, 0, 0), 0) == 0.0


def test_fit_profile_non_increasing():
    f = mono(2, 2, 0) + mono(0, 1, 3) + mono(1, 1, 2)
    warm = None
    prev = np.inf
    for r in range(1, 5):
        rep = numeric_rank_fit(f, r, restarts=5, seed=0, warm_start=warm)
        assert rep.best_residual <= prev + 1e-12
        prev = rep.best_residual
        warm = np.array([ell for _, ell in rep.best_terms.terms])

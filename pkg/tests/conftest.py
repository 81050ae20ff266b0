import numpy as np
import pytest

from quartic_waring.apolarity import Form, linear_form, monomials, power


def random_form(rng, nvars, degree, complex_=True):
    n = len(monomials(nvars, degree))
    c = rng.standard_normal(n)
    if complex_:
        c = c + 1j * rng.standard_normal(n)
    return Form(nvars, degree, c)


def fourth_power(vec):
    return power(linear_form(np.asarray(vec, dtype=complex)), 4)


def mono(*exp):
    return Form.monomial(tuple(exp))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])

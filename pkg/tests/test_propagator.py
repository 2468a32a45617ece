import numpy as np
import pytest
import scipy.linalg

from unisplit import linalg, propagator, schemes
from unisplit.propagator import (
    OrderFit,
    apply_scheme,
    dense_operator_pair,
    eigenphase_error,
    empirical_order,
    exact_propagator,
    reversibility_report,
    step_matrix,
)


def two_level_split():
    a = np.array([[1.0, 0.4], [0.4, -0.2]])
    b = np.array([[0.3, -0.1], [-0.1, 0.8]])
    return a, b


def test_step_matrix_application_order():
    """First factor in the list acts first, i.e. sits rightmost in the product."""
    a, b = two_level_split()
    s = schemes.SplittingScheme(
        "lie", "ABA", 1, False,
        (schemes.Factor("A", 1.0), schemes.Factor("B", 1.0)),
    )
    h = 0.37
    oracle = scipy.linalg.expm(1j * h * b) @ scipy.linalg.expm(1j * h * a)
    assert np.allclose(step_matrix(s, a, b, h), oracle, atol=1e-14)


def test_step_matrix_strang_oracle():
    a, b = two_level_split()
    h = 0.25
    e_a = scipy.linalg.expm(1j * h * a / 2)
    oracle = e_a @ scipy.linalg.expm(1j * h * b) @ e_a
    assert np.allclose(step_matrix(schemes.get_scheme("strang"), a, b, h),
                       oracle, atol=1e-14)


def test_apply_scheme_matches_step_matrix(sym_split, rng):
    _, a, b = sym_split
    u = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    s = schemes.get_scheme("NB5s4")
    ops = dense_operator_pair(a, b)
    direct = apply_scheme(s, ops, u, 0.2)
    assert np.allclose(direct, step_matrix(s, a, b, 0.2) @ u, atol=1e-12)
    assert ops.a_applications == sum(1 for f in s.factors if f.op == "A")
    assert ops.b_applications == sum(1 for f in s.factors if f.op == "B")


def test_exact_propagator_unitary(sym_split):
    h_mat, _, _ = sym_split
    u = exact_propagator(h_mat, 0.7)
    assert np.allclose(u @ u.conj().T, np.eye(10), atol=1e-12)


@pytest.mark.parametrize("name", ["S31", "NB5s4", "B15s6"])
@pytest.mark.parametrize("h", [0.01, 0.1, 0.5])
def test_reversibility_residuals_small(sym_split, name, h):
    _, a, b = sym_split
    rep = reversibility_report(schemes.get_scheme(name), a, b, h)
    assert rep["sc2_residual"] <= 1e-12
    assert rep["sc3_residual"] <= 1e-12


def test_reversibility_fails_for_non_reversible_scheme(sym_split):
    # the palindromic drift comparator does not satisfy conj(S_h) S_h = I
    _, a, b = sym_split
    rep = reversibility_report(schemes.drift_comparator(), a, b, 0.3)
    assert rep["sc2_residual"] > 1e-3


def test_compose_half_equals_full_step(sym_split):
    _, a, b = sym_split
    s = schemes.get_scheme("S31")
    c = schemes.compose_half(s, s)
    assert np.allclose(
        step_matrix(c, a, b, 0.4),
        step_matrix(s, a, b, 0.2) @ step_matrix(s, a, b, 0.2),
        atol=1e-13,
    )


def test_empirical_order_strang(sym_split):
    _, a, b = sym_split
    fit = empirical_order(schemes.get_scheme("strang"), a, b,
                          np.geomspace(0.05, 0.4, 8))
    assert isinstance(fit, OrderFit)
    assert fit.slope == pytest.approx(3.0, abs=0.3)  # local error ~ h^{p+1}


def test_fit_window_exclusions(sym_split):
    # huge h lands above the 1e-1 window and must be reported, not fitted
    _, a, b = sym_split
    fit = empirical_order(schemes.get_scheme("strang"), a, b,
                          [0.05, 0.1, 0.2, 6.0])
    assert 6.0 in fit.excluded
    assert 6.0 not in fit.h_used


def test_fit_requires_two_points():
    with pytest.raises(linalg.NumericalError):
        propagator._fit_loglog([0.1, 0.2], [1e-15, 5e-15])


def test_eigenphase_error_zero_h(sym_split):
    _, a, b = sym_split
    assert eigenphase_error(schemes.get_scheme("S31"), a, b, 0.0) == 0.0


def test_eigenphase_error_scales(sym_split):
    _, a, b = sym_split
    s = schemes.get_scheme("strang")
    e1 = eigenphase_error(s, a, b, 0.02, warn=False)
    e2 = eigenphase_error(s, a, b, 0.04, warn=False)
    # third-order phase error: doubling h multiplies the error by ~8
    assert e2 / e1 == pytest.approx(8.0, rel=0.35)


def test_eigenphase_warns_when_pairing_ambiguous(sym_split):
    _, a, b = sym_split
    with pytest.warns(RuntimeWarning):
        eigenphase_error(schemes.get_scheme("strang"), a, b, 3.0)

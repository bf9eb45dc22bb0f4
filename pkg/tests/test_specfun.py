import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracspde.errors import GridTooShort, NonConvergence
from fracspde.specfun import (
    FractionalOrder,
    Regime,
    SeriesControl,
    caputo_derivative,
    mittag_leffler,
    recip_gamma,
    wright_phi,
)

from oracles import ML_FROZEN, WRIGHT_FROZEN


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

def test_series_control_validation():
    with pytest.raises(ValueError):
        SeriesControl(rel_tol=0.0)
    with pytest.raises(ValueError):
        SeriesControl(max_terms=0)


@pytest.mark.parametrize("bad", [0.5, 1.0, 2.0, 0.2, 2.5, -0.75])
def test_fractional_order_rejects_out_of_range(bad):
    with pytest.raises(ValueError):
        FractionalOrder(bad)


def test_fractional_order_regime():
    assert FractionalOrder(0.75).regime is Regime.SUB
    assert FractionalOrder(1.5).regime is Regime.SUPER
    assert FractionalOrder(0.75).m == 1
    assert FractionalOrder(1.5).m == 2


# ---------------------------------------------------------------------------
# recip_gamma
# ---------------------------------------------------------------------------

def test_recip_gamma_trivial_values():
    assert recip_gamma(1.0) == 1.0
    assert recip_gamma(0.0) == 0.0
    assert recip_gamma(-1.0) == 0.0
    assert recip_gamma(-7.0) == 0.0


def test_recip_gamma_example():
    # 1/Gamma(0.7), oracle: 40-digit mpmath reflection/Stirling value
    assert recip_gamma(0.7) == pytest.approx(0.77038318386656599884, rel=1e-14)


def test_recip_gamma_accuracy_range():
    # rel error <= 1e-13 for |x| <= 50 (off poles)
    import mpmath as mp

    xs = np.concatenate([np.linspace(0.05, 50, 43), np.linspace(-49.63, -0.07, 37)])
    for x in xs:
        ref = float(mp.rgamma(mp.mpf(float(x))))
        got = recip_gamma(float(x))
        assert got == pytest.approx(ref, rel=1e-13, abs=1e-290)


@given(st.floats(min_value=-40.0, max_value=40.0))
@settings(max_examples=60, deadline=None)
def test_recip_gamma_recurrence(x):
    # 1/Gamma(x) = x / Gamma(x+1)
    lhs = recip_gamma(x)
    rhs = x * recip_gamma(x + 1.0)
    scale = max(abs(lhs), abs(rhs), 1e-280)
    assert abs(lhs - rhs) <= 1e-12 * scale


# ---------------------------------------------------------------------------
# wright_phi
# ---------------------------------------------------------------------------

def test_wright_at_zero_is_recip_gamma_exact():
    assert wright_phi(-0.4, 1.0, 0.0) == 1.0
    for delta in (0.25, -0.75, 1.625, 3.0):
        assert wright_phi(-0.6, delta, 0.0) == recip_gamma(delta)


def test_wright_gaussian_identity_point():
    # phi(-1/2, 1/2; -1) = exp(-1/4)/sqrt(pi)
    assert wright_phi(-0.5, 0.5, 1.0) == pytest.approx(
        0.43939128946772239705, rel=1e-11
    )


def test_wright_gaussian_identity_range():
    z = np.linspace(0.0, 6.0, 61)
    got = wright_phi(-0.5, 0.5, z)
    ref = np.exp(-(z**2) / 4.0) / math.sqrt(math.pi)
    assert np.max(np.abs(got - ref) / ref) < 1e-8


def test_wright_example_frozen():
    # spec example: a=-0.4, delta=0.6, z=2 against the brute high-precision series
    assert wright_phi(-0.4, 0.6, 2.0) == pytest.approx(
        0.185582274510109151, rel=1e-11
    )


@pytest.mark.parametrize("key", sorted(WRIGHT_FROZEN))
def test_wright_against_frozen_oracle(key):
    nu, delta, z = key
    got = wright_phi(-nu, delta, z)
    ref = WRIGHT_FROZEN[key]
    assert got == pytest.approx(ref, rel=2e-10, abs=1e-300)


def test_wright_rejects_bad_parameters():
    with pytest.raises(ValueError):
        wright_phi(0.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        wright_phi(-1.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        wright_phi(-0.5, 1.0, -1.0)


def test_wright_nonconvergence_when_series_capped():
    # max_terms too small, below the contour threshold -> explicit error
    with pytest.raises(NonConvergence):
        wright_phi(-0.4, 0.6, 1.5, SeriesControl(rel_tol=1e-12, max_terms=3))


@given(
    st.floats(min_value=-0.9, max_value=-0.15),
    st.floats(min_value=-1.0, max_value=2.0),
)
@settings(max_examples=40, deadline=None)
def test_wright_zero_argument_property(a, delta):
    assert wright_phi(a, delta, 0.0) == recip_gamma(delta)


# ---------------------------------------------------------------------------
# mittag_leffler
# ---------------------------------------------------------------------------

def test_ml_exp_identity():
    z = np.linspace(-20.0, 5.0, 81)
    got = mittag_leffler(1.0, 1.0, z)
    ref = np.exp(z)
    assert np.max(np.abs(got - ref) / ref) < 1e-10


def test_ml_cos_identity():
    for z in np.linspace(0.1, 4.0, 17):
        assert mittag_leffler(2.0, 1.0, -(z**2)) == pytest.approx(
            math.cos(z), rel=1e-10, abs=1e-12
        )


def test_ml_example_frozen():
    # spec example: a=0.8, b=1, z=-3 against the high-precision series oracle
    assert mittag_leffler(0.8, 1.0, -3.0) == pytest.approx(
        0.11292019868221739872, rel=1e-11
    )


@pytest.mark.parametrize("key", sorted(ML_FROZEN))
def test_ml_against_frozen_oracle(key):
    a, b, z = key
    got = mittag_leffler(a, b, z)
    # contract: rel error <= 1e-8 on z in [-50, 0]
    assert got == pytest.approx(ML_FROZEN[key], rel=1e-8)


def test_ml_at_zero():
    assert mittag_leffler(0.7, 1.0, 0.0) == 1.0
    assert mittag_leffler(1.5, 2.0, 0.0) == 1.0


def test_ml_rejects_bad_a():
    with pytest.raises(ValueError):
        mittag_leffler(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        mittag_leffler(2.5, 1.0, 1.0)


def test_ml_nonconvergence_large_positive():
    with pytest.raises(NonConvergence):
        mittag_leffler(0.75, 1.0, 800.0)


def test_ml_caputo_ode_solution_pair():
    # E_a(-t^a) solves the fractional relaxation equation; here only spot
    # values sanity-checked against the frozen oracle at matching arguments
    t = 5.0 ** (1 / 0.75)
    assert mittag_leffler(0.75, 1.0, -(t**0.75)) == pytest.approx(
        ML_FROZEN[(0.75, 1.0, -5.0)], rel=1e-9
    )


# ---------------------------------------------------------------------------
# caputo_derivative
# ---------------------------------------------------------------------------

def test_caputo_kills_constants():
    for alpha in (0.75, 1.5):
        out = caputo_derivative(np.full(40, 2.75), alpha, 0.02)
        assert np.all(out == 0.0)


def test_caputo_monomial_rule_sub():
    # f(t) = t, alpha in (0,1): derivative is t^(1-a)/Gamma(2-a); L1 exact here
    t = np.linspace(0.0, 1.0, 161)
    dt = t[1] - t[0]
    for alpha in (0.6, 0.75, 0.9):
        got = caputo_derivative(t, alpha, dt)
        ref = t ** (1 - alpha) / math.gamma(2 - alpha)
        assert np.max(np.abs(got[1:] - ref[1:])) < 1e-12


def test_caputo_monomial_rule_super():
    # f(t) = t^2, alpha in (1,2): derivative 2 t^(2-a)/Gamma(3-a); exact for
    # the product-trapezoid applied to the (constant) second difference
    t = np.linspace(0.0, 1.0, 161)
    dt = t[1] - t[0]
    for alpha in (1.25, 1.5, 1.75):
        got = caputo_derivative(t**2, alpha, dt)
        ref = 2 * t ** (2 - alpha) / math.gamma(3 - alpha)
        assert np.max(np.abs(got[1:] - ref[1:])) < 1e-10


def test_caputo_mittag_leffler_ode():
    # f = E_a(-t^a) solves  D^a f = -f ; grid error is O(dt^(2-a)) away from 0
    alpha = 0.75
    t = np.linspace(0.0, 1.0, 401)
    dt = t[1] - t[0]
    f = mittag_leffler(alpha, 1.0, -(t**alpha))
    d = caputo_derivative(f, alpha, dt)
    # compare on the second half of the grid where the startup singularity
    # of f has washed out
    sl = slice(200, None)
    assert np.max(np.abs(d[sl] + f[sl])) < 5.0 * dt ** (2 - alpha)


def test_caputo_refinement_order():
    # halving dt cuts the monomial error by at least 2^(2-a) * 0.8
    alpha = 0.75
    errs = []
    for n in (100, 200, 400):
        t = np.linspace(0.0, 1.0, n + 1)
        dt = t[1] - t[0]
        got = caputo_derivative(t**2, alpha, dt)
        ref = 2 * t ** (2 - alpha) / math.gamma(3 - alpha)
        errs.append(np.max(np.abs(got[1:] - ref[1:])))
    for e_coarse, e_fine in zip(errs, errs[1:]):
        assert e_coarse / e_fine >= 2 ** (2 - alpha) * 0.8


def test_caputo_grid_too_short():
    with pytest.raises(GridTooShort):
        caputo_derivative(np.array([1.0]), 0.75, 0.1)
    with pytest.raises(GridTooShort):
        caputo_derivative(np.array([1.0, 2.0]), 1.5, 0.1)


def test_caputo_rejects_bad_dt():
    with pytest.raises(ValueError):
        caputo_derivative(np.arange(5.0), 0.75, 0.0)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from piecewise_melnikov.quadrature import (
    Arc,
    QuadratureAccuracyError,
    arc,
    arc_moment,
    integrate_1d,
)


def test_quarter_circle():
    val = integrate_1d(lambda t: np.sqrt(1.0 - t * t), 0.0, 1.0)
    assert val == pytest.approx(math.pi / 4.0, abs=1e-10)


def test_empty_and_linear():
    assert integrate_1d(lambda t: t, 0.0, 0.0) == 0.0
    assert integrate_1d(lambda t: t, 0.0, 1.0) == pytest.approx(0.5, abs=1e-13)


def test_reversed_limits_negate():
    f = lambda t: np.exp(t)
    assert integrate_1d(f, 1.0, 0.0) == pytest.approx(-integrate_1d(f, 0.0, 1.0), rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.floats(min_value=-3, max_value=3), min_size=1, max_size=6),
    st.floats(min_value=-2, max_value=0),
    st.floats(min_value=0.1, max_value=2),
)
def test_against_scipy_quad(coeffs, a, span):
    b = a + span
    f = lambda t: np.polyval(coeffs, t) * np.cos(3.0 * t)
    mine = integrate_1d(f, a, b)
    ref, _ = quad(lambda t: float(f(t)), a, b, epsabs=1e-13, epsrel=1e-13, limit=200)
    assert mine == pytest.approx(ref, abs=1e-9, rel=1e-9)


def test_accuracy_failure_carries_estimate():
    # a needle the subdivision limit cannot resolve at this tolerance
    needle = lambda t: 1.0 / (1e-14 + (t - 0.37) ** 2)
    with pytest.raises(QuadratureAccuracyError) as err:
        integrate_1d(needle, 0.0, 1.0, tol=1e-13, max_panels=8)
    assert err.value.estimate != 0.0
    assert err.value.error > 0.0


def test_arc_moment_paper_values():
    assert arc_moment(arc("BC", 2.0), 0, 0, "dx", 2.0) == pytest.approx(-2.0, abs=1e-10)
    assert arc_moment(arc("AB", 2.0), 1, 1, "dx", 2.0) == pytest.approx(2.0 / 3.0, abs=1e-10)
    assert arc_moment(arc("AB", 2.0), 0, 1, "dx", 2.0) == pytest.approx(
        math.pi / 2.0 - 1.0, abs=1e-10
    )


def test_arc_moment_against_scipy():
    # independent parametrization and integrator
    h = 3.7
    r = math.sqrt(h)
    a = arc("AB", h)
    for (i, j, form) in ((2, 1, "dx"), (1, 2, "dy"), (0, 3, "dx")):
        if form == "dx":
            g = lambda t: r ** (i + j + 1) * math.cos(t) ** i * math.sin(t) ** (j + 1) * -1.0
        else:
            g = lambda t: r ** (i + j + 1) * math.cos(t) ** (i + 1) * math.sin(t) ** j
        ref, _ = quad(g, a.theta0, a.theta1, epsabs=1e-13, epsrel=1e-13)
        assert arc_moment(a, i, j, form, h) == pytest.approx(ref, abs=1e-10)


def test_full_loop_closure():
    for h in (0.5, 2.0, 5.0):
        total = sum(
            arc_moment(arc(label, h), 0, 0, "dx", h) for label in ("AB", "BC", "CD", "DA")
        )
        assert abs(total) < 1e-10


def test_orientation_reversal_negates():
    h = 2.0
    a = arc("AB", h)
    fwd = arc_moment(a, 2, 1, "dx", h)
    rev = arc_moment(a.reversed(), 2, 1, "dx", h)
    assert fwd == pytest.approx(-rev, rel=1e-12)


def test_symmetric_arc_vanishing():
    for h in (0.5, 2.0, 5.0):
        for l in range(5):
            for j in range(5):
                assert abs(arc_moment(arc("AB", h), j, 2 * l, "dx", h)) < 1e-10
                assert abs(arc_moment(arc("BC", h), 2 * l + 1, j, "dx", h)) < 1e-10


def test_arc_endpoints_match_corners():
    h = 2.0
    a = arc("AB", h)
    r = math.sqrt(h)
    assert (r * math.cos(a.theta0), r * math.sin(a.theta0)) == pytest.approx((1.0, 1.0))
    assert (r * math.cos(a.theta1), r * math.sin(a.theta1)) == pytest.approx((1.0, -1.0))
    d = arc("DA", h)
    assert (r * math.cos(d.theta0), r * math.sin(d.theta0)) == pytest.approx((-1.0, 1.0))


def test_unknown_arc_label():
    with pytest.raises(ValueError):
        arc("AC", 2.0)


def test_bad_moment_arguments():
    a = Arc("x", 1.0, 0.0)
    with pytest.raises(ValueError):
        arc_moment(a, -1, 0, "dx", 2.0)
    with pytest.raises(ValueError):
        arc_moment(a, 0, 0, "dz", 2.0)

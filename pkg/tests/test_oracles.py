import math

import mpmath
import numpy as np
import pytest

from oscfield import oracles


def test_rk4_exponential():
    ts, Y = oracles.rk4(lambda t, y: -y, [1.0], 2.0, 1e-3)
    assert abs(Y[-1, 0] - math.exp(-2)) < 1e-12


def test_delay_oracle_before_delay_is_plain_ode():
    ts, Y = oracles.delay_oscillator_rk4(5.0, 0.02, -0.02, 2.0, [1, -5j], 1.9, 1e-3)
    ts2, Y2 = oracles.oscillator_rk4(5.0, 0.02, [1, -5j], 1.9, 1e-3)
    assert np.allclose(Y, Y2, atol=1e-14)


def test_delay_oracle_method_of_steps():
    # q'' = q(t-1) theta(t-1) from rest at q=1: q = 1 up to t=1.
    ts, Y = oracles.delay_oscillator_rk4(0.0, 0.0, 1.0, 1.0, [1, 0], 2.0, 1e-3)
    # For t in [1, 2]: q'' = 1, so q = 1 + (t-1)^2 / 2.
    assert Y[-1, 0] == pytest.approx(1.5, abs=1e-9)


def test_simpson():
    n = 1000
    bound = math.pi ** 5 / (180 * n ** 4)
    assert abs(oracles.simpson(np.sin, 0, math.pi, n) - 2) <= bound


def test_e1_series_and_ci_si():
    assert oracles.e1_series(1.0) == pytest.approx(float(mpmath.e1(1)), rel=1e-14)
    for x in (0.5, 5.0, 20.0):
        ci, si = oracles.ci_si(x)
        assert ci == pytest.approx(float(mpmath.ci(x)), rel=1e-14)
        assert si == pytest.approx(float(mpmath.si(x)), rel=1e-14)


def test_angular_weight_limits():
    # Far from the mirror the half-space weight averages to the free one.
    w = 7.0
    assert oracles.angular_weight_half(w, 500.0, n_theta=4000) == pytest.approx(
        oracles.angular_weight_free(w), rel=1e-3)

"""Independent reference computations used to validate the production code.

Nothing here shares a code path with the closed forms it checks: ODEs are
stepped with classical RK4, special functions are summed from their
defining series, and the mode-sum weight is integrated over solid angle.
"""
from __future__ import annotations

import decimal
import math
from typing import Callable

import numpy as np

EULER_GAMMA = 0.57721566490153286061
EULER_GAMMA_STR = "0.57721566490153286060651209008240243104215933593992"


def rk4(f: Callable, y0, t_end: float, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step RK4 for ``y' = f(t, y)``; returns ``(times, states)``."""
    n = int(round(t_end / h))
    y = np.array(y0, dtype=complex)
    out = np.empty((n + 1,) + y.shape, dtype=complex)
    out[0] = y
    t = 0.0
    for i in range(n):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = (i + 1) * h
        out[i + 1] = y
    return h * np.arange(n + 1), out


def oscillator_rk4(omega_r: float, gamma: float, y0, t_end: float, h: float = 1e-4,
                   force: Callable | None = None):
    """RK4 for ``q'' + 2 gamma q' + omega_r^2 q = force(t)``; states are ``(q, q')``."""
    def f(t, y):
        drive = force(t) if force is not None else 0.0
        return np.array([y[1], -2 * gamma * y[1] - omega_r ** 2 * y[0] + drive])
    return rk4(f, y0, t_end, h)


def delay_oscillator_rk4(omega_r: float, gamma: float, coef: float, delay: float, y0,
                         t_end: float, h: float):
    """RK4 for ``q'' + 2 gamma q' + omega_r^2 q = coef * theta(t - delay) q(t - delay)``.

    The past is kept in a history buffer of ``(q, q')`` samples and the
    delayed value is read back by cubic Hermite interpolation, which keeps
    the scheme fourth order when ``delay`` is not a multiple of ``h``.
    """
    n = int(round(t_end / h))
    hist = np.zeros((n + 1, 2), dtype=complex)
    hist[0] = y0

    def delayed(t, start):
        s = t - delay
        # at s == 0 take the limit from the side the current step lives on
        if s < 0 or (s == 0 and start < delay):
            return 0.0
        i = min(int(s / h), n - 1)
        u = s / h - i
        p0, p1 = hist[i, 0], hist[i + 1, 0]
        m0, m1 = hist[i, 1] * h, hist[i + 1, 1] * h
        return ((2 * u ** 3 - 3 * u ** 2 + 1) * p0 + (u ** 3 - 2 * u ** 2 + u) * m0
                + (-2 * u ** 3 + 3 * u ** 2) * p1 + (u ** 3 - u ** 2) * m1)

    def f(t, y, start):
        return np.array([y[1], -2 * gamma * y[1] - omega_r ** 2 * y[0] + coef * delayed(t, start)])

    y = hist[0].copy()
    for i in range(n):
        t = i * h
        k1 = f(t, y, t)
        k2 = f(t + h / 2, y + h / 2 * k1, t)
        k3 = f(t + h / 2, y + h / 2 * k2, t)
        k4 = f(t + h, y + h * k3, t)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        hist[i + 1] = y
    return h * np.arange(n + 1), hist


def simpson(f: Callable, a: float, b: float, n: int) -> float:
    """Composite Simpson rule with ``n`` (made even) intervals, evaluated in blocks."""
    n += n % 2
    h = (b - a) / n
    total = 0.0
    block = 1 << 20
    for s in range(0, n + 1, block):
        idx = np.arange(s, min(s + block, n + 1))
        w = np.where((idx == 0) | (idx == n), 1.0, np.where(idx % 2, 4.0, 2.0))
        total += float(np.dot(w, f(a + h * idx)))
    return total * h / 3


def e1_series(z: complex, terms: int = 40) -> complex:
    """``E1(z) = -gamma_E - ln z - sum_{n>=1} (-z)^n / (n n!)`` with a fixed term count."""
    z = complex(z)
    s = 0j
    term = 1 + 0j
    for n in range(1, terms + 1):
        term *= -z / n
        s += term / n
    return -EULER_GAMMA - np.log(z) - s


def ci_si(x: float, terms: int = 200) -> tuple[float, float]:
    """Cosine and sine integrals from their power series.

    Summed in 50-digit decimal arithmetic: the alternating terms reach
    ``~e^x`` before cancelling, which would cost double precision its
    accuracy beyond x of a few.
    """
    with decimal.localcontext() as ctx:
        ctx.prec = 50
        X = decimal.Decimal(x)
        x2 = X * X
        ci = decimal.Decimal(EULER_GAMMA_STR) + X.ln()
        si = X
        term_c = decimal.Decimal(1)
        term_s = X
        for k in range(1, terms):
            term_c *= -x2 / ((2 * k) * (2 * k - 1))
            term_s *= -x2 / ((2 * k) * (2 * k + 1))
            ci += term_c / (2 * k)
            si += term_s / (2 * k + 1)
            if abs(term_c) + abs(term_s) < decimal.Decimal(10) ** -45:
                break
        return float(ci), float(si)


def gamma0_imag_oracle(x: float) -> complex:
    """``Gamma(0, ix) = -Ci(x) + i (Si(x) - pi/2)`` for ``x > 0``."""
    ci, si = ci_si(x)
    return complex(-ci, si - math.pi / 2)


def angular_weight_half(omega: float, L: float, n_theta: int = 400, n_phi: int = 16) -> float:
    """Spectral weight of the Dirichlet mode sum by direct solid-angle quadrature.

    Sums ``d^3k / (2 w) |phi_k(L/2)|^2`` over modes of the half space with
    ``|phi_k(x)|^2 = sin^2(k_3 x_3) / (2 pi^3)``, per unit ``w``.  Gauss-Legendre
    in the polar angle, trapezoid in the azimuth.
    """
    u, wu = np.polynomial.legendre.leggauss(n_theta)
    theta = 0.25 * math.pi * (u + 1)             # [0, pi/2]
    wt = 0.25 * math.pi * wu
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    integrand = np.sin(0.5 * omega * L * np.cos(theta)) ** 2 * np.sin(theta)
    solid = float(np.sum(wt * integrand)) * (2 * math.pi / n_phi) * phi.size
    return omega ** 2 / (2 * omega) * solid / (2 * math.pi ** 3)


def angular_weight_free(omega: float) -> float:
    """Free-space counterpart with plane waves normalized to ``(2 pi)^-3``."""
    return omega ** 2 / (2 * omega) * 4 * math.pi / (2 * math.pi) ** 3

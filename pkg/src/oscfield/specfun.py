"""Special functions: the exponential integral E1 = Gamma(0, z) and sinc."""
from __future__ import annotations

import cmath
import contextlib
import math

import numpy as np

from .core import DomainError

EULER_GAMMA = 0.57721566490153286061

#: |z| at which gamma0 switches from the power series to the continued fraction.
SERIES_RADIUS = 4.0

_CF_MAX_ITER = 5000
_EPS = 1e-16

# Multiplicative test hook; see :func:`perturbed`.
_scale = 1.0


def _e1_series(z: complex) -> complex:
    total = 0j
    term = 1.0 + 0j
    n = 0
    while True:
        n += 1
        term *= -z / n
        contrib = term / n
        total += contrib
        if abs(contrib) <= _EPS * abs(total) or n > 200:
            break
    return -EULER_GAMMA - cmath.log(z) - total


def _scaled_e1_cf(z: complex) -> complex:
    # Modified Lentz on e^z E1(z) = 1/(z+1- 1/(z+3- 4/(z+5- ...))).
    tiny = 1e-300
    b = z + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _CF_MAX_ITER):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"continued fraction for E1({z}) did not converge")


def _e1_continued_fraction(z: complex) -> complex:
    return _scaled_e1_cf(z) * cmath.exp(-z)


def gamma0(z) -> complex:
    """Incomplete gamma function ``Gamma(0, z) = E1(z)`` on the principal branch.

    Valid for ``z != 0`` with ``Re(z) >= 0``.  Uses the power series for
    ``|z| <= 4`` and a continued fraction beyond.
    """
    z = complex(z)
    if z == 0:
        raise DomainError("Gamma(0, z) has a logarithmic singularity at z = 0")
    if z.real < 0:
        raise DomainError(f"gamma0 is only implemented for Re(z) >= 0, got {z}")
    if abs(z) <= SERIES_RADIUS:
        value = _e1_series(z)
    else:
        value = _e1_continued_fraction(z)
    return value * _scale


def gamma0_series(z) -> complex:
    """Power-series branch of :func:`gamma0`, exposed for overlap checks."""
    return _e1_series(complex(z))


def gamma0_cf(z) -> complex:
    """Continued-fraction branch of :func:`gamma0`, exposed for overlap checks."""
    return _e1_continued_fraction(complex(z))


def aux_image(x: float) -> complex:
    """``exp(i x) * Gamma(0, i x)``, the factor shared by the mirror corrections."""
    return cmath.exp(1j * x) * gamma0(1j * x)


@contextlib.contextmanager
def perturbed(rel: float):
    """Scale every :func:`gamma0` value by ``1 + rel`` inside the block.

    Used by the validation suite to confirm its checks are sensitive.
    """
    global _scale
    old = _scale
    _scale = 1.0 + rel
    try:
        yield
    finally:
        _scale = old


def sinc(x):
    """Unnormalized ``sin(x)/x`` with the removable singularity filled in."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    x2 = x * x
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    return out if out.ndim else float(out)

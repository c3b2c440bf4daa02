"""Late-time stationary state of the oscillator, in free space and near a mirror.

Once transients decay, the oscillator's covariance follows from the
frequency-domain Green's function ``G(omega)`` via the fluctuation-dissipation
relation::

    V_QQ = (1/pi) int_0^Lambda Im G dw
    V_PP = (M^2/pi) int_0^Lambda w^2 Im G dw

The mirror adds a delayed self-force ``(2 gamma / L) q(t - L)``, which shows
up as ``2 gamma exp(i w L) / L`` in the inverse response.  The free-space
integrals are done on the real axis.  The mirror's contribution
``G_half - G_free`` is analytic in the upper half plane and decays there
like ``exp(-y L)``, so it can also be integrated along the imaginary axis
where it is real and non-oscillatory.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (CovarianceMatrix, DomainError, EntropyReport, SystemParams,
                   linear_entropy)
from .quad import IntegrandHints, integrate
from .specfun import aux_image, sinc

#: Default cutoff for late-time integrals, in units of omega_r.
LATE_CUTOFF_FACTOR = 1e4
#: The image term is treated as a perturbation only while 2 gamma / L is
#: below this fraction of omega_r**2.
VALIDITY_FRACTION = 0.1
#: Real-axis integrals are split so no piece holds more periods than this.
_PERIODS_PER_CHUNK = 20000
#: Above this many oscillation periods, "auto" switches to the rotated contour.
_DIRECT_PERIOD_LIMIT = 20000

GEOMETRIES = ("free", "half_space")


class ValidityWarning(RuntimeWarning):
    """The mirror's delay term is not small compared to the restoring force."""


def _check_geometry(geometry):
    if geometry not in GEOMETRIES:
        raise ValueError(f"geometry must be one of {GEOMETRIES}, got {geometry!r}")


def image_term_valid(p: SystemParams) -> bool:
    """Whether ``2 gamma / L`` is small enough for perturbative mirror results."""
    return 2 * p.gamma / p.distance <= VALIDITY_FRACTION * p.omega_r ** 2


def late_cutoff(p: SystemParams, cutoff: Optional[float] = None) -> float:
    return cutoff if cutoff is not None else p.resolved_cutoff(LATE_CUTOFF_FACTOR)


# -- response functions ------------------------------------------------------

def green_free(omega, p: SystemParams):
    """``1 / (M (W^2 - (omega + i gamma)^2))``."""
    omega = np.asarray(omega, dtype=float) if not np.iscomplexobj(omega) else np.asarray(omega)
    z = omega + 1j * p.gamma
    return 1.0 / (p.mass * (p.omega_tilde ** 2 - z * z))


def green_half(omega, p: SystemParams, warn: bool = True):
    """Response with the mirror image: ``1 / (M (W^2 - (w + i g)^2 + 2 g e^{i w L} / L))``."""
    if warn and not image_term_valid(p):
        warnings.warn(f"2 gamma / L = {2 * p.gamma / p.distance:g} exceeds "
                      f"{VALIDITY_FRACTION} omega_r^2; mirror results are not perturbative",
                      ValidityWarning, stacklevel=2)
    omega = np.asarray(omega, dtype=float) if not np.iscomplexobj(omega) else np.asarray(omega)
    z = omega + 1j * p.gamma
    L = p.distance
    return 1.0 / (p.mass * (p.omega_tilde ** 2 - z * z + 2 * p.gamma * np.exp(1j * omega * L) / L))


@dataclass(frozen=True)
class FrequencyResponse:
    """``G(omega)`` for one geometry, callable on arrays."""

    geometry: str
    params: SystemParams

    def __post_init__(self):
        _check_geometry(self.geometry)

    def __call__(self, omega):
        if self.geometry == "free":
            return green_free(omega, self.params)
        return green_half(omega, self.params, warn=False)


def response(p: SystemParams, geometry: str = "free") -> FrequencyResponse:
    if geometry == "half_space" and not image_term_valid(p):
        warnings.warn("mirror results are outside the perturbative regime",
                      ValidityWarning, stacklevel=2)
    return FrequencyResponse(geometry, p)


# -- quadrature helpers ------------------------------------------------------

def _hints(p: SystemParams, L: Optional[float]):
    return IntegrandHints(resonance_centers=(p.omega_tilde,), resonance_width=max(p.gamma, 1e-9),
                          oscillation_period=2 * math.pi / L if L else None)


def _integrate_real_axis(f, cutoff: float, p: SystemParams, L: Optional[float] = None,
                         rel_tol: float = 1e-10) -> np.ndarray:
    """Integrate a (possibly vector-valued) integrand over ``[0, cutoff]``.

    Long oscillatory ranges are split into pieces; the piece containing the
    resonance sets the absolute scale for the rest.
    """
    hints = _hints(p, L)
    if not L or cutoff * L / (2 * math.pi) <= _PERIODS_PER_CHUNK:
        return np.asarray(integrate(f, 0.0, cutoff, hints, rel_tol=rel_tol).value)
    chunk = _PERIODS_PER_CHUNK * 2 * math.pi / L
    edges = np.append(np.arange(0.0, cutoff, chunk), cutoff)
    first = np.asarray(integrate(f, edges[0], edges[1], hints, rel_tol=rel_tol).value)
    n_rest = edges.size - 2
    floor = max(rel_tol * float(np.min(np.abs(first))) / max(n_rest, 1), 1e-300)
    total = first.copy()
    for a, b in zip(edges[1:-1], edges[2:]):
        total = total + np.asarray(integrate(f, a, b, hints, rel_tol=rel_tol,
                                             abs_floor=floor).value)
    return total


def _integrate_imag_axis(F: Callable[[np.ndarray], np.ndarray], p: SystemParams,
                         rel_tol: float = 1e-10) -> np.ndarray:
    """``[int F(iy) dy, int y^2 F(iy) dy]`` over ``y in [0, inf)`` for real-on-axis ``F``.

    ``F`` must decay like ``exp(-y L)``; the range is truncated where the
    exponential has fallen below 1e-300.
    """
    L = p.distance
    upper = 700.0 / L

    def f(y):
        v = np.real(F(1j * y))
        return np.vstack([v, y * y * v])

    scale = p.omega_r
    return np.asarray(integrate(f, 0.0, upper,
                                IntegrandHints(resonance_centers=(0.0, min(scale, upper / 2)),
                                               resonance_width=min(1.0 / L, scale) / 3),
                                rel_tol=rel_tol, abs_floor=1e-300).value)


def _rotated_qq_pp(F, p: SystemParams, rel_tol: float = 1e-10):
    # Im int_0^inf F = int F(iy) dy;  Im int_0^inf w^2 F = -int y^2 F(iy) dy.
    a, b = _integrate_imag_axis(F, p, rel_tol)
    return a / math.pi, -(p.mass ** 2) * b / math.pi


# -- covariances ---------------------------------------------------------------

def v_late_closed_form_free(p: SystemParams, cutoff: Optional[float] = None,
                            form: str = "exact") -> CovarianceMatrix:
    """Free-space late-time covariance in closed form.

    ``form="exact"`` integrates the Lorentzian exactly up to ``cutoff``.
    ``form="large_cutoff"`` keeps ``V_QQ`` at its infinite-cutoff value
    ``(i/(2 pi M W)) ln((g - iW)/(g + iW))`` and uses
    ``V_PP = M [ (i/(2 pi W))(W^2 - g^2) ln((g - iW)/(g + iW))
    + (g/pi)(2 ln(Lambda/W) - ln(1 + g^2/W^2)) ]``.
    """
    M, W, g = p.mass, p.omega_tilde, p.gamma
    lam = late_cutoff(p, cutoff)
    if form == "exact":
        def prim(z):
            return cmath.log(W + z) - cmath.log(W - z)
        zl, z0 = lam + 1j * g, 1j * g
        vqq = (prim(zl) - prim(z0)).imag / (2 * math.pi * M * W)
        log_term = math.log(abs(W * W - zl * zl)) - math.log(p.omega_r ** 2)
        vpp = (M / math.pi) * ((W * W - g * g) * math.pi * M * vqq + g * log_term)
        return CovarianceMatrix(vqq, vpp, 0.0)
    if form == "large_cutoff":
        log_ratio = cmath.log((g - 1j * W) / (g + 1j * W))
        vqq_c = 1j / (2 * math.pi * M * W) * log_ratio
        if abs(vqq_c.imag) > 1e-14 * max(abs(vqq_c.real), 1.0):
            raise ArithmeticError(f"closed-form V_QQ has imaginary part {vqq_c.imag}")
        vpp_c = 1j / (2 * math.pi * W) * (W * W - g * g) * log_ratio
        vpp = M * (vpp_c.real + g / math.pi * (2 * math.log(lam / W) - math.log1p(g * g / (W * W))))
        return CovarianceMatrix(vqq_c.real, vpp, 0.0)
    raise ValueError(f"form must be 'exact' or 'large_cutoff', got {form!r}")


def v_free_perturbative(p: SystemParams, cutoff: Optional[float] = None) -> CovarianceMatrix:
    """First order in ``gamma`` of the free-space covariance."""
    M, W, g = p.mass, p.omega_tilde, p.gamma
    lam = late_cutoff(p, cutoff)
    vqq = (1 - 2 * g / (math.pi * W)) / (2 * M * W)
    vpp = M * (W / 2 + g / math.pi * (2 * (math.log(lam) - math.log(W)) - W * W / lam ** 2 - 1))
    return CovarianceMatrix(vqq, vpp, 0.0)


def _mirror_difference(omega_y, p: SystemParams):
    # G_half - G_free written to avoid cancellation: -c / (K (K + c)).
    z = omega_y + 1j * p.gamma
    K = p.mass * (p.omega_tilde ** 2 - z * z)
    c = 2 * p.mass * p.gamma * np.exp(1j * omega_y * p.distance) / p.distance
    return -c / (K * (K + c))


def v_late_exact(g, p: Optional[SystemParams] = None, cutoff: Optional[float] = None,
                 method: str = "auto", rel_tol: float = 1e-10) -> CovarianceMatrix:
    """Late-time covariance from ``(1/pi) int Im G``.

    ``g`` is a :class:`FrequencyResponse` or a geometry name.  For the half
    space, ``method`` selects ``"direct"`` real-axis quadrature, ``"contour"``
    (free part on the real axis plus the mirror difference on the imaginary
    axis) or ``"auto"`` (direct unless the range spans too many periods).
    """
    if isinstance(g, FrequencyResponse):
        geometry, p = g.geometry, (p or g.params)
    else:
        geometry = g
    _check_geometry(geometry)
    if p is None:
        raise ValueError("parameters are required")
    lam = late_cutoff(p, cutoff)
    M = p.mass

    if geometry == "free":
        def f(w):
            im = np.imag(green_free(w, p))
            return np.vstack([im, w * w * im])
        vqq, vpp = _integrate_real_axis(f, lam, p, None, rel_tol) / math.pi
        return CovarianceMatrix(float(vqq), float(M * M * vpp), 0.0)

    if method not in ("auto", "direct", "contour"):
        raise ValueError(f"unknown method {method!r}")
    if not image_term_valid(p):
        warnings.warn("mirror results are outside the perturbative regime",
                      ValidityWarning, stacklevel=2)
    if method == "auto":
        periods = lam * p.distance / (2 * math.pi)
        method = "direct" if periods <= _DIRECT_PERIOD_LIMIT else "contour"
    if method == "direct":
        def f(w):
            im = np.imag(green_half(w, p, warn=False))
            return np.vstack([im, w * w * im])
        vqq, vpp = _integrate_real_axis(f, lam, p, p.distance, rel_tol) / math.pi
        return CovarianceMatrix(float(vqq), float(M * M * vpp), 0.0)
    free = v_late_exact("free", p, cutoff, rel_tol=rel_tol)
    dqq, dpp = _rotated_qq_pp(lambda w: _mirror_difference(w, p), p, rel_tol)
    return CovarianceMatrix(free.vqq + float(dqq), free.vpp + float(dpp), 0.0)


def spectral_density(omega, p: SystemParams, geometry: str = "free"):
    """Effective spectral density ``I(w) = (2/pi) w M gamma (1 - sinc(w L))``.

    The free-space density drops the sinc term.  ``Re gamma(w) = pi I / (2 w M)``.
    """
    _check_geometry(geometry)
    omega = np.asarray(omega, dtype=float)
    base = 2 / math.pi * omega * p.mass * p.gamma
    if geometry == "free":
        return base
    return base * (1 - sinc(omega * p.distance))


def damping_from_density(omega, density, mass: float = 1.0):
    """Real part of the frequency-dependent damping, ``pi I(w) / (2 w M)``."""
    omega = np.asarray(omega, dtype=float)
    return math.pi * np.asarray(density) / (2 * omega * mass)


def fdt_identity_residual(omega, p: SystemParams, geometry: str = "free"):
    """``|G|^2 Re gamma(w) - Im G / (2 w M)``, zero by the fluctuation-dissipation relation."""
    G = FrequencyResponse(geometry, p)(omega)
    re_gamma = damping_from_density(omega, spectral_density(omega, p, geometry), p.mass)
    return np.abs(G) ** 2 * re_gamma - np.imag(G) / (2 * np.asarray(omega) * p.mass)


def v_late_noise_route(p: SystemParams, geometry: str = "free", cutoff: Optional[float] = None,
                       rel_tol: float = 1e-10) -> CovarianceMatrix:
    """Late-time covariance as ``int G* I G`` (noise kernel route)."""
    _check_geometry(geometry)
    lam = late_cutoff(p, cutoff)
    resp = FrequencyResponse(geometry, p)

    def f(w):
        v = np.abs(resp(w)) ** 2 * spectral_density(w, p, geometry)
        return np.vstack([v, w * w * v])

    L = p.distance if geometry == "half_space" else None
    vqq, vpp = _integrate_real_axis(f, lam, p, L, rel_tol)
    return CovarianceMatrix(float(vqq), float(p.mass ** 2 * vpp), 0.0)


# -- mirror corrections --------------------------------------------------------

def delta_v(p: SystemParams, method: str = "closed_form", cutoff: Optional[float] = None,
            rel_tol: float = 1e-10):
    """First-order mirror corrections ``(dV_QQ, dV_PP)``.

    ``closed_form`` uses the large-cutoff expressions in ``exp(ix) Gamma(0, ix)``
    with ``x = omega_r L``.  ``quadrature`` integrates the first-order
    integrand ``Im[-G^2 M (2 gamma / L) e^{i w L}]`` on the real axis up to the
    cutoff; ``contour`` integrates the same integrand on the imaginary axis.
    """
    L = p.distance
    if not L > 0:
        raise DomainError(f"L must be positive, got {L}")
    M, Or, g = p.mass, p.omega_r, p.gamma
    if method == "closed_form":
        X = aux_image(Or * L)
        dqq = -(1 / math.pi) / (M * Or) * (g / L) * ((1j / Or ** 2 + L / Or) * X).real
        dpp = -(M * g / (math.pi * Or * L)) * ((-1j + L * Or) * X).real
        return dqq, dpp

    def first_order(w):
        G = green_free(w, p)
        return -G * G * M * (2 * g / L) * np.exp(1j * w * L)

    if method == "quadrature":
        def f(w):
            im = np.imag(first_order(w))
            return np.vstack([im, w * w * im])
        vqq, vpp = _integrate_real_axis(f, late_cutoff(p, cutoff), p, L, rel_tol) / math.pi
        return float(vqq), float(M * M * vpp)
    if method == "contour":
        dqq, dpp = _rotated_qq_pp(first_order, p, rel_tol)
        return float(dqq), float(dpp)
    raise ValueError(f"unknown method {method!r}")


def delta_s_linear(p: SystemParams) -> float:
    """First-order change of the linear entropy caused by the mirror."""
    if not p.distance > 0:
        raise DomainError(f"L must be positive, got {p.distance}")
    X = aux_image(p.omega_r * p.distance)
    return -(2 / math.pi) * (p.gamma / p.omega_r) * X.real


def s_late(p: SystemParams, geometry: str = "free", cutoff: Optional[float] = None,
           method: str = "auto") -> EntropyReport:
    """Entropies of the late-time state."""
    _check_geometry(geometry)
    return linear_entropy(v_late_exact(geometry, p, cutoff, method=method))


# -- QBM kernels -----------------------------------------------------------------

@dataclass(frozen=True)
class KernelSamples:
    tau: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    geometry: str


def _int_w_sin(a, lam):
    # int_0^lam w sin(a w) dw
    x = a * lam
    small = np.abs(x) < 1e-3
    xs = np.where(small, 1.0, x)
    big = (np.sin(xs) - xs * np.cos(xs)) / xs ** 2
    ser = x / 3 - x ** 3 / 30
    return lam ** 2 * np.where(small, ser, big)


def _int_w_cos(a, lam):
    # int_0^lam w cos(a w) dw
    x = a * lam
    small = np.abs(x) < 1e-3
    xs = np.where(small, 1.0, x)
    big = (np.cos(xs) + xs * np.sin(xs) - 1) / xs ** 2
    ser = 0.5 - x ** 2 / 8 + x ** 4 / 144
    return lam ** 2 * np.where(small, ser, big)


def _int_cos(b, lam):
    # int_0^lam cos(b w) dw
    return lam * sinc(b * lam)


def _int_sin(b, lam):
    # int_0^lam sin(b w) dw
    y = b * lam
    small = np.abs(y) < 1e-3
    ys = np.where(small, 1.0, y)
    return lam * np.where(small, y / 2 - y ** 3 / 24, (1 - np.cos(ys)) / ys)


def qbm_kernels(tau_grid: Sequence[float], p: SystemParams, geometry: str = "free",
                cutoff: Optional[float] = None) -> KernelSamples:
    """Dissipation and noise kernels for a sharp frequency cutoff.

    ``mu(tau) = lambda^2 int_0^Lambda I(w) sin(w tau) dw`` (zero for tau < 0)
    and ``nu(tau) = lambda^2 int_0^Lambda I(w) cos(w tau) dw`` with
    ``I(w) = (w / 2 pi^2)(1 - sinc(w L))``, or ``w / 2 pi^2`` in free space.
    The integrals are elementary and evaluated in closed form.
    """
    _check_geometry(geometry)
    tau = np.asarray(tau_grid, dtype=float)
    lam = late_cutoff(p, cutoff)
    pref = p.coupling ** 2 / (2 * math.pi ** 2)
    mu = _int_w_sin(tau, lam)
    nu = _int_w_cos(tau, lam)
    if geometry == "half_space":
        L = p.distance
        # w sinc(wL) sin(w tau) = [cos(w(tau-L)) - cos(w(tau+L))] / 2L
        mu = mu - (_int_cos(tau - L, lam) - _int_cos(tau + L, lam)) / (2 * L)
        # w sinc(wL) cos(w tau) = [sin(w(L+tau)) + sin(w(L-tau))] / 2L
        nu = nu - (_int_sin(L + tau, lam) + _int_sin(L - tau, lam)) / (2 * L)
    mu = np.where(tau < 0, 0.0, pref * mu)
    return KernelSamples(tau, mu, pref * nu, geometry)

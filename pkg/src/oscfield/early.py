"""Early-time dynamics of the oscillator coupled to the field near a mirror.

At zeroth order in the mirror echo, the oscillator's Heisenberg position is
a sum of an *a-part*, which carries its own initial operators through the
damped homogeneous solution, and a *v-part*, driven by the field vacuum.
The v-part correlators are one-dimensional frequency integrals of the
driven mode function against a spectral weight.

Two normalizations of the half-space weight are offered:

``"reduced"`` (default)
    ``(omega / 4 pi^2) (1 - sinc(omega L))``.  This follows from reducing
    the Dirichlet mode sum directly and tends to the free-oscillator weight
    ``omega / 4 pi^2`` when the mirror recedes, so the late-time limit of the
    correlators matches the fluctuation-dissipation result.
``"paper"``
    ``(omega / 8 pi^2) (1 - sinc(omega L))``, half the reduced weight.  Kept
    for comparison with the published figures and the image identity
    ``half = (self + self)/4 + cross/2``.

Every ``Omega`` in the mode functions is the underdamped frequency
``omega_tilde = sqrt(omega_r**2 - gamma**2)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (CovarianceMatrix, DomainError, EntropyReport, SystemParams,
                   linear_entropy, linear_entropy_array)
from .quad import IntegrandHints, integrate
from .specfun import sinc

#: Default upper frequency for the v-part integrals, in units of omega_r.
EARLY_CUTOFF_FACTOR = 200.0

CONVENTIONS = ("reduced", "paper")


class EarlyTimeWarning(RuntimeWarning):
    """Requested time lies beyond the zeroth-order validity window t ~ 1/gamma."""


@dataclass(frozen=True)
class CorrelatorSplit:
    qq_a: float
    pp_a: float
    qp_a: float
    qq_v: float
    pp_v: float
    qp_v: float

    @property
    def covariance(self) -> CovarianceMatrix:
        return CovarianceMatrix(self.qq_a + self.qq_v, self.pp_a + self.pp_v,
                                self.qp_a + self.qp_v)


@dataclass(frozen=True)
class EarlyState:
    split: CorrelatorSplit
    covariance: CovarianceMatrix
    entropy: EntropyReport


# -- mode functions ----------------------------------------------------------

def mode_coefficients(omega, p: SystemParams):
    """``(M1, M2)`` partial-fraction coefficients of the driven response."""
    omega = np.asarray(omega, dtype=float)
    W, g = p.omega_tilde, p.gamma
    m1 = 1.0 / (2.0 * (-omega - 1j * g + W))
    m2 = 1.0 / (2.0 * (-omega - 1j * g - W))
    return m1, m2


def q_homogeneous(t, p: SystemParams):
    """Damped homogeneous solution with ``q(0) = 1``, ``q'(0) = -i omega_r``.

    Returns ``(q, qdot)``; the derivative is analytic.
    """
    t = np.asarray(t, dtype=float)
    W, g = p.omega_tilde, p.gamma
    c = (p.omega_r + 1j * g) / W
    ep = np.exp((-g - 1j * W) * t)
    em = np.exp((-g + 1j * W) * t)
    q = 0.5 * (1 + c) * ep + 0.5 * (1 - c) * em
    qd = 0.5 * (1 + c) * (-g - 1j * W) * ep + 0.5 * (1 - c) * (-g + 1j * W) * em
    return q, qd


def retarded_kernel(t, p: SystemParams):
    """Retarded Green's function of the damped oscillator and its derivative.

    ``G(t) = theta(t) exp(-gamma t) sin(W t) / W``; ``G(0) = 0``, ``G'(0+) = 1``.
    """
    t = np.asarray(t, dtype=float)
    W, g = p.omega_tilde, p.gamma
    on = t >= 0
    ts = np.where(on, t, 0.0)
    damp = np.exp(-g * ts)
    G = np.where(on, damp * np.sin(W * ts) / W, 0.0)
    Gd = np.where(on, damp * (np.cos(W * ts) - g * np.sin(W * ts) / W), 0.0)
    return G, Gd


def _bracket(t, omega, p: SystemParams):
    # B(omega, t) and dB/dt, the driven response per unit (lambda/(M W)).
    W, g = p.omega_tilde, p.gamma
    m1, m2 = mode_coefficients(omega, p)
    drive = np.exp(-1j * omega * t)
    ep = np.exp((1j * W - g) * t)
    em = np.exp((-1j * W - g) * t)
    B = (m1 - m2) * drive + m2 * ep - m1 * em
    Bd = -1j * omega * (m1 - m2) * drive + (1j * W - g) * m2 * ep - (-1j * W - g) * m1 * em
    return B, Bd


def q_plus_zeroth(t, omega, k3_halfL_phase, p: SystemParams):
    """Field-driven mode function at zeroth order and its time derivative.

    Solves ``q'' + 2 gamma q' + omega_r**2 q = (lambda/M) phase exp(-i omega t)``
    with ``q(0) = q'(0) = 0``.
    """
    pref = p.coupling / (p.mass * p.omega_tilde) * k3_halfL_phase
    B, Bd = _bracket(np.asarray(t, dtype=float), np.asarray(omega, dtype=float), p)
    return pref * B, pref * Bd


# -- correlators -------------------------------------------------------------

def correlators_a(t, p: SystemParams):
    """a-part ``(qq, pp, qp)``: the oscillator's own ground-state fluctuations
    carried by the homogeneous solution.  Independent of the distance."""
    q, qd = q_homogeneous(t, p)
    M, Or = p.mass, p.omega_r
    qq = np.abs(q) ** 2 / (2 * M * Or)
    pp = M * np.abs(qd) ** 2 / (2 * Or)
    qp = np.real(np.conj(q) * qd) / (2 * Or)
    if np.ndim(qq) == 0:
        return float(qq), float(pp), float(qp)
    return qq, pp, qp


def _check_convention(convention):
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")


def spectral_weight_half(omega, L, convention: str = "paper"):
    """Half-space spectral weight ``(omega/8 pi^2)(1 - sinc(omega L))``.

    With ``convention="reduced"`` the weight is doubled (see module notes).
    """
    _check_convention(convention)
    if not L > 0:
        raise DomainError(f"L must be positive, got {L}")
    omega = np.asarray(omega, dtype=float)
    w = omega / (8 * math.pi ** 2) * (1.0 - sinc(omega * L))
    return 2.0 * w if convention == "reduced" else w


def free_self_weight(omega):
    """Spectral weight ``omega / 4 pi^2`` of a single oscillator in free space."""
    return np.asarray(omega, dtype=float) / (4 * math.pi ** 2)


def _early_cutoff(p: SystemParams, cutoff: Optional[float]):
    if cutoff is not None:
        return cutoff
    return p.resolved_cutoff(EARLY_CUTOFF_FACTOR)


def _hints(p: SystemParams, span: float):
    return IntegrandHints(resonance_centers=(p.omega_tilde,), resonance_width=max(p.gamma, 1e-6),
                          oscillation_period=2 * math.pi / span if span > 0 else None)


def bracket_moments(t: float, p: SystemParams, weights, span: float, cutoff: Optional[float] = None,
                    rel_tol: float = 1e-9, abs_floor: float = 1e-14):
    """Integrate ``w |B|^2``, ``w |B'|^2``, ``w Re(B* B')`` for several weights.

    ``weights(omega)`` returns an array ``(k, n)``; the result has shape
    ``(3, k)`` with rows ``qq, pp, qp`` already multiplied by the coupling
    prefactors.  ``span`` is the largest time or distance scale, used for the
    oscillation hint.
    """
    lam2 = (p.coupling / (p.mass * p.omega_tilde)) ** 2
    M = p.mass

    def f(omega):
        B, Bd = _bracket(t, omega, p)
        w = np.atleast_2d(weights(omega))
        return np.vstack([w * np.abs(B) ** 2, w * np.abs(Bd) ** 2,
                          w * np.real(np.conj(B) * Bd)])

    k = np.atleast_2d(weights(np.array([1.0]))).shape[0]
    res = integrate(f, 0.0, _early_cutoff(p, cutoff), _hints(p, span), rel_tol=rel_tol,
                    abs_floor=abs_floor)
    out = np.asarray(res.value).reshape(3, k)
    return out * np.array([[lam2], [M ** 2 * lam2], [M * lam2]])


def correlators_v(t: float, p: SystemParams, convention: str = "reduced",
                  cutoff: Optional[float] = None, rel_tol: float = 1e-9):
    """v-part ``(qq, pp, qp)`` in the half space at distance ``p.distance``."""
    _check_convention(convention)
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    if t == 0 or p.gamma == 0:
        return 0.0, 0.0, 0.0
    L = p.distance
    m = bracket_moments(t, p, lambda w: spectral_weight_half(w, L, convention), L + t,
                        cutoff, rel_tol)
    return float(m[0, 0]), float(m[1, 0]), float(m[2, 0])


def correlators_v_grid(t: float, L_values: Sequence[float], p: SystemParams,
                       convention: str = "reduced", cutoff: Optional[float] = None,
                       rel_tol: float = 1e-8):
    """v-part correlators at one time for many distances, shape ``(n_L, 3)``.

    All distances share one vector-valued quadrature: the free self term
    plus one sinc term per distance.
    """
    _check_convention(convention)
    L_values = np.asarray(L_values, dtype=float)
    if t == 0 or p.gamma == 0:
        return np.zeros((L_values.size, 3))
    scale = 2.0 if convention == "reduced" else 1.0

    def weights(omega):
        base = omega / (8 * math.pi ** 2) * scale
        return np.vstack([base[None, :], base[None, :] * sinc(np.outer(L_values, omega))])

    # The cross terms cross zero as L varies; an absolute floor tied to the
    # self term keeps the quadrature from chasing relative accuracy there.
    self_scale = bracket_moments(t, p, lambda w: free_self_weight(w)[None, :], 0.0 + t,
                                 cutoff, rel_tol=1e-6)
    floor = 1e-3 * rel_tol * float(np.min(np.abs(self_scale)) + 1e-300)
    m = bracket_moments(t, p, weights, float(L_values.max()) + t, cutoff, rel_tol,
                        abs_floor=max(floor, 1e-14))
    return (m[:, :1] - m[:, 1:]).T


def covariance_early(t: float, p: SystemParams, convention: str = "reduced",
                     cutoff: Optional[float] = None, rel_tol: float = 1e-9) -> EarlyState:
    """Zeroth-order covariance and entropies at time ``t``."""
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    if p.gamma > 0 and t > 1.0 / p.gamma:
        warnings.warn(f"t={t} exceeds 1/gamma={1 / p.gamma:g}; zeroth order is not reliable",
                      EarlyTimeWarning, stacklevel=2)
    a = correlators_a(t, p)
    v = correlators_v(t, p, convention, cutoff, rel_tol)
    split = CorrelatorSplit(*a, *v)
    cov = split.covariance
    return EarlyState(split, cov, linear_entropy(cov))


def early_grid(L_values: Sequence[float], t_values: Sequence[float], p: SystemParams,
               convention: str = "reduced", cutoff: Optional[float] = None,
               rel_tol: float = 1e-8) -> dict:
    """Covariance and linear entropy on an ``(L, t)`` grid.

    Returns arrays of shape ``(len(L_values), len(t_values))`` under keys
    ``vqq, vpp, vqp, purity, S_L``.
    """
    L_values = np.asarray(L_values, dtype=float)
    t_values = np.asarray(t_values, dtype=float)
    if np.any(L_values <= 0):
        raise DomainError("all L values must be positive")
    if np.any(t_values < 0):
        raise DomainError("all t values must be non-negative")
    shape = (L_values.size, t_values.size)
    vqq, vpp, vqp = (np.empty(shape) for _ in range(3))
    for j, t in enumerate(t_values):
        qa, pa, xa = correlators_a(float(t), p)
        v = correlators_v_grid(float(t), L_values, p, convention, cutoff, rel_tol)
        vqq[:, j] = qa + v[:, 0]
        vpp[:, j] = pa + v[:, 1]
        vqp[:, j] = xa + v[:, 2]
    s = linear_entropy_array(vqq, vpp, vqp)
    return {"L": L_values, "t": t_values, "vqq": vqq, "vpp": vpp, "vqp": vqp,
            "purity": 1.0 - s, "S_L": s}


# -- reflection series -------------------------------------------------------

@dataclass(frozen=True)
class ReflectionSeries:
    """Echo corrections to a mode function.

    ``values[n-1]`` is the order-``n`` correction at time ``t``.  The grid
    arrays hold every order (row 0 is the unreflected function) at
    ``times``.
    """

    t: float
    values: np.ndarray
    times: np.ndarray
    grid_terms: np.ndarray
    step: float


def reflection_series(t: float, n_max: int, p: SystemParams, kind: str = "a",
                      omega: Optional[float] = None, k3_halfL_phase: float = 1.0,
                      step: Optional[float] = None) -> ReflectionSeries:
    """Iterated-echo expansion of ``q_a`` (``kind="a"``) or ``q_+`` (``kind="plus"``).

    Order ``n`` is the retarded convolution of order ``n - 1`` delayed by
    ``L`` and scaled by ``-2 gamma / L``.  The convolutions use the
    trapezoid rule on a uniform grid whose step divides ``L`` exactly, so
    order ``n`` is identically zero before ``t = n L``.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    L, W = p.distance, p.omega_tilde
    h0 = step if step is not None else min(2 * math.pi / (64 * W), L / 64)
    if h0 > L / 10:
        raise DomainError(f"grid step {h0:g} exceeds L/10={L / 10:g}; refine the grid")
    m = int(math.ceil(L / h0 - 1e-9))
    h = L / m
    N = int(math.floor(t / h + 1e-12))
    times = h * np.arange(N + 1)

    if kind == "a":
        base, _ = q_homogeneous(times, p)
    elif kind == "plus":
        if omega is None:
            raise ValueError("kind='plus' needs omega")
        base, _ = q_plus_zeroth(times, omega, k3_halfL_phase, p)
    else:
        raise ValueError(f"kind must be 'a' or 'plus', got {kind!r}")

    coef = -2.0 * p.gamma / L
    G, _ = retarded_kernel(times, p)
    terms = np.zeros((n_max + 1, N + 1), dtype=complex)
    terms[0] = base
    for n in range(1, n_max + 1):
        prev = terms[n - 1]
        if N >= m:
            # sum_{k=0}^{j-m} G[j-m-k] prev[k], minus half the k=0 end weight.
            conv = np.convolve(G, prev)[:N + 1 - m]
            conv -= 0.5 * G[:N + 1 - m] * prev[0]
            terms[n, m:] = coef * h * conv
        if not terms[n].any():
            break

    values = np.zeros(n_max, dtype=complex)
    for n in range(1, n_max + 1):
        K = int(math.floor((t - L) / h + 1e-12))
        if K < 0:
            continue
        s = L + h * np.arange(K + 1)
        g_vals, _ = retarded_kernel(t - s, p)
        f = g_vals * terms[n - 1][:K + 1]
        total = h * (f.sum() - 0.5 * f[0] - 0.5 * f[-1])
        tail = t - s[-1]
        total += 0.5 * tail * f[-1]        # integrand vanishes at s = t
        values[n - 1] = coef * total
    return ReflectionSeries(float(t), values, times, terms, h)

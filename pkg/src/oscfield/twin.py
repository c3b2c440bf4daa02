"""Two oscillators in free space with opposite-sign couplings.

Oscillators A and B sit a distance ``L`` apart and couple to the field with
charges ``-lambda`` and ``+lambda``.  Each feels the other's retarded field as
a delayed force, so in the frequency domain::

    K q_B + c q_A = f_B,   K q_A + c q_B = f_A,
    K = M (W^2 - (w + i gamma)^2),   c = (2 M gamma / L) exp(i w L)

The sum mode ``q_A + q_B`` responds with ``1/(K + c)``, the half-space
response of a single oscillator in front of a mirror; the difference mode
responds with ``1/(K - c)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import CovarianceMatrix, DomainError, SystemParams
from .early import bracket_moments, free_self_weight
from .late import _rotated_qq_pp, delta_v, green_half, image_term_valid, v_late_exact
from .specfun import sinc

SIGNS = ("same", "opposite")


@dataclass(frozen=True)
class TwinCorrelators:
    """Self correlators (equal for both oscillators) and cross correlators."""

    self_qq: float
    self_pp: float
    self_qp: float
    cross_qq: float
    cross_pp: float
    cross_qp: float


def _sign_factor(sign: str) -> float:
    if sign not in SIGNS:
        raise ValueError(f"sign must be one of {SIGNS}, got {sign!r}")
    return -1.0 if sign == "opposite" else 1.0


def twin_correlators_v(t: float, p: SystemParams, sign: str = "opposite",
                       cutoff: Optional[float] = None, rel_tol: float = 1e-9) -> TwinCorrelators:
    """Zeroth-order vacuum-driven correlators of the two-oscillator system."""
    s = _sign_factor(sign)
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    if t == 0 or p.gamma == 0:
        return TwinCorrelators(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    L = p.distance

    def weights(omega):
        w = free_self_weight(omega)
        return np.vstack([w, w * sinc(omega * L)])

    m = bracket_moments(t, p, weights, L + t, cutoff, rel_tol)
    return TwinCorrelators(float(m[0, 0]), float(m[1, 0]), float(m[2, 0]),
                           s * float(m[0, 1]), s * float(m[1, 1]), s * float(m[2, 1]))


def reduced_covariance(a_part: Sequence[float], twin: TwinCorrelators) -> CovarianceMatrix:
    """Covariance of one oscillator of the pair.

    Only the self correlators enter; cross correlators belong to the joint
    state and drop out of either reduced density matrix.
    """
    qq, pp, qp = a_part
    return CovarianceMatrix(qq + twin.self_qq, pp + twin.self_pp, qp + twin.self_qp)


# -- late times ----------------------------------------------------------------

def _kc(omega, p: SystemParams):
    z = omega + 1j * p.gamma
    K = p.mass * (p.omega_tilde ** 2 - z * z)
    c = 2 * p.mass * p.gamma * np.exp(1j * omega * p.distance) / p.distance
    return K, c


def twin_late_mode_functions(omega, k3: float, p: SystemParams):
    """Stationary response ``(q_B, q_A)`` to one field mode.

    The mode has frequency ``omega`` and wavevector component ``k3`` along
    the line joining the oscillators; the opposite charges see it with
    amplitudes ``+lambda e^{i k3 L/2}`` and ``-lambda e^{-i k3 L/2}``.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    K, c = _kc(omega, p)
    lam, L = p.coupling, p.distance
    f = np.stack([lam * np.exp(0.5j * k3 * L) * np.ones_like(K),
                  -lam * np.exp(-0.5j * k3 * L) * np.ones_like(K)], axis=-1)
    A = np.empty(omega.shape + (2, 2), dtype=complex)
    A[..., 0, 0] = K
    A[..., 1, 1] = K
    A[..., 0, 1] = c
    A[..., 1, 0] = c
    sol = np.linalg.solve(A, f[..., None])[..., 0]
    return sol[..., 0], sol[..., 1]


def sum_mode_response(omega, k3: float, p: SystemParams):
    """``lambda sin(k3 L/2) G_half(omega)``, the mirror-problem response for ``M = 1``."""
    return p.coupling * math.sin(0.5 * k3 * p.distance) * green_half(omega, p, warn=False)


def twin_late_correlators(p: SystemParams, cutoff: Optional[float] = None,
                          rel_tol: float = 1e-10) -> TwinCorrelators:
    """Late-time self and cross correlators of the pair.

    The self correlators are the free single-oscillator values plus the
    correction ``(1/pi) Im int c^2 / (K (K^2 - c^2))``; the cross correlators
    are ``-(1/pi) Im int c / (K^2 - c^2)``.  Both corrections are integrated
    along the imaginary frequency axis, where they are real and decay like
    ``exp(-y L)``.
    """
    free = v_late_exact("free", p, cutoff, rel_tol=rel_tol)
    scq, scp = self_correction(p, rel_tol)
    cq, cp = cross_correlator(p, rel_tol)
    return TwinCorrelators(free.vqq + scq, free.vpp + scp, 0.0, cq, cp, 0.0)


def cross_correlator(p: SystemParams, rel_tol: float = 1e-10):
    """Late-time ``(<{Q_A, Q_B}>/2, <{P_A, P_B}>/2)`` for opposite couplings."""
    def F(w):
        K, c = _kc(w, p)
        return -c / (K * K - c * c)
    return tuple(float(x) for x in _rotated_qq_pp(F, p, rel_tol))


def self_correction(p: SystemParams, rel_tol: float = 1e-10):
    """Late-time change of each oscillator's ``(V_QQ, V_PP)`` caused by its partner."""
    def F(w):
        K, c = _kc(w, p)
        return c * c / (K * (K * K - c * c))
    return tuple(float(x) for x in _rotated_qq_pp(F, p, rel_tol))


@dataclass(frozen=True)
class ScalingFit:
    """Log-log slopes of the late-time cross correlator and self correction."""

    cross: float
    self_correction: float
    L: np.ndarray
    cross_values: np.ndarray
    self_values: np.ndarray


def _fit_slope(x, y) -> float:
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


def twin_late_scaling(p: SystemParams, L_grid: Sequence[float]) -> ScalingFit:
    """Fit ``|cross_qq| ~ L^a`` and ``|self_qq - free_qq| ~ L^b`` over ``L_grid``."""
    L = np.asarray(L_grid, dtype=float)
    if L.size < 3 or np.any(L <= 0):
        raise ValueError("need at least three positive distances")
    decades = math.log10(L.max() / L.min())
    if decades < 0.3 or L.size < 8 * decades:
        raise ValueError(f"grid too narrow for a fit: {L.size} points over {decades:.2f} decades "
                         "(need >= 0.3 decades and >= 8 points per decade)")
    cross = np.empty(L.size)
    selfc = np.empty(L.size)
    for i, d in enumerate(L):
        q = p.replace(distance=float(d))
        if not image_term_valid(q):
            raise DomainError(f"L={d} is outside the perturbative regime")
        cross[i] = cross_correlator(q)[0]
        selfc[i] = self_correction(q)[0]
    return ScalingFit(_fit_slope(L, np.abs(cross)), _fit_slope(L, np.abs(selfc)), L, cross, selfc)


@dataclass(frozen=True)
class FreeCorrectionComparison:
    """First-order mirror correction of ``V_QQ`` next to the twin cross correlator.

    The two numbers coincide to first order in gamma but are different
    observables: one shifts a single oscillator's variance, the other is a
    correlation between two oscillators that never enters either reduced
    state.
    """

    delta_vqq: float
    cross_qq: float

    @property
    def relative_difference(self) -> float:
        return abs(self.delta_vqq - self.cross_qq) / abs(self.cross_qq)


def first_order_free_correction(p: SystemParams, method: str = "quadrature") -> FreeCorrectionComparison:
    """``delta V_QQ`` of the mirror problem and the pair's late-time cross correlator."""
    if not p.distance > 0:
        raise DomainError(f"L must be positive, got {p.distance}")
    dqq, _ = delta_v(p, method=method)
    cq, _ = cross_correlator(p)
    return FreeCorrectionComparison(dqq, cq)

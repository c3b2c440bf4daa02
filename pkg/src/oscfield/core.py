"""Model parameters, covariance matrices and single-mode Gaussian entropies.

Units are natural throughout (hbar = c = 1).  The oscillator mass defaults
to one.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

#: Purity may exceed one by this much (quadrature noise) before it is flagged.
PURITY_TOL = 1e-9


class DomainError(ValueError):
    """Raised when an input lies outside the domain of a physical formula."""


class PurityWarning(RuntimeWarning):
    """Emitted when a computed purity exceeds one by more than ``PURITY_TOL``."""


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the oscillator + scalar field model.

    Parameters
    ----------
    mass : float
        Oscillator mass ``M``.
    omega_r : float
        Renormalized oscillator frequency.
    gamma : float
        Damping constant ``gamma = lambda**2 / (8 pi M)``.
    distance : float
        Oscillator-to-image distance ``L`` (the mirror sits at ``L/2``).
    cutoff : float or None
        High-frequency field cutoff ``Lambda``.  ``None`` lets each consumer
        pick its documented default (see :meth:`resolved_cutoff`).
    """

    mass: float = 1.0
    omega_r: float = 5.0
    gamma: float = 0.02
    distance: float = 2.0
    cutoff: Optional[float] = None

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")
        if not self.omega_r > 0:
            raise DomainError(f"omega_r must be positive, got {self.omega_r}")
        if not self.gamma >= 0:
            raise DomainError(f"gamma must be non-negative, got {self.gamma}")
        if not self.gamma < self.omega_r:
            raise DomainError(
                f"underdamped regime required: gamma={self.gamma} >= omega_r={self.omega_r}")
        if not self.distance > 0:
            raise DomainError(f"distance must be positive, got {self.distance}")
        if self.cutoff is not None and not self.cutoff > 0:
            raise DomainError(f"cutoff must be positive, got {self.cutoff}")

    @classmethod
    def from_coupling(cls, coupling: float, mass: float = 1.0, **kwargs) -> "SystemParams":
        """Build parameters from the bare coupling ``lambda`` instead of ``gamma``."""
        return cls(mass=mass, gamma=coupling ** 2 / (8.0 * math.pi * mass), **kwargs)

    @property
    def coupling(self) -> float:
        """Oscillator-field coupling ``lambda = sqrt(8 pi M gamma)``."""
        return math.sqrt(8.0 * math.pi * self.mass * self.gamma)

    @property
    def omega_tilde(self) -> float:
        """Underdamped oscillation frequency.

        Read as ``omega_tilde**2 = omega_r**2 - gamma**2``; the printed
        definition without the square is dimensionally inconsistent.
        """
        return math.sqrt(self.omega_r ** 2 - self.gamma ** 2)

    def resolved_cutoff(self, factor: float) -> float:
        """Return ``cutoff`` if set, else ``factor * omega_r``."""
        return self.cutoff if self.cutoff is not None else factor * self.omega_r

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {"mass": self.mass, "omega_r": self.omega_r, "gamma": self.gamma,
                "distance": self.distance, "cutoff": self.cutoff}


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetrized second moments of ``(Q, P)`` for a single mode."""

    vqq: float
    vpp: float
    vqp: float = 0.0

    @property
    def det(self) -> float:
        return self.vqq * self.vpp - self.vqp ** 2

    def as_array(self) -> np.ndarray:
        return np.array([[self.vqq, self.vqp], [self.vqp, self.vpp]])

    def is_physical(self) -> bool:
        return self.vqq > 0 and self.vpp > 0 and self.det > 0


@dataclass(frozen=True)
class EntropyReport:
    purity: float
    linear_entropy: float
    von_neumann: float


def ground_state(omega: float, mass: float = 1.0) -> CovarianceMatrix:
    """Covariance of the oscillator ground state at frequency ``omega``."""
    return CovarianceMatrix(1.0 / (2.0 * mass * omega), mass * omega / 2.0, 0.0)


def purity(v: CovarianceMatrix) -> float:
    """Purity ``1 / (2 sqrt(det V))`` of a single-mode Gaussian state."""
    det = v.det
    if not det > 0:
        raise DomainError(f"covariance matrix {v!r} has non-positive determinant {det}")
    p = 1.0 / (2.0 * math.sqrt(det))
    if p > 1.0 + PURITY_TOL:
        warnings.warn(f"purity {p!r} exceeds 1 for {v!r}", PurityWarning, stacklevel=2)
    return p


def von_neumann_entropy(p: float) -> float:
    """Von Neumann entropy of a single-mode Gaussian state with purity ``p``."""
    if not (p > 0 and p <= 1.0 + PURITY_TOL):
        raise DomainError(f"purity must lie in (0, 1], got {p}")
    if p >= 1.0:
        return 0.0
    # log1p keeps the (1-p) log(1-p) term accurate near the pure limit.
    log_ratio = math.log1p(p) - math.log1p(-p)
    return (1.0 - p) / (2.0 * p) * log_ratio - math.log(2.0 * p / (1.0 + p))


def linear_entropy(v: CovarianceMatrix) -> EntropyReport:
    """Purity, linear entropy and von Neumann entropy of ``v``."""
    p = purity(v)
    return EntropyReport(purity=p, linear_entropy=1.0 - p,
                         von_neumann=von_neumann_entropy(p))


def linear_entropy_array(vqq, vpp, vqp) -> np.ndarray:
    """Vectorized ``1 - 1/(2 sqrt(det))`` for sweeps; no validation."""
    det = np.asarray(vqq) * np.asarray(vpp) - np.asarray(vqp) ** 2
    return 1.0 - 0.5 / np.sqrt(det)

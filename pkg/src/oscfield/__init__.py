"""Entanglement between a harmonic oscillator and a massless scalar field,
in free space and in front of a perfect mirror."""
from .core import (CovarianceMatrix, DomainError, EntropyReport, PurityWarning, SystemParams,
                   linear_entropy, purity, von_neumann_entropy)

__version__ = "0.1.0"

__all__ = ["CovarianceMatrix", "DomainError", "EntropyReport", "PurityWarning", "SystemParams",
           "linear_entropy", "purity", "von_neumann_entropy", "__version__"]

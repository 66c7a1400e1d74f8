"""Entropic quantities in bits."""

from __future__ import annotations

import math

import numpy as np

from .linalg import DimensionMismatchError, partial_trace, support_projector
from .states import DensityOperator

__all__ = [
    "EIGEN_CLAMP",
    "von_neumann_entropy",
    "binary_entropy",
    "dmin",
    "coherent_information",
    "werner_coherent_closed",
    "isotropic_coherent_closed",
]

EIGEN_CLAMP = 1e-12


def _matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)


def _entropy_of_spectrum(w: np.ndarray) -> float:
    w = np.where(w < EIGEN_CLAMP, 0.0, w)
    nz = w[w > 0]
    return float(-np.sum(nz * np.log2(nz)))


def von_neumann_entropy(rho) -> float:
    """−Tr[ρ log₂ ρ], eigenvalues below 1e-12 treated as zero."""
    return _entropy_of_spectrum(np.linalg.eigvalsh(_matrix(rho)))


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def dmin(rho, sigma, tol: float = 1e-14, rel_tol: float = 1e-9) -> float:
    """Min-relative entropy −log₂ Tr[Π^ρ σ].

    Returns ``math.inf`` when the overlap falls below ``tol``.
    """
    r, s = _matrix(rho), _matrix(sigma)
    if r.shape != s.shape:
        raise DimensionMismatchError(f"shapes differ: {r.shape} vs {s.shape}")
    overlap = float(np.trace(support_projector(r, rel_tol) @ s).real)
    if overlap < tol:
        return math.inf
    return -math.log2(overlap)


def coherent_information(rho: DensityOperator) -> float:
    """H(B) − H(AB) across the A:B cut of ``rho.dims``."""
    rho_b = partial_trace(rho.matrix, rho.dims, rho.dims.b_indices)
    return von_neumann_entropy(rho_b) - von_neumann_entropy(rho)


def _check(p: float, d: int) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"parameter must lie in [0, 1], got {p}")
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d}")


def werner_coherent_closed(p: float, d: int) -> float:
    """Closed-form coherent information of the Werner state with symmetric weight p."""
    _check(p, d)
    return 1.0 - binary_entropy(p) - p * math.log2(d + 1) - (1 - p) * math.log2(d - 1)


def isotropic_coherent_closed(f: float, d: int) -> float:
    """Closed-form coherent information of the isotropic state with fidelity f."""
    _check(f, d)
    return math.log2(d) - binary_entropy(f) - (1 - f) * math.log2(d * d - 1)

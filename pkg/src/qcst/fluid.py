"""Perfect-fluid reading of QC scalars, cosmological eras, energy conditions."""

from dataclasses import dataclass
import enum
from typing import Optional

import numpy as np

from .exceptions import NonPositiveKappa


class Era(enum.Enum):
    VACUUM = "Vacuum"
    DARK_MATTER = "DarkMatter"
    DUST = "Dust"
    STIFF = "Stiff"
    RADIATION = "Radiation"
    PHANTOM = "Phantom"
    QUINTESSENCE = "Quintessence"
    ACCELERATING_BOUNDARY = "AcceleratingBoundary"
    DECELERATING = "Decelerating"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class FluidState:
    p: float
    sigma: float
    kappa: float
    era: Era
    w: Optional[float]


def era_tolerance(p, sigma):
    return 1e-9 * max(1.0, abs(p), abs(sigma))


def check_kappa(kappa):
    kappa = float(kappa)
    if not kappa > 0 or not np.isfinite(kappa):
        raise NonPositiveKappa(f"kappa must be positive and finite, got {kappa}")
    return kappa


def classify_era(p, sigma):
    """Era of a perfect fluid with pressure ``p`` and density ``sigma``.

    Boundaries are closed bands of width ``1e-9 * max(1, |p|, |sigma|)``;
    checks run in a fixed priority order so every pair gets one label.
    """
    eps = era_tolerance(p, sigma)
    if abs(p) <= eps and abs(sigma) <= eps:
        return Era.VACUUM
    if abs(p + sigma) <= eps:
        return Era.DARK_MATTER
    if abs(p) <= eps:
        return Era.DUST
    if abs(p - sigma) <= eps:
        return Era.STIFF
    if abs(p - sigma / 3.0) <= eps:
        return Era.RADIATION
    if abs(sigma) <= eps:
        # w is unbounded here; its sign decides
        return Era.PHANTOM if p < 0 else Era.DECELERATING
    w = p / sigma
    if w < -1.0:
        return Era.PHANTOM
    if -1.0 < w < 0.0 and w < -1.0 / 3.0 - eps:
        return Era.QUINTESSENCE
    if abs(w + 1.0 / 3.0) <= eps:
        return Era.ACCELERATING_BOUNDARY
    if -1.0 < w < 0.0:
        return Era.QUINTESSENCE
    return Era.DECELERATING


def fluid_from_qc(gamma, mu, kappa=1.0):
    """Pressure and density of the perfect fluid sourcing a QC metric."""
    k2 = check_kappa(kappa) ** 2
    p = (-3.0 * gamma + 2.0 * mu) / k2
    sigma = 3.0 * gamma / k2
    eps = era_tolerance(p, sigma)
    w = p / sigma if abs(sigma) > eps else None
    return FluidState(p, sigma, float(kappa), classify_era(p, sigma), w)


def stress_energy_from_einstein(bundle, kappa=1.0):
    """``T_ij = (R_ij - R g_ij / 2) / kappa^2``."""
    k2 = check_kappa(kappa) ** 2
    return (bundle.ricci - 0.5 * bundle.scalar * bundle.g) / k2


def fluid_projections(T, g, A):
    """``(sigma, p)`` seen by the observer ``A^i``: ``T(A, A)`` and the spatial trace / 3."""
    A = np.asarray(A, dtype=float)
    ginv = np.linalg.inv(g)
    h = ginv + np.outer(A, A)
    return float(A @ T @ A), float(np.sum(h * T) / 3.0)


def _conditions(p, sigma, eps):
    nec = sigma + p >= -eps
    return {
        "NEC": bool(nec),
        "WEC": bool(sigma >= -eps and nec),
        "DEC": bool(sigma >= -eps and nec and sigma - p >= -eps),
        "SEC": bool(sigma + 3.0 * p >= -eps),
    }


def gr_energy_conditions(p, sigma):
    return _conditions(p, sigma, era_tolerance(p, sigma))

"""Riesz-Feller Fourier symbol and the composite spectral coefficient.

The symbol of a space term of order ``alpha`` and skewness ``theta`` is

    psi(k) = |k|^alpha exp(i sign(k) theta pi / 2),   sign(0) = 0,

and a problem with reaction rate ``omega`` and space terms
``(eta_j, alpha_j, theta_j)`` has spectral coefficient
``b(k) = omega + sum_j eta_j psi_j(k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError


def check_space_order(alpha: float, theta: float) -> None:
    """Validate ``0 < alpha <= 2`` and ``|theta| <= min(alpha, 2 - alpha)``.

    ``alpha == 1`` is only admitted with ``theta == 0``.
    """
    if not (math.isfinite(alpha) and math.isfinite(theta)):
        raise ParameterError("alpha and theta must be finite")
    if not 0 < alpha <= 2:
        raise ParameterError(f"space order alpha must lie in (0, 2], got {alpha}")
    bound = min(alpha, 2.0 - alpha)
    if abs(theta) > bound:
        raise ParameterError(
            f"skewness violates |theta| <= min(alpha, 2 - alpha) = {bound:g} (theta={theta}, alpha={alpha})")
    if alpha == 1 and theta != 0:
        raise ParameterError("alpha = 1 is only supported with theta = 0")


@dataclass(frozen=True)
class SpaceTerm:
    """One Riesz-Feller space term ``eta * D^alpha_theta``."""

    eta: float
    alpha: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ParameterError(f"diffusion coefficient eta must be > 0, got {self.eta}")
        check_space_order(self.alpha, self.theta)

    def symbol(self, k):
        return self.eta * riesz_feller_symbol(self.alpha, self.theta, k)


def riesz_feller_symbol(alpha: float, theta: float, k):
    """``|k|^alpha exp(i sign(k) theta pi / 2)`` for scalar or array ``k``.

    Exact conjugate symmetry in ``k`` holds by construction, and the result
    is purely real when ``theta == 0``.
    """
    check_space_order(alpha, theta)
    karr = np.asarray(k, dtype=float)
    mag = np.abs(karr) ** alpha
    if theta == 0:
        out = mag + 0j
    else:
        half = theta * math.pi / 2
        c, s = math.cos(half), math.sin(half)
        out = mag * c + 1j * (np.sign(karr) * mag * s)
    return complex(out) if karr.ndim == 0 else out


def spectral_coefficient(omega: float, terms: Sequence[SpaceTerm], k):
    """``omega + sum_j eta_j psi_j(k)`` for scalar or array ``k``."""
    if not (math.isfinite(omega) and omega >= 0):
        raise ParameterError(f"reaction rate omega must be >= 0, got {omega}")
    if not terms:
        raise ParameterError("at least one space term is required")
    total = None
    for term in terms:
        v = term.symbol(k)
        total = v if total is None else total + v
    return omega + total

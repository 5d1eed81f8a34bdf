"""Problem description: time derivatives, space terms, initial data, forcing.

A problem couples two Hilfer-type time derivatives of orders
``gamma1 > gamma2`` and types ``delta1, delta2`` with a sum of Riesz-Feller
space terms and a linear reaction term ``omega``. Both orders lie in the same
range, which fixes the family:

* ``Family.DIFFUSION_WAVE``: orders in (1, 2], initial data ``f1, g1, f2, g2``
* ``Family.SUBDIFFUSION``: orders in (0, 1], initial data ``h1, h2``

Initial data and forcing are supplied in Fourier space with the convention
``F(k) = int f(x) exp(+ikx) dx``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import FamilyError, ParameterError
from .spectral import SpaceTerm

SpectralFunction = Callable[[np.ndarray], np.ndarray]
SourceFunction = Callable[[np.ndarray, float], np.ndarray]


class Family(enum.Enum):
    """Range of the time-derivative orders."""

    DIFFUSION_WAVE = "(1,2]"
    SUBDIFFUSION = "(0,1]"

    def contains(self, gamma: float) -> bool:
        if self is Family.DIFFUSION_WAVE:
            return 1.0 < gamma <= 2.0
        return 0.0 < gamma <= 1.0

    @classmethod
    def of(cls, gamma: float) -> "Family":
        for fam in cls:
            if fam.contains(gamma):
                return fam
        raise FamilyError(f"time order {gamma} lies outside (0, 2]")


@dataclass(frozen=True)
class TimeDerivative:
    """Hilfer time derivative of order ``gamma`` and type ``delta``.

    ``delta = 1`` is the Caputo derivative, ``delta = 0`` the
    Riemann-Liouville one.
    """

    gamma: float
    delta: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and 0 < self.gamma <= 2):
            raise ParameterError(f"time order must lie in (0, 2], got {self.gamma}")
        if not (math.isfinite(self.delta) and 0 <= self.delta <= 1):
            raise ParameterError(f"derivative type delta must lie in [0, 1], got {self.delta}")


def _zero(k):
    return np.zeros(np.shape(k), complex)


def _one(k):
    return np.ones(np.shape(k), complex)


@dataclass(frozen=True)
class InitialData:
    """Fourier-space initial data.

    ``f1, g1, f2, g2`` feed the diffusion-wave family, ``h1, h2`` the
    subdiffusion family; a ``None`` slot is identically zero. Every function
    maps an array of wavenumbers to complex values and must satisfy
    ``F(-k) = conj(F(k))``.
    """

    f1: Optional[SpectralFunction] = None
    g1: Optional[SpectralFunction] = None
    f2: Optional[SpectralFunction] = None
    g2: Optional[SpectralFunction] = None
    h1: Optional[SpectralFunction] = None
    h2: Optional[SpectralFunction] = None
    label: str = "custom"

    @classmethod
    def from_profile(cls, profile: SpectralFunction, label: str) -> "InitialData":
        """The same spectrum in every value slot, zero velocity data."""
        return cls(f1=profile, f2=profile, h1=profile, h2=profile, label=label)

    @classmethod
    def delta(cls) -> "InitialData":
        """Unit point mass at the origin: every value spectrum is 1."""
        return cls.from_profile(_one, "delta")

    @classmethod
    def gaussian(cls, width: float) -> "InitialData":
        """Unit-mass Gaussian of standard deviation ``width``."""
        if not width > 0:
            raise ParameterError(f"gaussian width must be > 0, got {width}")

        def spectrum(k):
            return np.exp(-0.5 * (width * np.asarray(k, float)) ** 2) + 0j
        return cls.from_profile(spectrum, f"gaussian:{width!r}")

    @classmethod
    def box(cls, half_width: float) -> "InitialData":
        """Unit-mass indicator of ``[-half_width, half_width]``."""
        if not half_width > 0:
            raise ParameterError(f"box half-width must be > 0, got {half_width}")

        def spectrum(k):
            return np.sinc(half_width * np.asarray(k, float) / np.pi) + 0j
        return cls.from_profile(spectrum, f"box:{half_width!r}")

    def scaled(self, c: float) -> "InitialData":
        """All slots multiplied by the real constant ``c``."""
        def scale(f):
            return None if f is None else (lambda k: c * f(k))
        return InitialData(*(scale(getattr(self, n)) for n in ("f1", "g1", "f2", "g2", "h1", "h2")),
                           label=f"{c!r}*{self.label}")

    def slot(self, name: str) -> Optional[SpectralFunction]:
        return getattr(self, name)


@dataclass(frozen=True)
class Source:
    """Prescribed forcing ``U(k, t)`` in Fourier space; ``None`` means absent.

    ``steady`` declares that ``U`` does not depend on time, which lets the
    source convolution use a closed form instead of quadrature.
    """

    u_hat: Optional[SourceFunction] = None
    label: str = "none"
    steady: bool = False

    @classmethod
    def none(cls) -> "Source":
        return cls()

    @classmethod
    def gaussian(cls, amplitude: float, width: float) -> "Source":
        """Time-independent Gaussian forcing of total mass ``amplitude``."""
        if not width > 0:
            raise ParameterError(f"source width must be > 0, got {width}")

        def u_hat(k, t):
            return amplitude * np.exp(-0.5 * (width * np.asarray(k, float)) ** 2) + 0j
        return cls(u_hat, f"gaussian:{amplitude!r}:{width!r}", steady=True)

    @property
    def present(self) -> bool:
        return self.u_hat is not None


@dataclass(frozen=True)
class Problem:
    """A complete problem. ``family`` is inferred from the orders when omitted."""

    time1: TimeDerivative
    time2: TimeDerivative
    space_terms: Sequence[SpaceTerm]
    a: float = 0.0
    omega: float = 0.0
    ic: InitialData = field(default_factory=InitialData.delta)
    source: Source = field(default_factory=Source.none)
    family: Optional[Family] = None

    def __post_init__(self):
        g1, g2 = self.time1.gamma, self.time2.gamma
        if not g1 > g2:
            raise ParameterError(f"gamma1 > gamma2 required (gamma1={g1}, gamma2={g2})")
        fam1, fam2 = Family.of(g1), Family.of(g2)
        if fam1 is not fam2:
            raise FamilyError(
                f"time orders {g1} and {g2} lie in different ranges; both must be in (0,1] or both in (1,2]")
        if self.family is None:
            object.__setattr__(self, "family", fam1)
        elif self.family is not fam1:
            raise FamilyError(f"orders {g1}, {g2} do not belong to the family {self.family.value}")
        if not (math.isfinite(self.omega) and self.omega >= 0):
            raise ParameterError(f"reaction rate omega must be >= 0, got {self.omega}")
        if not math.isfinite(self.a):
            raise ParameterError("coupling a must be finite")
        terms = tuple(self.space_terms)
        if not terms:
            raise ParameterError("at least one space term is required")
        object.__setattr__(self, "space_terms", terms)

    def with_ic(self, ic: InitialData) -> "Problem":
        return Problem(self.time1, self.time2, self.space_terms, self.a, self.omega, ic, self.source, self.family)

    def with_source(self, source: Source) -> "Problem":
        return Problem(self.time1, self.time2, self.space_terms, self.a, self.omega, self.ic, source, self.family)


def check_hermitian(f: SpectralFunction, k_max: float, samples: int = 17, rtol: float = 1e-12) -> float:
    """Largest sampled defect ``|f(-k) - conj f(k)|`` on ``(0, k_max]``."""
    k = np.linspace(k_max / samples, k_max, samples)
    pos = np.asarray(f(k), complex)
    neg = np.asarray(f(-k), complex)
    return float(np.max(np.abs(neg - np.conj(pos)))) if k.size else 0.0

"""Independent reference computations used to validate the fast paths.

Nothing here imports the kernel or solution modules. The routes are kept
separate on purpose:

* :func:`highprec_series` sums the Prabhakar series in mpmath arithmetic
  with precision sized from the largest term.
* :func:`talbot_inverse_laplace` inverts a Laplace transform numerically on
  the fixed Talbot contour, in mpmath arithmetic.
* :func:`gl_subdiffusion_solve` is a finite-difference solver
  (Grunwald-Letnikov in time, fractional centred differences in space).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np
from scipy import linalg

from .errors import ConvergenceError, ParameterError, StabilityError
from .special_functions import PrabhakarParams

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# high-precision series

_MAX_ORACLE_TERMS = 20_000

def _log_term(alpha, beta, gamma, logz, n):
    """log|c_n z^n| in mpmath, or None when the coefficient vanishes."""
    x = n * alpha + beta
    if x <= 0 and mpmath.isint(x):
        return None
    if n > 0 and gamma <= 0 and mpmath.isint(gamma) and n > -gamma:
        return None
    lp = mpmath.log(abs(mpmath.rf(gamma, n))) if n else mpmath.mpf(0)
    return lp + n * logz - mpmath.re(mpmath.loggamma(x)) - mpmath.loggamma(n + 1)


def highprec_series(params: PrabhakarParams, z, digits: int = 30) -> complex:
    """E^gamma_{alpha,beta}(z) by direct summation with ample working precision.

    The working precision is ``digits`` plus the number of digits lost to
    cancellation, estimated from the largest term and the computed sum and
    iterated until stable.
    """
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    if abs(complex(z)) ** (1.0 / alpha) / alpha > _MAX_ORACLE_TERMS / 2:
        raise ConvergenceError("highprec_series: the series peaks beyond the term budget")
    with mpmath.workdps(30):
        a, b, g = mpmath.mpf(alpha), mpmath.mpf(beta), mpmath.mpf(gamma)
        zz = mpmath.mpc(z)
        if zz == 0:
            return complex(mpmath.rgamma(b))
        logz = mpmath.log(abs(zz))
        # term profile: largest term and cut-off index
        logs, n, logmax = [], 0, -mpmath.inf
        while True:
            lt = _log_term(a, b, g, logz, n)
            logs.append(lt)
            if lt is not None:
                logmax = max(logmax, lt)
            terminating = g <= 0 and mpmath.isint(g) and n >= -g
            past = n * alpha + beta > 2 and n > 2 and lt is not None and logs[-2] is not None \
                and lt < logs[-2] and lt < logmax - (digits + 40) * math.log(10) - 2 * abs(logmax)
            if terminating or past or (lt is None and n * alpha + beta > 2 and n > 2 and logs[-2] is None):
                break
            n += 1
            if n > _MAX_ORACLE_TERMS:
                raise ConvergenceError("highprec_series: term budget exhausted")
    n_terms = len(logs)
    big = max(0, int(float(logmax) / math.log(10)) + 1)
    extra = 10
    while True:
        dps = digits + extra + big
        with mpmath.workdps(dps):
            a, b, g = mpmath.mpf(alpha), mpmath.mpf(beta), mpmath.mpf(gamma)
            zz = mpmath.mpc(z)
            s = mpmath.mpf(0)
            poch, power, fact = mpmath.mpf(1), mpmath.mpf(1), mpmath.mpf(1)
            for k in range(n_terms):
                if k:
                    poch *= g + k - 1
                    power *= zz
                    fact *= k
                s += poch * power * mpmath.rgamma(k * a + b) / fact
            mod = abs(s)
            lost = (float(logmax) - float(mpmath.log(mod))) / math.log(10) if mod else dps
            if lost + digits + 5 <= dps:
                return complex(s)
            extra = int(lost) + 15 - big


# ---------------------------------------------------------------------------
# numerical Laplace inversion

LaplaceFunction = Callable[[mpmath.mpc], mpmath.mpc]


def talbot_inverse_laplace(transform: LaplaceFunction, t: float, nodes: int = 64,
                           dps: int | None = None) -> complex:
    """Inverse Laplace transform at ``t > 0`` on the fixed Talbot contour.

    ``s(theta) = r theta (cot theta + i)``, ``r = 2 nodes / (5 t)``. The sum
    is carried in mpmath at ``dps`` digits (default ``max(30, 0.8 nodes)``),
    which the method needs to avoid round-off in its exponentially large
    terms. ``transform`` must accept and return mpmath numbers.
    """
    if t <= 0:
        raise ParameterError(f"t must be > 0, got {t}")
    if nodes < 2:
        raise ParameterError("nodes must be >= 2")
    dps = dps or max(30, int(0.8 * nodes))
    with mpmath.workdps(dps):
        tt = mpmath.mpf(t)
        r = mpmath.mpf(2 * nodes) / (5 * tt)
        total = mpmath.exp(r * tt) * transform(mpmath.mpc(r))
        # both halves of the contour, so transforms that are not real on
        # the real axis (complex coefficients) are handled too
        for k in range(1, nodes):
            th = k * mpmath.pi / nodes
            cot = mpmath.cot(th)
            s = r * th * (cot + 1j)
            sigma = th * (1 + cot * cot) - cot
            sc = mpmath.conj(s)
            total += (mpmath.exp(tt * s) * transform(s) * (1 + 1j * sigma)
                      + mpmath.exp(tt * sc) * transform(sc) * (1 - 1j * sigma))
        value = r / (2 * nodes) * total
        if not (mpmath.isfinite(value.real) and mpmath.isfinite(value.imag)):
            raise ConvergenceError("Talbot contour produced a non-finite value")
        return complex(value)


def relaxation_transform(alpha: float, beta: float, rho: float, a: float, b: complex) -> LaplaceFunction:
    """``s^(rho-1) / (s^alpha + a s^beta + b)`` as an mpmath callable."""
    def f(s):
        return s ** (rho - 1) / (s ** alpha + a * s ** beta + b)
    return f


def caputo_two_term_transform(gamma1, gamma2, delta1, delta2, a, b, f1, g1=0.0, f2=0.0, g2=0.0,
                              family: str = "diffusion_wave") -> LaplaceFunction:
    """Laplace transform in time of the Fourier-space solution.

    For ``family='diffusion_wave'`` (orders in (1, 2]) the initial value and
    velocity data enter through ``f1, g1, f2, g2``. For
    ``family='subdiffusion'`` (orders in (0, 1]) only ``f1`` and ``f2`` are
    used, as the two initial values.
    """
    if family == "diffusion_wave":
        def f(s):
            num = (s ** (delta1 * (gamma1 - 2)) * (s * f1 + g1)
                   + a * s ** (delta2 * (gamma2 - 2)) * (s * f2 + g2))
            return num / (s ** gamma1 + a * s ** gamma2 + b)
    elif family == "subdiffusion":
        def f(s):
            num = s ** (delta1 * (gamma1 - 1)) * f1 + a * s ** (delta2 * (gamma2 - 1)) * f2
            return num / (s ** gamma1 + a * s ** gamma2 + b)
    else:
        raise ParameterError(f"unknown family {family!r}")
    return f


# ---------------------------------------------------------------------------
# finite-difference solver

_MAX_GRID_WORK = 2e10


@dataclass(frozen=True)
class GLField:
    """Finite-difference solution; ``values[n, i]`` is at ``(t[n], x[i])``."""

    x: np.ndarray
    t: np.ndarray
    values: np.ndarray

    def final(self) -> np.ndarray:
        return self.values[-1]


def gl_weights(order: float, count: int) -> np.ndarray:
    """Grunwald-Letnikov weights ``(-1)^j binom(order, j)``, ``j < count``."""
    w = np.empty(count)
    w[0] = 1.0
    for j in range(1, count):
        w[j] = w[j - 1] * (1.0 - (order + 1.0) / j)
    return w


def centered_difference_weights(alpha: float, count: int) -> np.ndarray:
    """Fractional centred-difference weights ``c_k``, ``0 <= k < count``.

    ``-h^-alpha sum_k c_k u(x - kh)`` approximates the Riesz derivative of
    order ``alpha`` to second order; for ``alpha = 2`` the weights are
    ``2, -1, 0, ...``.
    """
    c = np.empty(count)
    c[0] = math.gamma(alpha + 1.0) / math.gamma(alpha / 2.0 + 1.0) ** 2
    for k in range(count - 1):
        c[k + 1] = c[k] * (k - alpha / 2.0) / (k + alpha / 2.0 + 1.0)
    return c


def gl_subdiffusion_solve(gamma: float, alpha: float, eta: float, omega: float,
                          ic: Callable[[np.ndarray], np.ndarray], x_domain: tuple[float, float],
                          nx: int, t_end: float, nt: int, scheme: str = "explicit") -> GLField:
    """Finite-difference solution of ``D_t^gamma N = eta R^alpha N - omega N``.

    ``D_t^gamma`` is the Caputo derivative of order ``gamma`` in (0, 1],
    discretised by Grunwald-Letnikov weights applied to ``N - N(0)``;
    ``R^alpha`` is the Riesz derivative (symbol ``-|k|^alpha``), discretised
    by fractional centred differences. ``N`` vanishes outside ``x_domain``.

    Parameters
    ----------
    ic : callable
        Initial profile in physical space.
    x_domain : (float, float)
        Interval holding the ``nx`` grid points, endpoints included.
    scheme : {'explicit', 'implicit'}
        The explicit scheme needs ``tau^gamma (eta (2/h)^alpha + omega) <= 2^gamma``;
        the implicit one is unconditionally stable.

    Raises
    ------
    StabilityError
        Explicit scheme outside its stability bound.
    ParameterError
        Invalid input, or a run larger than the work cap.
    """
    if not 0 < gamma <= 1:
        raise ParameterError(f"gamma must lie in (0, 1], got {gamma}")
    if not 1 < alpha <= 2:
        raise ParameterError(f"alpha must lie in (1, 2], got {alpha}")
    if not eta > 0 or not omega >= 0:
        raise ParameterError("need eta > 0 and omega >= 0")
    if nx < 3 or nt < 1 or not t_end > 0:
        raise ParameterError("need nx >= 3, nt >= 1, t_end > 0")
    lo, hi = x_domain
    if not hi > lo:
        raise ParameterError("x_domain must be increasing")
    if scheme not in ("explicit", "implicit"):
        raise ParameterError(f"unknown scheme {scheme!r}")
    if 0.5 * float(nt) * nt * nx > _MAX_GRID_WORK:
        raise ParameterError(f"grid nx={nx}, nt={nt} exceeds the resource cap")

    x = np.linspace(lo, hi, nx)
    h = x[1] - x[0]
    tau = t_end / nt
    spectral_radius = eta * (2.0 / h) ** alpha + omega
    if scheme == "explicit" and tau ** gamma * spectral_radius > 2.0 ** gamma:
        raise StabilityError(
            f"explicit scheme unstable: tau^gamma * (eta (2/h)^alpha + omega) = "
            f"{tau ** gamma * spectral_radius:.4g} > 2^gamma = {2.0 ** gamma:.4g}; "
            "refine tau or use scheme='implicit'")

    # operator A = eta R_h - omega I, symmetric Toeplitz
    column = -eta * h ** (-alpha) * centered_difference_weights(alpha, nx)
    column[0] -= omega
    operator = linalg.toeplitz(column)
    g = gl_weights(gamma, nt + 1)
    scale = tau ** gamma

    u = np.empty((nt + 1, nx))
    u[0] = np.asarray(ic(x), dtype=float)
    base = u[0]
    if scheme == "implicit":
        factor = linalg.lu_factor(np.eye(nx) - scale * operator)
    for n in range(1, nt + 1):
        # sum_{j=1}^{n} g_j (u^{n-j} - u^0)
        memory = g[1:n + 1] @ (u[n - 1::-1] - base)
        if scheme == "explicit":
            u[n] = base - memory + scale * (operator @ u[n - 1])
        else:
            u[n] = linalg.lu_solve(factor, base - memory)
    return GLField(x, tau * np.arange(nt + 1), u)

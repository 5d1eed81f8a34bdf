"""Two-term relaxation kernel.

The kernel is the inverse Laplace transform

    K(t) = L^{-1}[ s^(rho-1) / (s^alpha + a s^beta + b) ](t)
         = t^(alpha-rho) sum_r (-a)^r t^((alpha-beta) r)
               E^{r+1}_{alpha, alpha + (alpha-beta) r - rho + 1}(-b t^alpha),

and every spectral solution in this package is a combination of such
kernels. The sum over ``r`` is truncated adaptively: it stops once three
consecutive terms are below ``tol`` relative to the partial sum and a
ratio-test bound on the remainder is also below ``tol``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
import numpy as np

from .errors import ConvergenceError, ParameterError
from .report import TruncationReport
from .special_functions import (DEFAULT_TOL, PrabhakarParams, SeriesCoefficients, prabhakar,
                                prabhakar_within, series_mp)

log = logging.getLogger(__name__)

MAX_R = 200
MAX_R_EXTENDED = 2000
CANCELLATION_LIMIT = 100.0
_QUIET_TERMS = 3
_TERM_SHARE = 0.01
_LN2 = math.log(2.0)


def check_kernel_orders(alpha: float, beta: float, rho: float, t) -> None:
    if not (alpha > beta > 0):
        raise ParameterError(f"kernel needs alpha > beta > 0, got alpha={alpha}, beta={beta}")
    if not alpha - rho > -1:
        raise ParameterError(f"kernel needs alpha - rho > -1, got alpha={alpha}, rho={rho}")
    if not np.all(np.asarray(t) > 0):
        raise ParameterError("kernel needs t > 0")


@dataclass(frozen=True)
class KernelParams:
    """Parameters of one kernel evaluation; ``b`` may be complex."""

    alpha: float
    beta: float
    rho: float
    a: float
    b: complex
    t: float

    def __post_init__(self):
        check_kernel_orders(self.alpha, self.beta, self.rho, self.t)
        if not (math.isfinite(self.a) and np.isfinite(complex(self.b))):
            raise ParameterError("a and b must be finite")


def _term_parts(r, alpha, beta, rho, a, t):
    """Scalar prefactor and Prabhakar parameters of the r-th term."""
    scale = (-a) ** r * t ** (alpha - rho + (alpha - beta) * r)
    params = PrabhakarParams(alpha, alpha + (alpha - beta) * r - rho + 1, r + 1.0)
    return scale, params


def kernel_series_term(r: int, p: KernelParams, tol: float = DEFAULT_TOL) -> complex:
    """The r-th term ``(-a)^r t^(alpha-rho+(alpha-beta)r) E^{r+1}_{...}(-b t^alpha)``."""
    if r < 0 or int(r) != r:
        raise ParameterError(f"term index must be a nonnegative integer, got {r}")
    scale, params = _term_parts(int(r), p.alpha, p.beta, p.rho, p.a, p.t)
    if scale == 0:
        return 0j
    return scale * prabhakar(params, -complex(p.b) * p.t ** p.alpha, tol)


@lru_cache(maxsize=4096)
def _term_coefficients(alpha, beta, rho, r):
    """Series coefficients of the r-th term with its second parameter formed exactly.

    Rounding ``alpha + (alpha - beta) r - rho + 1`` to double separately for
    each r perturbs the terms independently, which ruins a sum whose terms
    cancel heavily.
    """
    def exact():
        a = gmpy2.mpfr(alpha)
        return a + (a - gmpy2.mpfr(beta)) * r - gmpy2.mpfr(rho) + 1
    return SeriesCoefficients(alpha, alpha + (alpha - beta) * r - rho + 1, r + 1.0, exact)


def _mp_log(x) -> float:
    """Natural log of a nonnegative MPFR value as a float; may exceed the double range of x."""
    return float(gmpy2.log(x)) if x > 0 else -math.inf


def _kernel_point_extended(alpha, beta, rho, a, b, t, tol, bits):
    """Kernel at one point with the r-sum carried in extended precision.

    Used where the r-terms cancel heavily or settle slowly. Each term's
    Prabhakar factor is summed at ``bits`` of precision and the working
    precision is raised until the accumulated error bound meets ``tol``.

    Returns (value, terms_used, relative tail).
    """
    y = -complex(b) * t ** alpha
    log_tol = math.log(tol)
    while True:
        with gmpy2.context(gmpy2.get_context(), precision=bits):
            ta = gmpy2.mpfr(t)
            xs = -gmpy2.mpfr(a) * ta ** (gmpy2.mpfr(alpha) - gmpy2.mpfr(beta))
            total = gmpy2.mpc(0)
            scale = ta ** (gmpy2.mpfr(alpha) - gmpy2.mpfr(rho))
            log_err = -math.inf
            log_abs = -math.inf
            quiet, prev, log_tail = 0, math.inf, -math.inf
            for r in range(MAX_R_EXTENDED + 1):
                coef = _term_coefficients(alpha, beta, rho, r)
                e, _, e_err, _ = series_mp(coef, y, bits)
                term = scale * e
                total += term
                mag = abs(term)
                log_mag = _mp_log(mag)
                log_scale = _mp_log(abs(scale))
                log_err = float(np.logaddexp(log_err, log_scale + e_err))
                log_abs = float(np.logaddexp(log_abs, log_mag))
                mod = abs(total)
                log_mod = _mp_log(mod)
                quiet = quiet + 1 if log_mag <= log_tol + log_mod else 0
                q = math.exp(log_mag - prev) if math.isfinite(prev) and math.isfinite(log_mag) else 0.0
                prev = log_mag
                if quiet >= _QUIET_TERMS and q < 1:
                    log_tail = log_mag + math.log(q / (1 - q)) if q > 0 else -math.inf
                    if log_tail <= log_tol + log_mod:
                        break
                scale = scale * xs
            else:
                raise ConvergenceError(
                    f"relaxation kernel did not settle within {MAX_R_EXTENDED} terms "
                    f"(alpha={alpha}, beta={beta}, rho={rho}, a={a}, b={b}, t={t})")
            value = complex(total)
        log_round = -bits * _LN2 + math.log(4 * r + 20) + log_abs
        log_bound = float(np.logaddexp(np.logaddexp(log_round, log_err), log_tail))
        if log_bound <= log_tol + log_mod:
            rel_tail = math.exp(log_tail - log_mod) if math.isfinite(log_tail) else 0.0
            return value, r + 1, rel_tail
        deficit = log_bound - log_tol - (log_mod if math.isfinite(log_mod) else log_abs - bits * _LN2)
        bits += int(deficit / _LN2) + 64
        if bits > 1 << 15:
            raise ConvergenceError(f"relaxation kernel lost all digits to cancellation (a={a}, t={t})")


def kernel_values(alpha: float, beta: float, rho: float, a: float, b, t,
                  tol: float = DEFAULT_TOL, atol: float = 0.0):
    """Kernel at fixed ``(alpha, beta, rho, a)`` for arrays of ``b`` and ``t``.

    ``b`` and ``t`` broadcast against each other. The r-sum is first carried
    in double precision. Points whose terms cancel by more than
    ``CANCELLATION_LIMIT`` (sum of term magnitudes over magnitude of the
    sum), that have not settled after ``MAX_R`` terms, or whose terms leave the
    double range are re-summed with extended precision.

    A point counts as accurate when its error is below ``tol`` relative to
    its value or below ``atol`` absolutely. The absolute floor matters near
    zeros of oscillating kernels, where no relative bound can be certified.

    Returns
    -------
    values : ndarray of complex, shaped like ``b`` broadcast with ``t``
    report : TruncationReport
        ``terms_used`` is the largest number of r-terms any point needed.

    Raises
    ------
    ConvergenceError
        The r-series has not settled after ``MAX_R_EXTENDED`` terms.
    """
    check_kernel_orders(alpha, beta, rho, t)
    if not atol >= 0:
        raise ParameterError(f"atol must be >= 0, got {atol}")
    barr, tarr = np.broadcast_arrays(np.asarray(b, dtype=complex), np.asarray(t, dtype=float))
    shape = barr.shape
    flat, times = barr.ravel(), tarr.ravel()
    z = -flat * times ** alpha
    log_t = np.log(times)
    total = np.zeros(flat.size, complex)
    abs_sum = np.zeros(flat.size)
    quiet = np.zeros(flat.size, int)
    prev_mag = np.full(flat.size, np.inf)
    tail = np.zeros(flat.size)
    terms = np.ones(flat.size, int)
    active = np.ones(flat.size, bool)
    overflowed = np.zeros(flat.size, bool)
    # points with an uncertified term
    suspect = np.zeros(flat.size, bool)
    report = TruncationReport()
    r = 0
    while active.any() and r <= MAX_R:
        idx = np.flatnonzero(active)
        params = PrabhakarParams(alpha, alpha + (alpha - beta) * r - rho + 1, r + 1.0)
        scale = (-a) ** r * np.exp((alpha - rho + (alpha - beta) * r) * log_t[idx])
        # later terms only need accuracy relative to the running sum
        with np.errstate(divide="ignore", invalid="ignore"):
            share = atol if r == 0 else np.maximum(_TERM_SHARE * tol * np.abs(total[idx]), atol)
            term_atol = np.where(scale != 0, share / np.abs(scale), 0.0)
        try:
            vals, _, unsure = prabhakar_within(params, z[idx], tol, term_atol)
        except ConvergenceError:
            # a term left the double range; the extended pass takes these points
            overflowed[idx] = True
            active[idx] = False
            break
        suspect[idx[unsure]] = True
        term = scale * vals
        total[idx] += term
        mag = np.abs(term)
        abs_sum[idx] += mag
        ref = np.maximum(np.abs(total[idx]), np.finfo(float).tiny)
        quiet[idx] = np.where(mag <= tol * ref, quiet[idx] + 1, 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(prev_mag[idx] > 0, mag / prev_mag[idx], 0.0)
        bound = np.where(q < 1, mag * q / np.where(q < 1, 1 - q, 1), np.inf)
        prev_mag[idx] = mag
        terms[idx] = r + 1
        if a == 0:
            active[:] = False
            break
        done = (quiet[idx] >= _QUIET_TERMS) & (bound <= tol * ref)
        tail[idx[done]] = bound[done] / ref[done]
        active[idx[done]] = False
        r += 1

    with np.errstate(divide="ignore", invalid="ignore"):
        lossy = abs_sum > CANCELLATION_LIMIT * np.abs(total)
    redo = np.flatnonzero(active | overflowed | (lossy & (abs_sum > 0)))
    for i in redo:
        ratio = abs_sum[i] / max(abs(total[i]), np.finfo(float).tiny)
        lost = 1100 if overflowed[i] or not math.isfinite(ratio) else math.log2(max(ratio, 1.0))
        bits = 64 + int(lost + math.log2(1.0 / tol))
        v, n_used, rel_tail = _kernel_point_extended(alpha, beta, rho, a, flat[i], float(times[i]), tol, bits)
        total[i], terms[i], tail[i] = v, n_used, rel_tail
    if redo.size:
        log.debug("kernel: %d of %d points re-summed in extended precision", redo.size, flat.size)
    suspect[redo] = False
    report = report.merge(TruncationReport(terms_used=int(terms.max()), tail_estimate=float(tail.max()),
                                           degraded=bool(suspect.any())))
    return total.reshape(shape), report


def two_term_kernel(p: KernelParams, tol: float = DEFAULT_TOL):
    """Kernel value and truncation report for one parameter set.

    Examples
    --------
    >>> v, rep = two_term_kernel(KernelParams(1.5, 0.5, 1.0, 0.0, 0.0, 2.0))
    >>> round(v.real, 7)
    1.5957691
    """
    vals, report = kernel_values(p.alpha, p.beta, p.rho, p.a, np.array([complex(p.b)]), p.t, tol)
    return complex(vals[0]), report

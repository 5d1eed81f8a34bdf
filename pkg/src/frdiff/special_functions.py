"""Mittag-Leffler functions of one, two and three parameters.

All three evaluators share one power-series engine:

    E^gamma_{alpha,beta}(z) = sum_n (gamma)_n z^n / (n! Gamma(n alpha + beta))

The series is summed left to right with compensated (Neumaier) accumulation.
Points where double precision cannot meet the tolerance because of
cancellation are re-summed in extended precision (MPFR via gmpy2), with the
working precision sized from the term magnitudes. This covers |z| <= 200,
the guaranteed-accuracy domain.

Beyond |z| = 200, and wherever the series would need too many terms, the
value comes from the Laplace-transform contour representation (see
:mod:`frdiff._contour`). The contour also serves points the double-precision
series cannot certify, before extended precision is tried. The report is
marked ``degraded`` only when no tier certifies the tolerance.

Arguments in the lower half plane are evaluated at their conjugate and the
result conjugated, so ``f(conj(z)) == conj(f(z))`` holds exactly for real
parameters.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
import numpy as np
from scipy import special

from ._contour import contour_prabhakar
from .errors import ConvergenceError, ParameterError
from .report import TruncationReport

DEFAULT_TOL = 1e-12
MAX_TERMS = 10_000
SERIES_RADIUS = 200.0

_EPS = float(np.finfo(float).eps)
_LN2 = math.log(2.0)
_MAX_BITS = 1 << 16
_OVERFLOW_LOG = 700.0


def pochhammer(a: float, n: int) -> float:
    """Rising factorial ``a (a+1) ... (a+n-1)``; ``(a)_0 = 1``.

    Integer ``a`` is multiplied exactly. Raises ``OverflowError`` when the
    product leaves the double range.
    """
    if n < 0 or int(n) != n:
        raise ParameterError(f"pochhammer needs a nonnegative integer n, got {n}")
    n = int(n)
    if float(a).is_integer():
        exact = math.prod(range(int(a), int(a) + n)) if n else 1
        try:
            return float(exact)
        except OverflowError:
            raise OverflowError(f"({a})_{n} exceeds the double range") from None
    out = 1.0
    for j in range(n):
        out *= a + j
    if not math.isfinite(out):
        raise OverflowError(f"({a})_{n} exceeds the double range")
    return out


def rgamma(x):
    """1/Gamma(x) as a total function: zero at 0, -1, -2, ..."""
    return special.rgamma(x)


class SeriesCoefficients:
    """Series coefficients of one (alpha, beta, gamma) triple, grown on demand.

    Holds ``log|c_n|`` and ``sign(c_n)`` in double precision (used for term
    magnitude estimates and the double tier) and an MPFR copy at the highest
    precision requested so far (used by the extended tier).
    """

    def __init__(self, alpha: float, beta: float, gamma: float, exact_beta=None):
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        # optional callable giving beta as an MPFR value in the current
        # context, for parameters that are sums of doubles
        self._exact_beta = exact_beta
        self._lock = threading.Lock()
        self.logc = np.empty(0)
        self.sign = np.empty(0)
        self._lp = 0.0
        self._sp = 1.0
        self._mp: list = []
        self._mp_prec = 0
        # first index from which term ratios decrease monotonically
        self.regular_from = max(1, math.ceil((1.5 - beta) / alpha), math.ceil(-gamma) + 1)
        g = float(gamma)
        self.terminates_after = int(-g) if g <= 0 and g.is_integer() else None

    def ensure(self, n: int) -> None:
        if n < self.logc.size:
            return
        with self._lock:
            old = self.logc.size
            if n < old:
                return
            new = max(2 * old, n + 1, 64)
            j = np.arange(old, new, dtype=float)
            with np.errstate(divide="ignore"):
                step = np.where(j == 0, 0.0, np.log(np.abs(self.gamma + j - 1)) - np.log(np.maximum(j, 1)))
            lp = self._lp + np.cumsum(step)
            sgn_step = np.where(j == 0, 1.0, np.sign(self.gamma + j - 1))
            sp = self._sp * np.cumprod(sgn_step)
            x = j * self.alpha + self.beta
            lg = special.gammaln(x)
            gs = special.gammasgn(x)
            pole = ~np.isfinite(lg)
            logc = np.where(pole, -np.inf, lp - np.where(pole, 0.0, lg))
            sign = np.where(pole | (sp == 0), 0.0, sp * np.where(pole, 1.0, gs))
            self.logc = np.concatenate([self.logc, logc])
            self.sign = np.concatenate([self.sign, sign])
            self._lp = lp[-1]
            self._sp = sp[-1]

    def mp(self, n: int, prec: int) -> list:
        """MPFR coefficients c_0 .. c_{n-1} carried at >= ``prec`` bits."""
        with self._lock:
            if prec > self._mp_prec:
                self._mp = []
                self._mp_prec = 256 * math.ceil((prec + 32) / 256)
            if len(self._mp) < n:
                with gmpy2.context(gmpy2.get_context(), precision=self._mp_prec):
                    a = gmpy2.mpfr(self.alpha)
                    b = self._exact_beta() if self._exact_beta else gmpy2.mpfr(self.beta)
                    g = gmpy2.mpfr(self.gamma)
                    k = len(self._mp)
                    if k == 0:
                        poch = gmpy2.mpfr(1)
                    else:
                        poch = self._mp_poch
                    while k < n:
                        if k > 0:
                            poch = poch * (g + (k - 1)) / k
                        x = k * a + b
                        if x <= 0 and gmpy2.is_integer(x):
                            c = gmpy2.mpfr(0)
                        else:
                            c = poch / gmpy2.gamma(x)
                        self._mp.append(c)
                        k += 1
                    self._mp_poch = poch
            return self._mp[:n]


@lru_cache(maxsize=4096)
def coefficients(alpha: float, beta: float, gamma: float) -> SeriesCoefficients:
    return SeriesCoefficients(alpha, beta, gamma)


def _neumaier(s, c, x):
    t = s + x
    c += np.where(np.abs(s) >= np.abs(x), (s - t) + x, (x - t) + s)
    return t, c


def _series_double(coef: SeriesCoefficients, w: np.ndarray, tol: float):
    """Vectorised double-precision pass.

    Returns (value, log_abs_sum, error_bound, terms, tail, ok) per point.
    ``ok`` is False where the bound misses ``tol`` or a term overflowed.
    """
    m = w.size
    absw = np.abs(w)
    with np.errstate(divide="ignore"):
        logw = np.log(absw)
    phase = np.where(absw > 0, np.exp(1j * np.angle(w)), 1.0)
    sr, si = np.zeros(m), np.zeros(m)
    cr, ci = np.zeros(m), np.zeros(m)
    weighted = np.zeros(m)
    log_abs = np.full(m, -np.inf)
    unit = np.ones(m, complex)
    prev = np.full(m, -np.inf)
    active = np.ones(m, bool)
    failed = np.zeros(m, bool)
    terms = np.ones(m, int)
    tail = np.zeros(m)
    tiny = 1e-3 * tol

    zero = absw == 0
    active[zero] = False

    n = 0
    coef.ensure(0)
    c0 = coef.sign[0] * math.exp(coef.logc[0]) if np.isfinite(coef.logc[0]) else 0.0
    sr[:] = c0
    log_abs[:] = coef.logc[0]
    weighted[:] = abs(c0) * (abs(coef.logc[0]) + 10 if c0 else 0.0)
    prev[:] = coef.logc[0]
    n = 1
    while True:
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        if coef.terminates_after is not None and n > coef.terminates_after:
            terms[idx] = n
            active[idx] = False
            break
        if n >= MAX_TERMS:
            failed[idx] = True
            terms[idx] = n
            active[idx] = False
            break
        coef.ensure(n)
        unit[idx] *= phase[idx]
        lc = coef.logc[n]
        if not np.isfinite(lc):
            n += 1
            continue
        L = lc + n * logw[idx]
        over = L > _OVERFLOW_LOG
        if over.any():
            failed[idx[over]] = True
            active[idx[over]] = False
            keep = ~over
            idx, L = idx[keep], L[keep]
        mag = np.exp(L)
        t = coef.sign[n] * mag * unit[idx]
        sr[idx], cr[idx] = _neumaier(sr[idx], cr[idx], t.real)
        si[idx], ci[idx] = _neumaier(si[idx], ci[idx], t.imag)
        log_abs[idx] = np.logaddexp(log_abs[idx], L)
        with np.errstate(invalid="ignore", over="ignore"):
            # an infinite bound just hands the point to the next tier
            weighted[idx] += mag * (np.abs(L) + 2 * n + 10)
            ratio = np.exp(L - prev[idx])
        prev[idx] = L
        if n >= coef.regular_from:
            cur = np.hypot(sr[idx] + cr[idx], si[idx] + ci[idx])
            done = (ratio < 0.5) & (mag <= tiny * cur)
            if done.any():
                d = idx[done]
                q = ratio[done]
                tail[d] = mag[done] * q / (1 - q)
                terms[d] = n + 1
                active[d] = False
        n += 1

    value = (sr + cr) + 1j * (si + ci)
    bound = _EPS * weighted + tail
    ok = ~failed & (bound <= tol * np.abs(value))
    ok[zero] = True
    return value, log_abs, bound, terms, tail, ok


def _log_profile(coef: SeriesCoefficients, logw: float, drop: float):
    """Term log-magnitudes out to ``drop`` nats below the running log-sum."""
    n = 256
    while True:
        coef.ensure(n)
        L = coef.logc[:n] + np.arange(n) * logw
        L[0] = coef.logc[0]
        finite = np.isfinite(L)
        if not finite.any():
            return L, -np.inf
        logsum = np.logaddexp.reduce(L[finite])
        k = np.arange(n)
        with np.errstate(invalid="ignore"):
            dec = np.concatenate([[False], np.diff(L) < -_LN2])
        past = (k >= coef.regular_from) & dec & (L < logsum - drop)
        if coef.terminates_after is not None and n > coef.terminates_after + 1:
            return L[: coef.terminates_after + 1], logsum
        if past.any():
            cut = int(np.argmax(past)) + 1
            return L[:cut], logsum
        if n >= MAX_TERMS:
            return L, logsum
        n = min(2 * n, MAX_TERMS)


def series_mp(coef: SeriesCoefficients, w: complex, bits: int):
    """Sum the series at ``bits`` of working precision.

    Returns ``(value, terms, log_err, log_tail)`` where ``value`` is a gmpy2
    ``mpc`` and ``log_err`` bounds the log of the absolute error (rounding
    plus truncated tail).
    """
    if w == 0:
        with gmpy2.context(gmpy2.get_context(), precision=bits):
            return gmpy2.mpc(coef.mp(1, bits)[0]), 1, -np.inf, -np.inf
    logw = math.log(abs(w))
    L, logsum = _log_profile(coef, logw, drop=bits * _LN2)
    n_terms = L.size
    if n_terms >= MAX_TERMS and coef.terminates_after is None:
        raise ConvergenceError(
            f"Mittag-Leffler series needs more than {MAX_TERMS} terms at |z|={abs(w):.4g} "
            f"(alpha={coef.alpha}, beta={coef.beta}, gamma={coef.gamma})")
    cs = coef.mp(n_terms, bits)
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        wz = gmpy2.mpc(w)
        p = gmpy2.mpc(1)
        s = gmpy2.mpc(0)
        for c in cs:
            if c:
                s += c * p
            p *= wz
    # tail beyond the cut, from the ratio of the last two finite terms
    fin = L[np.isfinite(L)]
    if coef.terminates_after is not None and n_terms > coef.terminates_after:
        log_tail = -np.inf
    elif fin.size >= 2 and fin[-1] < fin[-2]:
        q = math.exp(fin[-1] - fin[-2])
        log_tail = fin[-1] + math.log(q / (1 - q))
    else:
        log_tail = fin[-1] if fin.size else -np.inf
    log_round = -bits * _LN2 + math.log(2 * n_terms + 10) + logsum
    return s, n_terms, float(np.logaddexp(log_round, log_tail)), log_tail


def _series_extended(coef: SeriesCoefficients, w: complex, tol: float, guess: float):
    """Extended-precision series at one point. Returns (value, terms, rel_tail, ok)."""
    L, logsum = _log_profile(coef, math.log(abs(w)), drop=60.0)
    ref = math.log(guess) if guess > 0 and math.isfinite(guess) else logsum - 40.0
    bits = max(128, int((logsum - ref - math.log(tol)) / _LN2) + 64)
    while True:
        s, n_terms, log_err, log_tail = series_mp(coef, w, bits)
        mod = abs(s)
        value = complex(s)
        log_mod = math.log(mod) if mod > 0 else -np.inf
        if log_err <= math.log(tol) + log_mod:
            rel_tail = math.exp(log_tail - log_mod) if np.isfinite(log_tail) else 0.0
            return value, n_terms, rel_tail, True
        if bits >= _MAX_BITS:
            return value, n_terms, 1.0, False
        deficit = log_err - math.log(tol) - (log_mod if np.isfinite(log_mod) else logsum - 4 * bits * _LN2)
        bits = min(_MAX_BITS, bits + int(deficit / _LN2) + 64)


def _evaluate(alpha, beta, gamma, w, tol, atol):
    """Core evaluator on a flat array with Im(w) >= 0.

    A point is accepted once its error bound is below ``tol * |value|`` or
    below its entry of ``atol``.
    """
    coef = coefficients(float(alpha), float(beta), float(gamma))
    out = np.empty(w.size, complex)
    terms = np.ones(w.size, int)
    rel_tail = np.zeros(w.size)
    uncertain = np.zeros(w.size, bool)

    # the series peaks near n = |z|^(1/alpha) / alpha; beyond the term cap
    # it cannot be summed and the contour route takes over
    absw = np.abs(w)
    with np.errstate(over="ignore"):
        peak = absw ** (1.0 / alpha) / alpha
    large = (absw > SERIES_RADIUS) | (peak > 0.25 * MAX_TERMS)
    if coef.terminates_after is not None:
        large[:] = False
    small = ~large

    if small.any():
        ws = w[small]
        val, log_abs, bound, nt, tail, ok = _series_double(coef, ws, tol)
        with np.errstate(divide="ignore", invalid="ignore"):
            rt = np.where(np.abs(val) > 0, tail / np.abs(val), 0.0)
        ok |= bound <= atol[small]
        bad = np.flatnonzero(~ok)
        if bad.size and coef.terminates_after is None:
            # a certified contour value is far cheaper than extended precision
            cv, cerr, cfall = contour_prabhakar(alpha, beta, gamma, ws[bad])
            good = ~cfall & ((cerr <= tol * np.abs(cv)) | (cerr <= atol[small][bad]))
            val[bad[good]] = cv[good]
            rt[bad[good]] = 0.0
            bad = bad[~good]
        unsure = np.zeros(ws.size, bool)
        for i in bad:
            guess = abs(val[i]) if bound[i] < abs(val[i]) else 0.0
            v, n_used, t_rel, good = _series_extended(coef, complex(ws[i]), tol, guess)
            val[i], nt[i], rt[i] = v, n_used, t_rel
            unsure[i] = not good
        uncertain[small] = unsure
        out[small] = val
        terms[small] = nt
        rel_tail[small] = rt

    if large.any():
        wl = w[large]
        vals, errs, fallback = contour_prabhakar(alpha, beta, gamma, wl)
        with np.errstate(invalid="ignore"):
            uncertified = ~fallback & ~((errs <= tol * np.abs(vals)) | (errs <= atol[large]))
        for i in np.flatnonzero(fallback):
            v, n_used, t_rel, good = _series_extended(coef, complex(wl[i]), tol, 0.0)
            vals[i] = v
            uncertified[i] = not good
        uncertain[large] = uncertified
        out[large] = vals

    # the function is real on the real axis; drop contour round-off there
    real_axis = w.imag == 0
    out[real_axis] = out[real_axis].real

    if not np.all(np.isfinite(out)):
        raise ConvergenceError(
            f"Mittag-Leffler value outside the double range (alpha={alpha}, beta={beta}, gamma={gamma})")
    report = TruncationReport(
        terms_used=int(terms.max()) if terms.size else 1,
        tail_estimate=float(rel_tail.max()) if rel_tail.size else 0.0,
        degraded=bool(uncertain.any()),
    )
    return out, report, uncertain


def _check_params(alpha, beta, gamma, tol):
    for name, v in (("alpha", alpha), ("beta", beta), ("gamma", gamma), ("tol", tol)):
        if not math.isfinite(v):
            raise ParameterError(f"{name} must be finite, got {v}")
    if alpha <= 0:
        raise ParameterError(f"alpha must be > 0, got {alpha}")
    if tol <= 0:
        raise ParameterError(f"tol must be > 0, got {tol}")


def _prabhakar(alpha, beta, gamma, z, tol=DEFAULT_TOL, full_output=False, atol=None, per_point=False):
    _check_params(alpha, beta, gamma, tol)
    zarr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(zarr)):
        raise ParameterError("z must be finite")
    flat = zarr.ravel()
    flip = flat.imag < 0
    w = np.where(flip, flat.conj(), flat)
    atol = np.zeros(w.size) if atol is None else np.broadcast_to(np.asarray(atol, float), w.shape).ravel()
    out, report, uncertain = _evaluate(alpha, beta, gamma, w, tol, atol)
    out = np.where(flip, out.conj(), out)
    if per_point:
        return out.reshape(zarr.shape), report, uncertain.reshape(zarr.shape)
    result = complex(out[0]) if zarr.ndim == 0 else out.reshape(zarr.shape)
    return (result, report) if full_output else result


def prabhakar_within(params: "PrabhakarParams", z, tol: float, atol):
    """Like :func:`prabhakar`, accepting absolute errors up to ``atol``.

    ``atol`` broadcasts against ``z``. Used where only the size of a value
    relative to some larger sum matters.

    Returns
    -------
    values : ndarray of complex, shaped like ``z``
    report : TruncationReport
    uncertain : ndarray of bool
        Points no evaluation tier could certify.
    """
    return _prabhakar(params.alpha, params.beta, params.gamma, z, tol, True, atol, per_point=True)


def prabhakar(params: "PrabhakarParams", z, tol: float = DEFAULT_TOL, *, full_output: bool = False):
    """Three-parameter (Prabhakar) Mittag-Leffler function E^gamma_{alpha,beta}(z).

    Parameters
    ----------
    params : PrabhakarParams
        The triple ``(alpha, beta, gamma)``. ``alpha > 0``; ``beta`` may be
        any real (coefficients at poles of Gamma vanish). For ``gamma`` a
        nonpositive integer the series is a polynomial and is summed to its
        last term.
    z : complex or array_like
        Argument(s). Arrays are evaluated element-wise.
    tol : float
        Target relative accuracy.
    full_output : bool
        Also return a :class:`~frdiff.report.TruncationReport`.

    Returns
    -------
    complex or ndarray of complex, optionally with the report.

    Raises
    ------
    ConvergenceError
        The series needs more than ``MAX_TERMS`` terms.
    """
    return _prabhakar(params.alpha, params.beta, params.gamma, z, tol, full_output)


def mittag_leffler_two(alpha: float, beta: float, z, tol: float = DEFAULT_TOL,
                       *, full_output: bool = False):
    """Two-parameter Mittag-Leffler function E_{alpha,beta}(z)."""
    return _prabhakar(alpha, beta, 1.0, z, tol, full_output)


def mittag_leffler_one(alpha: float, z, tol: float = DEFAULT_TOL, *, full_output: bool = False):
    """One-parameter Mittag-Leffler function E_alpha(z) = E_{alpha,1}(z)."""
    return mittag_leffler_two(alpha, 1.0, z, tol, full_output=full_output)


@dataclass(frozen=True)
class PrabhakarParams:
    """The triple (alpha, beta, gamma) indexing E^gamma_{alpha,beta}."""

    alpha: float
    beta: float
    gamma: float = 1.0

    def __post_init__(self):
        _check_params(self.alpha, self.beta, self.gamma, 1.0)

    def __call__(self, z, tol: float = DEFAULT_TOL, *, full_output: bool = False):
        return prabhakar(self, z, tol, full_output=full_output)

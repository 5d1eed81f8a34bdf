"""Contour-integral evaluation of the Prabhakar function for large |z|.

Uses the Laplace-pair representation

    E^gamma_{alpha,beta}(z) = (1/2 pi i) int_C e^s s^{-beta} (1 - z s^{-alpha})^{-gamma} ds

on the parabola ``s = mu (1 + i u)^2``, discretised by the trapezoid rule in
``u``. Poles of the integrand (zeros of ``s^alpha - z`` on the principal
sheet) that fall to the right of the parabola are added as residues, each
computed by a trapezoid rule on a small circle. The parameter ``mu`` and the
step are chosen so that the nearest pole stays several steps away from the
discretised contour while the integrand magnitude, which sets the rounding
floor, stays as small as possible.

Each value comes with an absolute error estimate: the difference between
the trapezoid sums at steps ``h`` and ``h/2`` (conservative, since the rule
converges exponentially), plus a rounding floor proportional to the sum of
integrand magnitudes.

For non-integer ``gamma`` the poles are branch points; such arguments are
reported back to the caller for evaluation by the series route.
"""

from __future__ import annotations

import math

import numpy as np

_DECAY = 40.0
_MIN_GAP = 0.05
_MAX_HALF_NODES = 4000
_MU_CANDIDATES = np.geomspace(0.5, 12.0, 25)
_CIRCLE_NODES = 96
_NEGLIGIBLE = -720.0
_EPS = np.finfo(float).eps
_ROUNDING_SLACK = 64.0


def _integrand(s, alpha, beta, gamma, z):
    logs = np.log(s)
    q = 1.0 - z * np.exp(-alpha * logs)
    return np.exp(s - beta * logs) * q ** (-gamma)


def _poles(alpha, z):
    """Principal-sheet solutions of s^alpha = z."""
    rho = abs(z) ** (1.0 / alpha)
    theta = math.atan2(z.imag, z.real)
    lo = math.ceil((-alpha * math.pi - theta) / (2 * math.pi))
    hi = math.floor((alpha * math.pi - theta) / (2 * math.pi))
    out = []
    for j in range(lo, hi + 1):
        phi = (theta + 2 * math.pi * j) / alpha
        if abs(phi) >= math.pi:
            continue
        out.append(rho * complex(math.cos(phi), math.sin(phi)))
    return out


def _offset(pole, mu):
    """Signed distance in the u-plane between a pole and the real u axis."""
    return (np.sqrt(pole / mu)).real - 1.0


def _residue(pole, others, alpha, beta, gamma, z):
    """Residue via a circle trapezoid; returns (value, error estimate)."""
    gaps = [abs(pole - o) for o in others]
    radius = min(max(1.0, gamma - 1.0), 0.5 * abs(pole), *(0.5 * g for g in gaps))
    if pole.real < 0:
        radius = min(radius, 0.9 * abs(pole.imag))
    phi = 2 * math.pi * np.arange(_CIRCLE_NODES) / _CIRCLE_NODES
    e = np.exp(1j * phi)
    terms = radius * _integrand(pole + radius * e, alpha, beta, gamma, z) * e
    fine = complex(np.mean(terms))
    coarse = complex(np.mean(terms[::2]))
    err = abs(fine - coarse) + _ROUNDING_SLACK * _EPS * float(np.mean(np.abs(terms)))
    return fine, err


def _choose_contour(alpha, beta, gamma, z, poles, integer_gamma):
    """Pick (mu, h, n_half) for the parabola.

    Among candidates that keep every pole at least ``_MIN_GAP`` from the
    real u axis (and, for non-integer gamma, every root left of the
    contour), take the one with the smallest integrand magnitude, which sets
    the rounding floor. The step keeps the discretisation error of a strip
    of half-width ``d`` near ``exp(-_DECAY)``.
    """
    mus = _MU_CANDIDATES
    gaps = np.full(mus.size, np.inf)
    feasible = np.ones(mus.size, bool)
    for p in poles:
        off = np.sqrt(p / mus).real - 1.0
        gaps = np.minimum(gaps, np.abs(off))
        if not integer_gamma:
            feasible &= off <= 0
    d = np.minimum(0.5, 0.45 * gaps)
    u_max = np.sqrt(1.0 + _DECAY / mus)
    h = 2 * np.pi * d / (_DECAY + mus * ((1 + d) ** 2 - 1))
    n_half = np.ceil(u_max / h)
    feasible &= (gaps >= _MIN_GAP) & (n_half <= _MAX_HALF_NODES)
    best = None
    if feasible.any():
        w = 1.0 + 1j * np.linspace(0.0, 1.0, 16)[None, :] * u_max[:, None]
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            vals = _integrand(mus[:, None] * w * w, alpha, beta, gamma, z) * w * mus[:, None]
            scale = np.max(np.abs(vals), axis=1)
        scale = np.where(feasible & np.isfinite(scale), scale, np.inf)
        k = int(np.argmin(scale))
        if math.isfinite(scale[k]):
            best = (scale[k], float(mus[k]), float(u_max[k] / n_half[k]), int(n_half[k]))
    if best is not None:
        return best[1:]
    if not integer_gamma or not poles:
        return None
    # no candidate clears the gap: fall back to the widest gap
    scores = [min(abs(_offset(p, mu)) for p in poles) for mu in _MU_CANDIDATES]
    k = int(np.argmax(scores))
    mu, gap = float(_MU_CANDIDATES[k]), float(scores[k])
    u_max = math.sqrt(1.0 + _DECAY / mu)
    n_half = min(_MAX_HALF_NODES, math.ceil(u_max / (0.2 * gap)))
    return mu, u_max / n_half, n_half


def _single(alpha, beta, gamma, z):
    roots = _poles(alpha, z)
    integer_gamma = float(gamma).is_integer()
    # for non-integer gamma the roots are branch points whose cuts run to
    # the origin, so no root may lie right of the contour
    poles = roots if not integer_gamma else [p for p in roots if p.real > _NEGLIGIBLE]
    choice = _choose_contour(alpha, beta, gamma, z, poles, integer_gamma)
    if choice is None:
        return None
    mu, h, n_half = choice
    # nodes at step h/2; the even-indexed subset is the step-h rule
    u = 0.5 * h * np.arange(-2 * n_half, 2 * n_half + 1)
    w = 1.0 + 1j * u
    s = mu * w * w
    terms = _integrand(s, alpha, beta, gamma, z) * w * (mu / math.pi)
    fine = complex(0.5 * h * np.sum(terms))
    coarse = complex(h * np.sum(terms[::2]))
    mags = np.abs(terms)
    err = abs(fine - coarse) + _ROUNDING_SLACK * _EPS * 0.5 * h * float(np.sum(mags))
    err += float(mags[0] + mags[-1])
    total = fine
    inside = [p for p in poles if _offset(p, mu) > 0]
    for p in inside:
        value, res_err = _residue(p, [o for o in poles if o != p], alpha, beta, gamma, z)
        total += value
        err += res_err + _ROUNDING_SLACK * _EPS * abs(value)
    return total, err


def contour_prabhakar(alpha, beta, gamma, z):
    """Evaluate on an array of arguments.

    Returns
    -------
    values : ndarray of complex
    errors : ndarray of float
        Absolute error estimates; ``inf`` where the value is not finite.
    fallback : ndarray of bool
        True where the contour route does not apply and the caller must use
        another method.
    """
    z = np.asarray(z, dtype=complex)
    values = np.zeros(z.shape, complex)
    errors = np.full(z.shape, np.inf)
    fallback = np.zeros(z.shape, bool)
    with np.errstate(over="ignore", invalid="ignore"):
        for i, zi in enumerate(z):
            out = _single(float(alpha), float(beta), float(gamma), complex(zi))
            if out is None:
                fallback[i] = True
            else:
                values[i], err = out
                if np.isfinite(values[i]) and math.isfinite(err):
                    errors[i] = err
    return values, errors, fallback

"""Spectral solutions, source convolution and the physical-space solver.

In Fourier space every solution is a combination of relaxation kernels
``K_rho(t)`` (see :mod:`frdiff.kernel`) with ``alpha = gamma1``,
``beta = gamma2`` and ``b = omega + sum_j eta_j psi_j(k)``:

* diffusion-wave family (orders in (1, 2])::

      N(k,t) = f1 K_{2-d1(2-g1)} + g1 K_{1-d1(2-g1)}
               + a f2 K_{2-d2(2-g2)} + a g2 K_{1-d2(2-g2)}

* subdiffusion family (orders in (0, 1])::

      N(k,t) = h1 K_{1-d1(1-g1)} + a h2 K_{1-d2(1-g2)}

A prescribed forcing adds ``int_0^t K_1(xi) U(k, t - xi) dxi``. The
physical-space field is the inverse Fourier transform of the sum.

Kernel values are accepted when accurate to ``tol`` relative or ``tol``
absolute. The absolute floor is in units of the O(1) spectral data and keeps
zeros of oscillating diffusion-wave kernels from being reported as degraded.
"""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import FamilyError, ParameterError, QuadratureError, RealnessError
from .kernel import DEFAULT_TOL, kernel_values
from .problem import Family, InitialData, Problem, Source
from .quadrature import QuadratureConfig, fourier_inverse_many, graded_mesh
from .report import TruncationReport
from .spectral import spectral_coefficient

log = logging.getLogger(__name__)

MAX_MESH_PANELS = 256
_FIRST_MESH_PANELS = 4
_SOURCE_FLOOR = 1e-14


class CorollaryTag(enum.Flag):
    """Special cases a problem falls into; used for reporting only."""

    NONE = 0
    CAPUTO = enum.auto()
    RIEMANN_LIOUVILLE = enum.auto()
    HILFER = enum.auto()
    RIESZ = enum.auto()
    RIESZ_FELLER = enum.auto()
    REACTION_FREE = enum.auto()
    MULTI_TERM = enum.auto()
    SINGLE_ORDER = enum.auto()

    def names(self) -> list[str]:
        return [t.name.lower() for t in CorollaryTag if t and t in self and t.name]


def specialize(spec: Problem) -> CorollaryTag:
    """Classify ``spec`` by derivative type, space symmetry and reaction term.

    Examples
    --------
    >>> from frdiff.problem import TimeDerivative
    >>> from frdiff.spectral import SpaceTerm
    >>> p = Problem(TimeDerivative(1.8), TimeDerivative(1.2), [SpaceTerm(1, 1.5)], a=1, omega=0.5)
    >>> specialize(p).names()
    ['caputo', 'riesz']
    """
    deltas = (spec.time1.delta, spec.time2.delta)
    if all(d == 1 for d in deltas):
        tag = CorollaryTag.CAPUTO
    elif all(d == 0 for d in deltas):
        tag = CorollaryTag.RIEMANN_LIOUVILLE
    else:
        tag = CorollaryTag.HILFER
    if all(term.theta == 0 for term in spec.space_terms):
        tag |= CorollaryTag.RIESZ
    else:
        tag |= CorollaryTag.RIESZ_FELLER
    if spec.omega == 0:
        tag |= CorollaryTag.REACTION_FREE
    if len(spec.space_terms) > 1:
        tag |= CorollaryTag.MULTI_TERM
    if spec.a == 0:
        tag |= CorollaryTag.SINGLE_ORDER
    return tag


def _initial_pieces(spec: Problem):
    """(spectral function, coefficient, rho) for each initial-data series."""
    g1, d1 = spec.time1.gamma, spec.time1.delta
    g2, d2 = spec.time2.gamma, spec.time2.delta
    ic = spec.ic
    if spec.family is Family.DIFFUSION_WAVE:
        return [
            (ic.f1, 1.0, 2.0 - d1 * (2.0 - g1)),
            (ic.g1, 1.0, 1.0 - d1 * (2.0 - g1)),
            (ic.f2, spec.a, 2.0 - d2 * (2.0 - g2)),
            (ic.g2, spec.a, 1.0 - d2 * (2.0 - g2)),
        ]
    return [
        (ic.h1, 1.0, 1.0 - d1 * (1.0 - g1)),
        (ic.h2, spec.a, 1.0 - d2 * (1.0 - g2)),
    ]


def _assemble(spec: Problem, k: np.ndarray, b: np.ndarray, t: float, tol: float):
    """Initial-data part of the spectral solution for coefficient array ``b``."""
    total = np.zeros(b.shape, complex)
    report = TruncationReport()
    for data, coef, rho in _initial_pieces(spec):
        if data is None or coef == 0:
            continue
        weight = np.asarray(data(k), dtype=complex)
        vals, rep = kernel_values(spec.time1.gamma, spec.time2.gamma, rho, spec.a, b, t, tol, atol=tol)
        total += coef * weight * vals
        report = report.merge(rep)
    return total, report


def _check_time(t):
    if not (math.isfinite(t) and t > 0):
        raise ParameterError(f"time must be > 0, got {t}")


def _spectral(spec: Problem, k, t: float, tol: float, full_output: bool):
    _check_time(t)
    karr = np.asarray(k, dtype=float)
    flat = karr.ravel()
    b = np.asarray(spectral_coefficient(spec.omega, spec.space_terms, flat), dtype=complex)
    vals, report = _assemble(spec, flat, b, t, tol)
    out = complex(vals[0]) if karr.ndim == 0 else vals.reshape(karr.shape)
    return (out, report) if full_output else out


def _require_family(spec: Problem, family: Family, name: str):
    if spec.family is not family:
        raise FamilyError(f"{name} needs time orders in {family.value}, got family {spec.family.value}")


def spectral_solution_t1(spec: Problem, k, t: float, tol: float = DEFAULT_TOL, *, full_output: bool = False):
    """Fourier-space solution for orders in (1, 2] with a single space term.

    Parameters
    ----------
    spec : Problem
        Diffusion-wave problem with exactly one space term.
    k : float or array_like
        Wavenumber(s).
    t : float
        Time, > 0.
    tol : float
        Relative tolerance passed to the kernel.

    Returns
    -------
    complex or ndarray of complex
        The initial-data part of the spectral solution; forcing is added by
        :func:`source_convolution`.

    Raises
    ------
    FamilyError
        Orders are not in (1, 2].
    ParameterError
        More than one space term (use :func:`spectral_solution_t3`).
    """
    _require_family(spec, Family.DIFFUSION_WAVE, "spectral_solution_t1")
    if len(spec.space_terms) != 1:
        raise ParameterError("spectral_solution_t1 takes one space term; use spectral_solution_t3")
    return _spectral(spec, k, t, tol, full_output)


def spectral_solution_t2(spec: Problem, k, t: float, tol: float = DEFAULT_TOL, *, full_output: bool = False):
    """Fourier-space solution for orders in (0, 1], any number of space terms.

    Examples
    --------
    >>> from frdiff.problem import TimeDerivative
    >>> from frdiff.spectral import SpaceTerm
    >>> p = Problem(TimeDerivative(1.0), TimeDerivative(0.5), [SpaceTerm(1, 2.0)])
    >>> round(spectral_solution_t2(p, 1.0, 1.0).real, 12) == round(math.exp(-1), 12)
    True
    """
    _require_family(spec, Family.SUBDIFFUSION, "spectral_solution_t2")
    return _spectral(spec, k, t, tol, full_output)


def spectral_solution_t3(spec: Problem, k, t: float, tol: float = DEFAULT_TOL, *, full_output: bool = False):
    """Fourier-space solution for orders in (1, 2] with any number of space terms.

    Uses the same assembly as :func:`spectral_solution_t1`, so with one space
    term the two agree bit for bit.
    """
    _require_family(spec, Family.DIFFUSION_WAVE, "spectral_solution_t3")
    return _spectral(spec, k, t, tol, full_output)


def spectral_solution(spec: Problem, k, t: float, tol: float = DEFAULT_TOL, *, full_output: bool = False):
    """Initial-data part of the spectral solution for either family."""
    return _spectral(spec, k, t, tol, full_output)


def _convolution_on_mesh(spec, k, b, t, n, quad, tol):
    gamma1 = spec.time1.gamma
    mesh = graded_mesh(t, quad.grading_exponent, n, power=gamma1 - 1.0,
                       nodes_per_panel=quad.nodes_per_panel)
    xi = mesh.nodes[:, None]
    kern, report = kernel_values(gamma1, spec.time2.gamma, 1.0, spec.a, b[None, :], xi, tol, atol=tol)
    forcing = np.stack([np.asarray(spec.source.u_hat(k, t - float(s)), dtype=complex) for s in mesh.nodes])
    # the mesh weights already carry xi^(gamma1 - 1)
    weights = mesh.weights * mesh.nodes ** (1.0 - gamma1)
    return weights @ (kern * forcing), report


def source_convolution(spec: Problem, k, t: float, quad: QuadratureConfig = QuadratureConfig(),
                       tol: float = DEFAULT_TOL, *, full_output: bool = False, method: str = "auto"):
    """Forcing contribution ``int_0^t K_1(xi) U(k, t - xi) dxi``.

    ``K_1`` is the kernel with ``rho = 1``; it behaves like
    ``xi^(gamma1 - 1) / Gamma(gamma1)`` at the origin, so the integral uses a
    graded mesh with that power as a product weight. The panel count doubles
    from 4 until successive results agree to ``max(tol, 1e-10)`` relative.

    With ``method="auto"`` a steady source skips the quadrature: the time
    integral of ``K_1`` over ``[0, t]`` is ``K_0(t)`` (its Laplace transform
    carries one more factor ``1/s``), so the result is ``U(k) K_0(t)``.
    ``method="quadrature"`` forces the mesh path.

    Raises
    ------
    QuadratureError
        No agreement within ``MAX_MESH_PANELS`` panels.

    Examples
    --------
    >>> from frdiff.problem import TimeDerivative, Source
    >>> from frdiff.spectral import SpaceTerm
    >>> p = Problem(TimeDerivative(0.8), TimeDerivative(0.4), [SpaceTerm(1, 2.0)],
    ...             source=Source(lambda k, s: np.ones_like(k) + 0j))
    >>> round(source_convolution(p, 0.0, 1.0).real, 10) == round(1 / math.gamma(1.8), 10)
    True
    """
    _check_time(t)
    if method not in ("auto", "quadrature"):
        raise ParameterError(f"method must be 'auto' or 'quadrature', got {method!r}")
    karr = np.asarray(k, dtype=float)
    flat = karr.ravel()
    if not spec.source.present:
        out = np.zeros(flat.shape, complex)
        report = TruncationReport()
    elif spec.source.steady and method == "auto":
        b = np.asarray(spectral_coefficient(spec.omega, spec.space_terms, flat), dtype=complex)
        kern, report = kernel_values(spec.time1.gamma, spec.time2.gamma, 0.0, spec.a, b, t, tol, atol=tol)
        out = kern * np.asarray(spec.source.u_hat(flat, t), dtype=complex)
    else:
        b = np.asarray(spectral_coefficient(spec.omega, spec.space_terms, flat), dtype=complex)
        rtol = max(tol, 1e-10)
        n = _FIRST_MESH_PANELS
        prev, report = _convolution_on_mesh(spec, flat, b, t, n, quad, tol)
        while True:
            n *= 2
            if n > MAX_MESH_PANELS:
                raise QuadratureError(
                    f"source convolution did not settle within {MAX_MESH_PANELS} graded panels "
                    f"(t={t}, change {change:.3g}, target {target:.3g})")
            out, rep = _convolution_on_mesh(spec, flat, b, t, n, quad, tol)
            report = report.merge(rep)
            change = float(np.max(np.abs(out - prev)))
            target = max(rtol * float(np.max(np.abs(out))), _SOURCE_FLOOR)
            if change <= target:
                break
            prev = out
        report = report.merge(TruncationReport(tail_estimate=change / max(float(np.max(np.abs(out))), 1e-300)))
    result = complex(out[0]) if karr.ndim == 0 else out.reshape(karr.shape)
    return (result, report) if full_output else result


@dataclass(frozen=True)
class Grid:
    """Positions and times at which the field is wanted."""

    x: tuple
    t: tuple

    def __post_init__(self):
        xs = tuple(float(v) for v in self.x)
        ts = tuple(float(v) for v in self.t)
        if not xs or not ts:
            raise ParameterError("grid needs at least one position and one time")
        if not all(math.isfinite(v) for v in xs):
            raise ParameterError("grid positions must be finite")
        for v in ts:
            _check_time(v)
        object.__setattr__(self, "x", xs)
        object.__setattr__(self, "t", ts)

    @classmethod
    def uniform(cls, x_min: float, x_max: float, nx: int, times: Sequence[float]) -> "Grid":
        if int(nx) != nx or nx < 1:
            raise ParameterError(f"nx must be a positive integer, got {nx}")
        if nx > 1 and not x_max > x_min:
            raise ParameterError(f"x_max must exceed x_min, got [{x_min}, {x_max}]")
        return cls(tuple(np.linspace(x_min, x_max, int(nx))), tuple(times))


@dataclass(frozen=True)
class SolutionField:
    """Real solution values on a grid; ``values[i, j]`` is at ``(t[i], x[j])``."""

    x_grid: tuple
    t_grid: tuple
    values: np.ndarray
    imag_residual: float
    report: TruncationReport
    tags: CorollaryTag = CorollaryTag.NONE

    def rows(self):
        """(x, t, N) triples, time-major."""
        for i, t in enumerate(self.t_grid):
            for j, x in enumerate(self.x_grid):
                yield x, t, float(self.values[i, j])


def _solve_one_time(spec, xs, t, quad, tol):
    parts = []

    def spectrum(k):
        vals, rep = _spectral(spec, k, t, tol, True)
        parts.append(rep)
        if spec.source.present:
            forced, rep = source_convolution(spec, k, t, quad, tol, full_output=True)
            vals = vals + forced
            parts.append(rep)
        return vals

    result = fourier_inverse_many(spectrum, xs, quad)
    report = result.report
    for rep in parts:
        report = report.merge(TruncationReport(degraded=rep.degraded))
    return result.values, result.imag_residual, report


def solve(spec: Problem, grid: Grid, quad: QuadratureConfig = QuadratureConfig(),
          tol: float = DEFAULT_TOL, threads: int = 1) -> SolutionField:
    """Physical-space solution on ``grid``.

    Each time level is an independent inverse Fourier transform; with
    ``threads > 1`` the levels run concurrently and are collected in grid
    order, so the output does not depend on scheduling.

    Raises
    ------
    RealnessError
        The imaginary residual exceeds ``quad.realness_tol``.
    TailError, QuadratureError, ConvergenceError
        Numerical failure in the Fourier integral, the source convolution or
        the kernel.

    Examples
    --------
    >>> from frdiff.problem import TimeDerivative
    >>> from frdiff.spectral import SpaceTerm
    >>> p = Problem(TimeDerivative(1.0), TimeDerivative(0.5), [SpaceTerm(1, 2.0)])
    >>> f = solve(p, Grid((0.0, 2.0), (1.0,)))
    >>> [round(v, 7) for v in f.values[0]]
    [0.2820948, 0.1037769]
    """
    if int(threads) != threads or threads < 1:
        raise ParameterError(f"threads must be a positive integer, got {threads}")
    xs = np.asarray(grid.x)

    def level(t):
        return _solve_one_time(spec, xs, t, quad, tol)

    if threads == 1 or len(grid.t) == 1:
        results = [level(t) for t in grid.t]
    else:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            results = list(pool.map(level, grid.t))
    values = np.vstack([r[0] for r in results])
    imag = max(r[1] for r in results)
    report = TruncationReport()
    for r in results:
        report = report.merge(r[2])
    if imag > quad.realness_tol:
        raise RealnessError(f"imaginary residual {imag:.3g} exceeds realness_tol={quad.realness_tol:.3g}")
    log.info("solve: %d x %d grid, %s", len(grid.t), len(grid.x), report.summary())
    return SolutionField(grid.x, grid.t, values, imag, report, specialize(spec))


def green_function(spec: Problem, grid: Grid, quad: QuadratureConfig = QuadratureConfig(),
                   tol: float = DEFAULT_TOL, threads: int = 1) -> SolutionField:
    """Fundamental solution: :func:`solve` with delta initial data and no forcing."""
    return solve(spec.with_ic(InitialData.delta()).with_source(Source.none()), grid, quad, tol, threads)

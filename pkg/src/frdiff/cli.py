"""Command-line interface.

Subcommands::

    frdiff mlf      --alpha A --beta B [--gamma G] --z Z
    frdiff symbol   --alpha A [--theta T] --k K [K ...]
    frdiff kernel   --alpha A --beta B --rho R --a A --b B --t T
    frdiff solve    [--config PATH] [problem and grid flags]
    frdiff green    [--config PATH] [problem and grid flags]
    frdiff verify   {kernel,heat,spectral,subdiffusion,all}

Exit codes: 0 success, 1 usage or configuration error, 2 verification
failure, 3 numerical non-convergence. Numbers are printed with 17
significant digits.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import RunConfig, parse_config
from .errors import ConfigError, ConvergenceError, FrdiffError, ParameterError, RealnessError, StabilityError
from .kernel import DEFAULT_TOL, KernelParams, kernel_values
from .oracles import caputo_two_term_transform, gl_subdiffusion_solve, relaxation_transform, talbot_inverse_laplace
from .problem import Family, InitialData, Problem, TimeDerivative
from .quadrature import QuadratureConfig
from .solution import Grid, SolutionField, green_function, solve, spectral_solution, spectral_solution_t2
from .special_functions import PrabhakarParams, prabhakar
from .spectral import SpaceTerm, spectral_coefficient

log = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3
THREADS_ENV = "FRDIFF_THREADS"
_CHECK_WAVENUMBERS = (0.0, 0.5, 1.0, 2.0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; this tool reserves 2 for verification."""

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def fmt(value) -> str:
    """17 significant digits; complex values as ``re+imj``."""
    if isinstance(value, complex) or np.iscomplexobj(value):
        v = complex(value)
        return f"{v.real:.17g}{v.imag:+.17g}j"
    return f"{float(value):.17g}"


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


# ---------------------------------------------------------------------------
# scalar subcommands

def _cmd_mlf(args) -> int:
    params = PrabhakarParams(args.alpha, args.beta, args.gamma)
    value, report = prabhakar(params, args.z, args.tol, full_output=True)
    print(fmt(complex(value)))
    log.info("mlf: %s", report.summary())
    return EXIT_OK


def _cmd_symbol(args) -> int:
    terms = [SpaceTerm(args.eta, args.alpha, args.theta)]
    values = np.atleast_1d(spectral_coefficient(args.omega, terms, np.asarray(args.k, dtype=float)))
    print("k,b")
    for k, b in zip(args.k, values):
        print(f"{fmt(k)},{fmt(complex(b))}")
    return EXIT_OK


def _cmd_kernel(args) -> int:
    p = KernelParams(args.alpha, args.beta, args.rho, args.a, args.b, args.t)
    values, report = kernel_values(p.alpha, p.beta, p.rho, p.a, np.array([p.b]), p.t, args.tol)
    value = complex(values[0])
    print(fmt(value.real) if value.imag == 0 else fmt(value))
    print(f"# terms_used={report.terms_used} tail_estimate={report.tail_estimate:.3e} "
          f"degraded={str(report.degraded).lower()}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve / green

_FLAG_KEYS = {
    "problem": ("gamma1", "gamma2", "delta1", "delta2", "a", "omega", "space_terms", "ic", "source", "family"),
    "grid": ("x_min", "x_max", "nx", "t"),
    "quadrature": ("k_max", "tail_tol"),
}


def _overrides(args) -> list:
    """(section, key, value) for every explicit flag."""
    out = []
    for section, keys in _FLAG_KEYS.items():
        out += [(section, key, str(getattr(args, key))) for key in keys if getattr(args, key, None) is not None]
    if args.tol is not None:
        out.append(("quadrature", "tol", repr(args.tol)))
    if args.out is not None:
        out.append(("output", "path", args.out))
    if args.svg is not None:
        out.append(("output", "svg", args.svg))
    return out


def _merge(text: str, overrides: list) -> str:
    """Config text with ``overrides`` applied; syntax errors refer to ``text``."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"syntax error: {exc.message.splitlines()[0]}", line=getattr(exc, "lineno", None)) from None
    for section, key, value in overrides:
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value)
    lines = []
    for section in parser.sections():
        lines.append(f"[{section}]")
        lines += [f"{k} = {v}" for k, v in parser.items(section)]
    return "\n".join(lines) + "\n"


def _load_config(args) -> RunConfig:
    """Config file plus flag overrides. Without overrides, line numbers refer to the file."""
    text = ""
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from None
    overrides = _overrides(args)
    return parse_config(_merge(text, overrides) if overrides else text)


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get(THREADS_ENV)
    if env is None:
        return 1
    try:
        n = int(env)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
    return n


def spectral_check(spec: Problem, t: float, tol: float = DEFAULT_TOL) -> dict:
    """Compare the assembled initial-data spectrum with an independent value.

    The reference is ``h1(k) exp(-b t)`` when the problem reduces to a
    first-order relaxation (``gamma1 = 1``, ``a = 0``), otherwise a Talbot
    inversion of the Laplace-domain solution.
    """
    ks = np.array(_CHECK_WAVENUMBERS)
    computed = np.atleast_1d(spectral_solution(spec, ks, t, tol))
    b = np.atleast_1d(spectral_coefficient(spec.omega, spec.space_terms, ks))
    ic = spec.ic
    if spec.time1.gamma == 1 and spec.a == 0:
        reference = np.asarray(ic.h1(ks), dtype=complex) * np.exp(-b * t)
        kind = "closed_form"
    else:
        kind = "talbot"
        reference = np.empty(ks.size, complex)
        g1, g2, d1, d2 = spec.time1.gamma, spec.time2.gamma, spec.time1.delta, spec.time2.delta
        for i, k in enumerate(ks):
            def data(name):
                f = ic.slot(name)
                return 0.0 if f is None else complex(np.asarray(f(np.array([k])))[0])
            if spec.family is Family.DIFFUSION_WAVE:
                tr = caputo_two_term_transform(g1, g2, d1, d2, spec.a, complex(b[i]),
                                               data("f1"), data("g1"), data("f2"), data("g2"))
            else:
                tr = caputo_two_term_transform(g1, g2, d1, d2, spec.a, complex(b[i]),
                                               data("h1"), f2=data("h2"), family="subdiffusion")
            reference[i] = talbot_inverse_laplace(tr, t, nodes=64)
    diff = np.abs(computed - reference)
    scale = np.maximum(np.abs(reference), 1.0)
    return {"reference": kind, "t": t, "k": list(_CHECK_WAVENUMBERS),
            "max_abs_diff": float(diff.max()), "max_scaled_diff": float((diff / scale).max())}


def write_csv(stream, cfg: RunConfig, field: SolutionField, check: dict, command: str) -> None:
    """CSV with ``#`` metadata: resolved config, truncation summary, spectral check."""
    stream.write(f"# frdiff {__version__} {command}\n")
    for line in cfg.to_text().splitlines():
        stream.write(f"# {line}\n" if line else "#\n")
    r = field.report
    stream.write(f"# truncation: terms_used={r.terms_used} tail_estimate={r.tail_estimate:.17g} "
                 f"panels={r.panels} degraded={str(r.degraded).lower()}\n")
    stream.write(f"# imag_residual: {field.imag_residual:.17g}\n")
    stream.write(f"# spectral_check: reference={check['reference']} t={check['t']:.17g} "
                 f"k={';'.join(fmt(k) for k in check['k'])} max_abs_diff={check['max_abs_diff']:.17g}\n")
    stream.write(f"# corollary_tags: {','.join(field.tags.names())}\n")
    stream.write("x,t,N\n")
    for x, t, n in field.rows():
        stream.write(f"{fmt(x)},{fmt(t)},{fmt(n)}\n")


def write_svg(path: str, field: SolutionField, width: int = 640, height: int = 400) -> None:
    """Self-contained SVG with one polyline per time level."""
    xs = np.asarray(field.x_grid)
    vals = np.asarray(field.values)
    lo, hi = float(vals.min()), float(vals.max())
    if hi == lo:
        hi = lo + 1.0
    x0, x1 = float(xs.min()), float(xs.max())
    if x1 == x0:
        x1 = x0 + 1.0
    pad = 40
    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")

    def px(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def py(v):
        return height - pad - (v - lo) / (hi - lo) * (height - 2 * pad)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
             f'<text x="{pad}" y="{height - 12}" font-size="12">x from {x0:.6g} to {x1:.6g}</text>',
             f'<text x="{pad}" y="{pad - 12}" font-size="12">N from {lo:.6g} to {hi:.6g}</text>']
    for i, t in enumerate(field.t_grid):
        pts = " ".join(f"{px(x):.2f},{py(v):.2f}" for x, v in zip(xs, vals[i]))
        color = colors[i % len(colors)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        parts.append(f'<text x="{width - pad - 80}" y="{pad + 16 * (i + 1)}" font-size="12" '
                     f'fill="{color}">t = {t:.6g}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def _cmd_field(args, green: bool) -> int:
    cfg = _load_config(args)
    spec = cfg.to_problem()
    grid = cfg.to_grid()
    runner = green_function if green else solve
    field = runner(spec, grid, cfg.quadrature, cfg.tol, _threads(args))
    checked = spec.with_ic(InitialData.delta()) if green else spec
    check = spectral_check(checked, grid.t[0], cfg.tol)
    command = "green" if green else "solve"
    if cfg.output.path == "-":
        write_csv(sys.stdout, cfg, field, check, command)
    else:
        with open(cfg.output.path, "w", encoding="utf-8", newline="\n") as fh:
            write_csv(fh, cfg, field, check, command)
    if cfg.output.svg:
        write_svg(cfg.output.svg, field)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify

def _verify_kernel(tol):
    battery = [
        (1.5, 0.5, 1.0, 0.0, 2.0, 1.0),
        (1.8, 0.9, 1.0, 0.5, 1.0, 1.0),
        (1.8, 1.2, 2.0, 1.0, 3.0, 2.0),
        (0.8, 0.4, 1.0, 1.0, 0.3 + 1.2j, 1.0),
        (0.9, 0.3, 0.5, 2.0, 5.0, 0.5),
        (2.0, 1.0, 1.0, 0.5, 4.0 - 2.0j, 3.0),
    ]
    worst = 0.0
    for alpha, beta, rho, a, b, t in battery:
        v = complex(kernel_values(alpha, beta, rho, a, np.array([b]), t, tol)[0][0])
        ref = talbot_inverse_laplace(relaxation_transform(alpha, beta, rho, a, b), t, nodes=96)
        worst = max(worst, abs(v - ref) / max(abs(ref), 1e-300))
    return {"check": "kernel", "metric": "max_rel_error_vs_talbot", "value": worst, "tolerance": 1e-6}


def _verify_heat(tol):
    spec = Problem(TimeDerivative(1.0), TimeDerivative(0.5), [SpaceTerm(1.0, 2.0)])
    grid = Grid.uniform(-5.0, 5.0, 101, (1.0,))
    field = solve(spec, grid, QuadratureConfig(), tol)
    x = np.asarray(grid.x)
    exact = np.exp(-x * x / 4.0) / math.sqrt(4.0 * math.pi)
    return {"check": "heat", "metric": "max_abs_error_vs_gaussian",
            "value": float(np.max(np.abs(field.values[0] - exact))), "tolerance": 1e-6}


def _verify_spectral(tol):
    a1, a2 = 1.5, 1.9
    spec = Problem(TimeDerivative(1.0), TimeDerivative(0.5), [SpaceTerm(1.0, a1), SpaceTerm(1.0, a2)])
    ks = np.linspace(-40.0, 40.0, 801)
    worst = 0.0
    for t in (0.5, 1.0, 2.0):
        got = spectral_solution_t2(spec, ks, t, tol)
        exact = np.exp(-t * (np.abs(ks) ** a1 + np.abs(ks) ** a2))
        worst = max(worst, float(np.max(np.abs(got - exact))))
    return {"check": "spectral", "metric": "max_abs_error_vs_closed_form", "value": worst, "tolerance": 1e-10}


def _verify_subdiffusion(tol):
    gamma, alpha, width, t_end = 0.9, 2.0, 0.5, 1.0
    ic = InitialData.gaussian(width)
    spec = Problem(TimeDerivative(gamma), TimeDerivative(gamma / 2), [SpaceTerm(1.0, alpha)], ic=ic)
    fd = gl_subdiffusion_solve(gamma, alpha, 1.0, 0.0,
                               lambda x: np.exp(-x * x / (2 * width ** 2)) / (width * math.sqrt(2 * math.pi)),
                               (-20.0, 20.0), 801, t_end, 1000, scheme="implicit")
    interior = np.abs(fd.x) <= 3.0
    xs = fd.x[interior]
    field = solve(spec, Grid(tuple(xs), (t_end,)), QuadratureConfig(), tol)
    got, ref = field.values[0], fd.final()[interior]
    return {"check": "subdiffusion", "metric": "max_rel_error_vs_grunwald_letnikov",
            "value": float(np.max(np.abs(got - ref) / np.abs(ref))), "tolerance": 1e-2}


_SUITES = {"kernel": _verify_kernel, "heat": _verify_heat, "spectral": _verify_spectral,
           "subdiffusion": _verify_subdiffusion}


def _cmd_verify(args) -> int:
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    failed = False
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    for name in names:
        result = _SUITES[name](tol)
        result["status"] = "pass" if result["value"] <= result["tolerance"] else "fail"
        failed |= result["status"] == "fail"
        print(json.dumps({**result, "value": float(fmt(result["value"]))}, sort_keys=True))
    return EXIT_VERIFY if failed else EXIT_OK


# ---------------------------------------------------------------------------

def _field_flags(p):
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--out", help="CSV output path ('-' for stdout)")
    p.add_argument("--svg", help="also write an SVG line plot to this path")
    p.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or 1)")
    p.add_argument("--tol", type=float, help="kernel relative tolerance")
    g = p.add_argument_group("problem (override the config file)")
    for name in ("gamma1", "gamma2", "delta1", "delta2", "a", "omega"):
        g.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    g.add_argument("--space-terms", dest="space_terms", help="eta:alpha:theta[, ...]")
    g.add_argument("--ic", help="delta | gaussian:WIDTH | box:HALF_WIDTH")
    g.add_argument("--source", help="none | gaussian:AMPLITUDE:WIDTH")
    g.add_argument("--family", choices=("diffusion_wave", "subdiffusion"))
    g = p.add_argument_group("grid and quadrature")
    g.add_argument("--x-min", dest="x_min", type=float)
    g.add_argument("--x-max", dest="x_max", type=float)
    g.add_argument("--nx", type=int)
    g.add_argument("--t", help="comma-separated times")
    g.add_argument("--k-max", dest="k_max", type=float)
    g.add_argument("--tail-tol", dest="tail_tol", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="frdiff", description="Space-time fractional diffusion: special functions, "
                                                "relaxation kernels and solution fields.")
    parser.add_argument("--version", action="version", version=f"frdiff {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log to stderr (-vv for debug)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mlf", help="three-parameter Mittag-Leffler function E^gamma_{alpha,beta}(z)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--z", type=_complex, required=True, help="argument, e.g. -2.5 or 1+2j")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=_cmd_mlf)

    p = sub.add_parser("symbol", help="spectral coefficient omega + eta psi(k) of one space term")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--k", type=float, nargs="+", required=True)
    p.set_defaults(func=_cmd_symbol)

    p = sub.add_parser("kernel", help="relaxation kernel with Laplace transform s^(rho-1)/(s^alpha + a s^beta + b)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=_complex, default=0j)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("solve", help="solution field N(x, t) as CSV")
    _field_flags(p)
    p.set_defaults(func=lambda a: _cmd_field(a, green=False))

    p = sub.add_parser("green", help="fundamental solution (delta initial data, no source) as CSV")
    _field_flags(p)
    p.set_defaults(func=lambda a: _cmd_field(a, green=True))

    p = sub.add_parser("verify", help="run an oracle suite; one JSON line per check")
    p.add_argument("suite", choices=(*_SUITES, "all"))
    p.add_argument("--tol", type=float)
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, ConfigError, ParameterError) as exc:
        print(f"frdiff: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, RealnessError, StabilityError, ArithmeticError) as exc:
        print(f"frdiff: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FrdiffError as exc:
        print(f"frdiff: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

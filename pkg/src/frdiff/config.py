"""Run configuration: INI parsing, validation and canonical serialisation.

Sections and keys (all lowercase)::

    [problem]     gamma1, gamma2, delta1, delta2, a, omega, space_terms, ic,
                  source, family
    [grid]        x_min, x_max, nx, t
    [quadrature]  k_max, panels, nodes_per_panel, tail_tol, grading_exponent,
                  realness_tol, tol
    [output]      path, format, svg

``space_terms`` is a comma-separated list of ``eta:alpha:theta`` triples,
``t`` a comma-separated list of times, ``ic`` one of ``delta``,
``gaussian:WIDTH``, ``box:HALF_WIDTH`` and ``source`` one of ``none``,
``gaussian:AMPLITUDE:WIDTH``. :meth:`RunConfig.to_text` writes every value
back with ``repr``, so parsing its output reproduces the configuration
exactly.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, fields
from typing import Optional

from .errors import ConfigError, FrdiffError
from .kernel import DEFAULT_TOL
from .problem import Family, InitialData, Problem, Source, TimeDerivative
from .quadrature import QuadratureConfig
from .solution import Grid
from .spectral import SpaceTerm

_KEY_LINE = re.compile(r"^\s*([^=:\s\[#;][^=:]*?)\s*[=:]")
_SECTION_LINE = re.compile(r"^\s*\[([^\]]*)\]")
_FAMILIES = {"diffusion_wave": Family.DIFFUSION_WAVE, "subdiffusion": Family.SUBDIFFUSION}


@dataclass(frozen=True)
class ProblemConfig:
    gamma1: float
    gamma2: float
    space_terms: tuple
    delta1: float = 1.0
    delta2: float = 1.0
    a: float = 0.0
    omega: float = 0.0
    ic: str = "delta"
    source: str = "none"
    family: Optional[str] = None


@dataclass(frozen=True)
class GridConfig:
    x_min: float = -5.0
    x_max: float = 5.0
    nx: int = 101
    t: tuple = (1.0,)


@dataclass(frozen=True)
class OutputConfig:
    path: str = "-"
    format: str = "csv"
    svg: Optional[str] = None


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration of one run."""

    problem: ProblemConfig
    grid: GridConfig = field(default_factory=GridConfig)
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    tol: float = DEFAULT_TOL
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_problem(self) -> Problem:
        return build_problem(self.problem)

    def to_grid(self) -> Grid:
        return Grid.uniform(self.grid.x_min, self.grid.x_max, self.grid.nx, self.grid.t)

    def to_text(self) -> str:
        """Canonical INI text; ``parse_config(cfg.to_text()) == cfg``."""
        p = self.problem
        terms = ", ".join(f"{e!r}:{a!r}:{t!r}" for e, a, t in p.space_terms)
        lines = ["[problem]",
                 f"gamma1 = {p.gamma1!r}", f"gamma2 = {p.gamma2!r}",
                 f"delta1 = {p.delta1!r}", f"delta2 = {p.delta2!r}",
                 f"a = {p.a!r}", f"omega = {p.omega!r}",
                 f"space_terms = {terms}", f"ic = {p.ic}", f"source = {p.source}"]
        if p.family is not None:
            lines.append(f"family = {p.family}")
        g = self.grid
        lines += ["", "[grid]", f"x_min = {g.x_min!r}", f"x_max = {g.x_max!r}", f"nx = {g.nx!r}",
                  "t = " + ", ".join(repr(v) for v in g.t)]
        lines += ["", "[quadrature]"]
        lines += [f"{f.name} = {getattr(self.quadrature, f.name)!r}" for f in fields(QuadratureConfig)]
        lines.append(f"tol = {self.tol!r}")
        o = self.output
        lines += ["", "[output]", f"path = {o.path}", f"format = {o.format}"]
        if o.svg is not None:
            lines.append(f"svg = {o.svg}")
        return "\n".join(lines) + "\n"


_SCHEMA = {
    "problem": {"gamma1", "gamma2", "delta1", "delta2", "a", "omega", "space_terms", "ic", "source", "family"},
    "grid": {"x_min", "x_max", "nx", "t"},
    "quadrature": {f.name for f in fields(QuadratureConfig)} | {"tol"},
    "output": {"path", "format", "svg"},
}
_REQUIRED = {"problem": ("gamma1", "gamma2", "space_terms")}


def _key_lines(text: str) -> dict:
    """Map (section, key) to the 1-based line where the key is set."""
    where, section = {}, None
    for number, line in enumerate(text.splitlines(), start=1):
        m = _SECTION_LINE.match(line)
        if m:
            section = m.group(1).strip()
            where[(section, None)] = number
            continue
        m = _KEY_LINE.match(line)
        if m and section is not None:
            where[(section, m.group(1).strip())] = number
    return where


def parse_ic(spec: str) -> InitialData:
    kind, *args = [s.strip() for s in spec.split(":")]
    if kind == "delta" and not args:
        return InitialData.delta()
    if kind == "gaussian" and len(args) == 1:
        return InitialData.gaussian(float(args[0]))
    if kind == "box" and len(args) == 1:
        return InitialData.box(float(args[0]))
    raise ValueError(f"unknown initial data {spec!r}; use delta, gaussian:WIDTH or box:HALF_WIDTH")


def parse_source(spec: str) -> Source:
    kind, *args = [s.strip() for s in spec.split(":")]
    if kind == "none" and not args:
        return Source.none()
    if kind == "gaussian" and len(args) == 2:
        return Source.gaussian(float(args[0]), float(args[1]))
    raise ValueError(f"unknown source {spec!r}; use none or gaussian:AMPLITUDE:WIDTH")


def build_problem(p: ProblemConfig) -> Problem:
    return Problem(
        TimeDerivative(p.gamma1, p.delta1), TimeDerivative(p.gamma2, p.delta2),
        [SpaceTerm(*t) for t in p.space_terms], a=p.a, omega=p.omega,
        ic=parse_ic(p.ic), source=parse_source(p.source),
        family=None if p.family is None else _FAMILIES[p.family])


def _float(value: str) -> float:
    v = float(value)
    if not math.isfinite(v):
        raise ValueError(f"{value!r} is not finite")
    return v


def _int(value: str) -> int:
    return int(value)


def _float_list(value: str) -> tuple:
    items = [s.strip() for s in value.split(",") if s.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(_float(s) for s in items)


def _triples(value: str) -> tuple:
    out = []
    for item in (s.strip() for s in value.split(",")):
        parts = item.split(":")
        if len(parts) != 3:
            raise ValueError(f"space term {item!r} is not eta:alpha:theta")
        out.append(tuple(_float(s) for s in parts))
    return tuple(out)


def _family(value: str) -> str:
    if value not in _FAMILIES:
        raise ValueError(f"family must be one of {sorted(_FAMILIES)}")
    return value


_CONVERTERS = {
    "gamma1": _float, "gamma2": _float, "delta1": _float, "delta2": _float, "a": _float, "omega": _float,
    "space_terms": _triples, "ic": str, "source": str, "family": _family,
    "x_min": _float, "x_max": _float, "nx": _int, "t": _float_list,
    "k_max": _float, "panels": _int, "nodes_per_panel": _int, "tail_tol": _float,
    "grading_exponent": _float, "realness_tol": _float, "tol": _float,
    "path": str, "format": str, "svg": str,
}


_BLAME = (
    ("source", "source"), ("initial data", "ic"), ("gaussian width", "ic"), ("box half-width", "ic"),
    ("gamma1 > gamma2", "gamma1"), ("different ranges", "gamma2"), ("family", "family"),
    ("time order", "gamma1"), ("delta", "delta1"), ("skewness", "space_terms"), ("theta", "space_terms"),
    ("space order", "space_terms"), ("eta", "space_terms"), ("space term", "space_terms"),
    ("omega", "omega"), ("coupling", "a"),
)


def _blame(message: str) -> str:
    """The [problem] key a validation message is about."""
    return next((key for needle, key in _BLAME if needle in message), "gamma1")


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text.

    Raises
    ------
    ConfigError
        Syntax errors (with line number), unknown or missing keys, values
        that do not parse, and violated constraints, naming the key and line.

    Examples
    --------
    >>> cfg = parse_config("[problem]\\ngamma1 = 1\\ngamma2 = 0.5\\nspace_terms = 1:2:0\\n")
    >>> cfg.grid.nx, cfg.problem.ic
    (101, 'delta')
    """
    parser = configparser.ConfigParser(interpolation=None, strict=True, empty_lines_in_values=False)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("content before the first [section] header", line=exc.lineno) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError("duplicate key", key=exc.option, line=exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]", line=exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("syntax error", line=lineno) from None
    lines = _key_lines(text)

    values = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", line=lines.get((section, None)))
        for key, raw in parser.items(section):
            line = lines.get((section, key))
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key in [{section}]", key=key, line=line)
            try:
                values[key] = _CONVERTERS[key](raw.strip())
            except ValueError as exc:
                raise ConfigError(f"bad value {raw.strip()!r}: {exc}", key=key, line=line) from None
    for section, keys in _REQUIRED.items():
        for key in keys:
            if key not in values:
                raise ConfigError(f"missing required key in [{section}]", key=key, line=lines.get((section, None)))

    def pick(cls, names):
        return {n: values[n] for n in names if n in values}

    problem_cfg = ProblemConfig(**pick(ProblemConfig, [f.name for f in fields(ProblemConfig)]))
    grid_cfg = GridConfig(**pick(GridConfig, [f.name for f in fields(GridConfig)]))
    output_cfg = OutputConfig(**pick(OutputConfig, [f.name for f in fields(OutputConfig)]))
    if output_cfg.format not in ("csv",):
        raise ConfigError("format must be csv", key="format", line=lines.get(("output", "format")))

    try:
        quad = QuadratureConfig(**pick(QuadratureConfig, [f.name for f in fields(QuadratureConfig)]))
    except FrdiffError as exc:
        key = next((f.name for f in fields(QuadratureConfig) if f.name in str(exc)), None)
        raise ConfigError(str(exc), key=key, line=lines.get(("quadrature", key))) from None
    tol = values.get("tol", DEFAULT_TOL)
    if not tol > 0:
        raise ConfigError("tol must be > 0", key="tol", line=lines.get(("quadrature", "tol")))

    cfg = RunConfig(problem_cfg, grid_cfg, quad, tol, output_cfg)
    try:
        cfg.to_problem()
    except (FrdiffError, ValueError) as exc:
        key = _blame(str(exc))
        raise ConfigError(str(exc), key=key, line=lines.get(("problem", key))) from None
    try:
        cfg.to_grid()
    except FrdiffError as exc:
        key = next((k for k in ("nx", "x_max", "x_min", "t") if k in str(exc)), "t")
        raise ConfigError(str(exc), key=key, line=lines.get(("grid", key))) from None
    return cfg

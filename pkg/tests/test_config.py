import pytest
from hypothesis import given, strategies as st

from frdiff.config import parse_config
from frdiff.errors import ConfigError
from frdiff.problem import Family

MINIMAL = "[problem]\ngamma1 = 1\ngamma2 = 0.5\nspace_terms = 1:2:0\n"

FULL = """\
[problem]
gamma1 = 1.8
gamma2 = 1.2
delta1 = 0.5
delta2 = 1
a = 0.5
omega = 0.1
space_terms = 1:1.5:0.2, 0.5:1.9:0
ic = gaussian:0.5
source = gaussian:1:0.3
family = diffusion_wave

[grid]
x_min = -3
x_max = 3
nx = 7
t = 0.5, 1

[quadrature]
k_max = 60
tail_tol = 1e-6
tol = 1e-12

[output]
path = out.csv
svg = out.svg
"""


def test_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.grid.nx == 101 and cfg.grid.t == (1.0,)
    assert cfg.problem.delta1 == 1.0 and cfg.output.path == "-"
    assert cfg.to_problem().family is Family.SUBDIFFUSION


def test_full_file():
    cfg = parse_config(FULL)
    p = cfg.to_problem()
    assert len(p.space_terms) == 2 and p.space_terms[0].theta == 0.2
    assert cfg.quadrature.k_max == 60 and cfg.tol == 1e-12
    assert cfg.to_grid().x == (-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0)
    assert cfg.output.svg == "out.svg"
    assert p.source.present and p.source.steady


def test_round_trip():
    cfg = parse_config(FULL)
    assert parse_config(cfg.to_text()) == cfg
    assert parse_config(cfg.to_text()).to_text() == cfg.to_text()


@pytest.mark.parametrize("text,key,line", [
    (MINIMAL + "bogus = 1\n", "bogus", 5),
    (MINIMAL.replace("gamma2 = 0.5", "gamma2 = abc"), "gamma2", 3),
    (MINIMAL.replace("gamma2 = 0.5", "gamma2 = 1.5"), "gamma1", 2),
    (MINIMAL.replace("gamma2 = 0.5", "gamma2 = 1.2") .replace("gamma1 = 1", "gamma1 = 1.5")
     .replace("space_terms = 1:2:0", "space_terms = 1:1.9:0.5"), "space_terms", 4),
    (MINIMAL + "ic = square\n", "ic", 5),
    (MINIMAL + "omega = -1\n", "omega", 5),
    (MINIMAL + "[grid]\nnx = 0\n", "nx", 6),
    (MINIMAL + "[quadrature]\nk_max = -1\n", "k_max", 6),
    (MINIMAL + "[quadrature]\ntol = 0\n", "tol", 6),
    (MINIMAL.replace("space_terms = 1:2:0\n", ""), "space_terms", 1),
])
def test_errors_name_key_and_line(text, key, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key
    assert info.value.line == line
    assert f"key '{key}'" in str(info.value) and f"line {line}" in str(info.value)


def test_syntax_error_line():
    with pytest.raises(ConfigError) as info:
        parse_config("[problem]\ngamma1 = 1\nthis is not ini\n")
    assert info.value.line == 3


def test_unknown_section():
    with pytest.raises(ConfigError, match=r"\[solver\]"):
        parse_config(MINIMAL + "[solver]\nx = 1\n")


def test_duplicate_key():
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL + "gamma1 = 0.9\n")
    assert info.value.key == "gamma1"


def test_content_before_section():
    with pytest.raises(ConfigError):
        parse_config("gamma1 = 1\n" + MINIMAL)


@given(st.floats(0.05, 1.0), st.floats(0.01, 0.99), st.floats(0, 5), st.floats(0, 5),
       st.lists(st.floats(0.01, 10), min_size=1, max_size=4))
def test_round_trip_is_exact(g1, ratio, a, omega, times):
    text = (f"[problem]\ngamma1 = {g1!r}\ngamma2 = {g1 * ratio!r}\na = {a!r}\nomega = {omega!r}\n"
            f"space_terms = 1:2:0\n[grid]\nt = {', '.join(map(repr, times))}\n")
    cfg = parse_config(text)
    assert parse_config(cfg.to_text()) == cfg

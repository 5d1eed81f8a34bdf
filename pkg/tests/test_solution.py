import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frdiff.errors import FamilyError, ParameterError, RealnessError
from frdiff.oracles import caputo_two_term_transform, talbot_inverse_laplace
from frdiff.problem import InitialData, Problem, Source, TimeDerivative
from frdiff.solution import (CorollaryTag, Grid, green_function, solve, source_convolution, specialize,
                             spectral_solution, spectral_solution_t1, spectral_solution_t2,
                             spectral_solution_t3)
from frdiff.spectral import SpaceTerm, spectral_coefficient
from frdiff.special_functions import mittag_leffler_one

# Subdiffusion, orders 0.8 / 0.4 (Caputo), a = 1, omega = 0.3, one skewed term
# (eta 1, alpha 1.6, theta 0.2), h1 = h2 = 1, at k = 1.5, t = 1: Talbot
# inversion of the Laplace-domain solution, 64 and 128 nodes agreeing to 1e-10.
SUBDIFFUSION_REFERENCE = 0.374948073763624 - 0.07705778791830635j
# 1 - E_0.8(-1), extended-precision series
ONE_MINUS_E08 = 0.6130514213810232


def subdiffusion_problem(**kw):
    args = dict(time1=TimeDerivative(0.8), time2=TimeDerivative(0.4), space_terms=[SpaceTerm(1.0, 1.6, 0.2)],
                a=1.0, omega=0.3)
    return Problem(**(args | kw))


def wave_problem(terms=None, **kw):
    args = dict(time1=TimeDerivative(1.8, 0.6), time2=TimeDerivative(1.3, 0.3),
                space_terms=terms or [SpaceTerm(1.0, 1.5)], a=0.7, omega=0.2,
                ic=InitialData(f1=lambda k: np.exp(-k * k) + 0j, g1=lambda k: 0.5 * np.exp(-k * k) + 0j,
                               f2=lambda k: np.exp(-2 * k * k) + 0j, g2=lambda k: 0.1 + 0 * k + 0j))
    return Problem(**(args | kw))


class TestSpectral:
    def test_subdiffusion_reference(self):
        v = spectral_solution_t2(subdiffusion_problem(), 1.5, 1.0)
        assert abs(v - SUBDIFFUSION_REFERENCE) <= 1e-10

    def test_first_order_relaxation(self):
        p = Problem(TimeDerivative(1.0), TimeDerivative(0.5), [SpaceTerm(1.0, 2.0)], omega=0.5)
        k = np.array([0.0, 0.5, 2.0])
        assert np.allclose(spectral_solution_t2(p, k, 1.3), np.exp(-(0.5 + k * k) * 1.3), rtol=1e-13, atol=0)

    def test_single_order_wave(self):
        # a = 0, Caputo, f1 = 1: E_g(-b t^g)
        p = Problem(TimeDerivative(1.6), TimeDerivative(1.2), [SpaceTerm(1.0, 2.0)])
        v = spectral_solution_t1(p, 1.2, 0.9)
        assert abs(v - mittag_leffler_one(1.6, -1.44 * 0.9 ** 1.6)) <= 1e-13

    @pytest.mark.parametrize("t", [0.3, 1.0, 2.5])
    def test_hilfer_wave_against_talbot(self, t):
        p = wave_problem()
        k = 0.8
        b = complex(spectral_coefficient(p.omega, p.space_terms, k))
        ic = p.ic
        # Hilfer initial data enter through s^(delta (gamma - 2)); same transform as the Caputo oracle
        tr = caputo_two_term_transform(1.8, 1.3, 0.6, 0.3, 0.7, b, complex(ic.f1(np.array([k]))[0]),
                                       complex(ic.g1(np.array([k]))[0]), complex(ic.f2(np.array([k]))[0]),
                                       complex(ic.g2(np.array([k]))[0]))
        ref = talbot_inverse_laplace(tr, t, nodes=96)
        assert abs(spectral_solution_t1(p, k, t) - ref) <= 1e-9 * max(1, abs(ref))

    def test_t3_is_t1_for_one_term(self):
        p = wave_problem()
        k = np.linspace(-6, 6, 25)
        assert np.array_equal(spectral_solution_t1(p, k, 1.1), spectral_solution_t3(p, k, 1.1))

    def test_t3_multi_term_against_talbot(self):
        terms = [SpaceTerm(1.0, 1.5, 0.3), SpaceTerm(0.5, 1.9)]
        p = wave_problem(terms, ic=InitialData.delta(), time1=TimeDerivative(1.8), time2=TimeDerivative(1.3))
        k = 1.1
        b = complex(spectral_coefficient(p.omega, terms, k))
        ref = talbot_inverse_laplace(caputo_two_term_transform(1.8, 1.3, 1, 1, 0.7, b, 1.0, 0.0, 1.0, 0.0), 1.0)
        assert abs(spectral_solution_t3(p, k, 1.0) - ref) <= 1e-10

    def test_t1_rejects_many_terms(self):
        p = wave_problem([SpaceTerm(1.0, 1.5), SpaceTerm(1.0, 1.9)])
        with pytest.raises(ParameterError):
            spectral_solution_t1(p, 1.0, 1.0)

    def test_family_mismatch(self):
        with pytest.raises(FamilyError):
            spectral_solution_t2(wave_problem(), 1.0, 1.0)
        with pytest.raises(FamilyError):
            spectral_solution_t1(subdiffusion_problem(), 1.0, 1.0)

    def test_mixed_orders_rejected(self):
        with pytest.raises(FamilyError):
            Problem(TimeDerivative(1.5), TimeDerivative(0.7), [SpaceTerm(1.0, 2.0)])

    def test_time_must_be_positive(self):
        with pytest.raises(ParameterError):
            spectral_solution(subdiffusion_problem(), 1.0, 0.0)

    def test_hermitian_in_k(self):
        p = subdiffusion_problem()
        k = np.linspace(0.1, 5, 12)
        assert np.array_equal(spectral_solution(p, -k, 1.0), np.conj(spectral_solution(p, k, 1.0)))


class TestSpecialize:
    def test_tags(self):
        p = subdiffusion_problem()
        assert specialize(p) == CorollaryTag.CAPUTO | CorollaryTag.RIESZ_FELLER
        assert specialize(wave_problem()) & CorollaryTag.HILFER

    def test_riemann_liouville_reaction_free_single_order(self):
        p = Problem(TimeDerivative(0.7, 0.0), TimeDerivative(0.3, 0.0), [SpaceTerm(1, 2), SpaceTerm(1, 1.5)])
        assert specialize(p).names() == ["riemann_liouville", "riesz", "reaction_free", "multi_term",
                                         "single_order"]


class TestSourceConvolution:
    def test_absent_source_is_zero(self):
        assert source_convolution(subdiffusion_problem(), 1.0, 1.0) == 0

    def test_power_law_at_zero_coefficient(self):
        p = Problem(TimeDerivative(0.8), TimeDerivative(0.4), [SpaceTerm(1.0, 2.0)],
                    source=Source(lambda k, s: np.ones_like(k) + 0j))
        v = source_convolution(p, 0.0, 2.0, method="quadrature")
        assert abs(v - 2 ** 0.8 / math.gamma(1.8)) <= 1e-10

    @pytest.mark.parametrize("method", ["auto", "quadrature"])
    def test_relaxation_integral(self, method):
        # b = 1: int_0^1 xi^-0.2 E_{0.8,0.8}(-xi^0.8) dxi = 1 - E_0.8(-1)
        p = Problem(TimeDerivative(0.8), TimeDerivative(0.4), [SpaceTerm(1.0, 2.0)],
                    source=Source(lambda k, s: np.ones_like(k) + 0j, steady=method == "auto"))
        assert abs(source_convolution(p, 1.0, 1.0, method=method) - ONE_MINUS_E08) <= 1e-10

    def test_steady_closed_form_matches_quadrature(self):
        p = subdiffusion_problem(source=Source.gaussian(2.0, 0.5))
        k = np.array([0.0, 0.7, 2.0])
        fast = source_convolution(p, k, 1.5)
        slow = source_convolution(p, k, 1.5, method="quadrature")
        assert np.max(np.abs(fast - slow)) <= 1e-9

    def test_time_dependent_source(self):
        # U = s (linear ramp), b = 0, a = 0, gamma1 = 1: int_0^t (t - xi) dxi = t^2/2
        p = Problem(TimeDerivative(1.0), TimeDerivative(0.5), [SpaceTerm(1.0, 2.0)],
                    source=Source(lambda k, s: s * np.ones_like(k) + 0j))
        assert abs(source_convolution(p, 0.0, 1.4) - 0.98) <= 1e-10

    def test_unknown_method(self):
        with pytest.raises(ParameterError):
            source_convolution(subdiffusion_problem(), 1.0, 1.0, method="fast")


class TestSolve:
    def test_heat_kernel(self):
        p = Problem(TimeDerivative(1.0), TimeDerivative(0.5), [SpaceTerm(1.0, 2.0)])
        x = np.array([0.0, 1.0, 3.0])
        f = solve(p, Grid(tuple(x), (1.0,)))
        exact = np.exp(-x * x / 4) / math.sqrt(4 * math.pi)
        assert np.max(np.abs(f.values[0] - exact)) <= 1e-10
        assert f.tags & CorollaryTag.CAPUTO

    def test_reaction_scales_heat_kernel(self):
        p = Problem(TimeDerivative(1.0), TimeDerivative(0.5), [SpaceTerm(1.0, 2.0)], omega=0.4,
                    ic=InitialData.gaussian(1.0))
        f = solve(p, Grid((0.0, 1.5), (2.0,)))
        var = 1.0 + 2 * 2.0
        exact = math.exp(-0.8) * np.exp(-np.array([0.0, 1.5]) ** 2 / (2 * var)) / math.sqrt(2 * math.pi * var)
        assert np.max(np.abs(f.values[0] - exact)) <= 1e-10

    def test_green_ignores_ic_and_source(self):
        p = Problem(TimeDerivative(1.0), TimeDerivative(0.5), [SpaceTerm(1.0, 2.0)],
                    ic=InitialData.gaussian(2.0), source=Source.gaussian(1.0, 1.0))
        g = green_function(p, Grid((0.0,), (1.0,)))
        assert abs(g.values[0, 0] - 1 / math.sqrt(4 * math.pi)) <= 1e-10

    def test_linearity_in_initial_data(self):
        p = subdiffusion_problem(space_terms=[SpaceTerm(1.0, 1.6)], ic=InitialData.gaussian(0.7))
        grid = Grid((-1.0, 0.0, 2.0), (0.5,))
        one = solve(p, grid).values
        three = solve(p.with_ic(p.ic.scaled(3.0)), grid).values
        assert np.max(np.abs(three - 3 * one)) <= 1e-13

    def test_threads_do_not_change_output(self):
        p = subdiffusion_problem(time1=TimeDerivative(1.0), time2=TimeDerivative(0.5), a=0.5,
                                 space_terms=[SpaceTerm(1.0, 1.8)], ic=InitialData.gaussian(0.5))
        grid = Grid((-1.0, 0.5), (0.5, 1.0, 2.0))
        assert np.array_equal(solve(p, grid).values, solve(p, grid, threads=3).values)

    def test_skewed_solution_is_not_symmetric(self):
        p = subdiffusion_problem(ic=InitialData.gaussian(0.5))
        f = solve(p, Grid((-1.0, 1.0), (1.0,)))
        assert abs(f.values[0, 0] - f.values[0, 1]) > 1e-4
        assert f.imag_residual <= 1e-8

    def test_realness_error(self):
        p = subdiffusion_problem(ic=InitialData(h1=lambda k: np.exp(-k * k) * (1 + 0.01j)))
        with pytest.raises(RealnessError):
            solve(p, Grid((0.0,), (1.0,)))

    def test_rows_time_major(self):
        p = Problem(TimeDerivative(1.0), TimeDerivative(0.5), [SpaceTerm(1.0, 2.0)])
        f = solve(p, Grid((0.0, 1.0), (0.5, 1.0)))
        assert [(x, t) for x, t, _ in f.rows()] == [(0.0, 0.5), (1.0, 0.5), (0.0, 1.0), (1.0, 1.0)]

    def test_bad_threads(self):
        p = Problem(TimeDerivative(1.0), TimeDerivative(0.5), [SpaceTerm(1.0, 2.0)])
        with pytest.raises(ParameterError):
            solve(p, Grid((0.0,), (1.0,)), threads=0)


class TestGrid:
    def test_uniform(self):
        g = Grid.uniform(-1, 1, 5, (1.0,))
        assert g.x == (-1.0, -0.5, 0.0, 0.5, 1.0)

    @pytest.mark.parametrize("args", [((), (1.0,)), ((0.0,), (0.0,)), ((math.inf,), (1.0,))])
    def test_invalid(self, args):
        with pytest.raises(ParameterError):
            Grid(*args)


@settings(max_examples=20)
@given(st.floats(0.3, 1.0), st.floats(0.1, 0.9), st.floats(0.0, 2.0), st.floats(0.0, 1.0),
       st.floats(0.05, 5.0), st.floats(-8.0, 8.0))
def test_subdiffusion_matches_talbot(g1, ratio, a, omega, t, k):
    g2 = g1 * ratio
    p = Problem(TimeDerivative(g1), TimeDerivative(g2), [SpaceTerm(1.0, 1.5, 0.3)], a=a, omega=omega)
    b = complex(spectral_coefficient(omega, p.space_terms, k))
    ref = talbot_inverse_laplace(caputo_two_term_transform(g1, g2, 1, 1, a, b, 1.0, f2=1.0,
                                                           family="subdiffusion"), t, nodes=96)
    assert abs(spectral_solution_t2(p, k, t) - ref) <= 1e-8 * max(1, abs(ref))

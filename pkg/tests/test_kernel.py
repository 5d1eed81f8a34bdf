import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frdiff.errors import ParameterError
from frdiff.kernel import KernelParams, kernel_series_term, kernel_values, two_term_kernel
from frdiff.oracles import relaxation_transform, talbot_inverse_laplace
from frdiff.special_functions import PrabhakarParams, prabhakar

# r = 2 term at (1.8, 0.9, rho=1, a=0.5, b=1, t=1): 0.25 E^3_{1.8,3.6}(-1),
# extended-precision series at 30 and 50 digits.
TERM_R2 = 0.05180928892723762
# Talbot inversion of 1/(s^1.8 + 0.5 s^0.9 + 1) at t=1, 64 and 128 nodes agreeing to 1e-10.
KERNEL_18_09 = 0.6256546798458947


def talbot(alpha, beta, rho, a, b, t, nodes=64):
    return talbot_inverse_laplace(relaxation_transform(alpha, beta, rho, a, b), t, nodes=nodes)


class TestSeriesTerm:
    def test_leading_term_at_zero_b(self):
        p = KernelParams(1.5, 0.5, 1.0, 0.7, 0.0, 2.0)
        assert kernel_series_term(0, p) == pytest.approx(2 ** 0.5 / math.gamma(1.5), rel=1e-15)

    def test_first_correction_at_zero_b(self):
        p = KernelParams(1.5, 0.5, 1.0, 1.0, 0.0, 1.0)
        assert kernel_series_term(1, p) == pytest.approx(-1 / math.gamma(2.5), rel=1e-15)

    def test_reference_term(self):
        p = KernelParams(1.8, 0.9, 1.0, 0.5, 1.0, 1.0)
        assert abs(kernel_series_term(2, p) - TERM_R2) <= 1e-13 * TERM_R2

    def test_negative_index(self):
        with pytest.raises(ParameterError):
            kernel_series_term(-1, KernelParams(1.5, 0.5, 1.0, 1.0, 1.0, 1.0))


class TestTwoTermKernel:
    def test_power_law(self):
        v, rep = two_term_kernel(KernelParams(1.5, 0.5, 1.0, 0.0, 0.0, 2.0))
        assert v == pytest.approx(1.5957691216057308, rel=1e-14)
        assert rep.terms_used == 1

    def test_single_order_collapse(self):
        alpha, rho, b, t = 1.4, 0.8, 2.0 + 1.0j, 1.3
        v, _ = two_term_kernel(KernelParams(alpha, 0.5, rho, 0.0, b, t))
        ref = t ** (alpha - rho) * prabhakar(PrabhakarParams(alpha, alpha - rho + 1), -b * t ** alpha)
        assert abs(v - ref) <= 2e-12 * abs(ref)

    def test_reference_value(self):
        v, rep = two_term_kernel(KernelParams(1.8, 0.9, 1.0, 0.5, 1.0, 1.0))
        assert abs(v - KERNEL_18_09) <= 1e-10 * KERNEL_18_09
        assert rep.tail_estimate <= 1e-12 and not rep.degraded

    def test_negative_coupling(self):
        v, _ = two_term_kernel(KernelParams(1.5, 0.5, 1.0, -0.4, 2.0, 1.0))
        ref = talbot(1.5, 0.5, 1.0, -0.4, 2.0, 1.0)
        assert abs(v - ref) <= 1e-9 * max(1, abs(ref))

    def test_heavy_cancellation_resummed(self):
        # large a t^(alpha-beta): the r-terms cancel by many orders of magnitude
        v, _ = two_term_kernel(KernelParams(1.8, 0.4, 1.0, 2.0, 4.0, 4.0))
        ref = talbot(1.8, 0.4, 1.0, 2.0, 4.0, 4.0, nodes=96)
        assert abs(v - ref) <= 1e-9 * max(1, abs(ref))


class TestValidation:
    def test_order_ranking(self):
        with pytest.raises(ParameterError):
            KernelParams(0.5, 0.9, 1.0, 1.0, 1.0, 1.0)

    def test_rho_bound(self):
        with pytest.raises(ParameterError):
            KernelParams(1.5, 0.5, 2.6, 1.0, 1.0, 1.0)

    def test_time_positive(self):
        with pytest.raises(ParameterError):
            KernelParams(1.5, 0.5, 1.0, 1.0, 1.0, 0.0)

    def test_finite_coefficients(self):
        with pytest.raises(ParameterError):
            KernelParams(1.5, 0.5, 1.0, float("inf"), 1.0, 1.0)


def test_vectorised_matches_scalar():
    b = np.array([0.5, 1 + 1j, 4.0, 30 - 2j])
    vals, _ = kernel_values(1.5, 0.9, 1.0, 0.5, b, 1.0)
    for bi, v in zip(b, vals):
        assert abs(v - two_term_kernel(KernelParams(1.5, 0.9, 1.0, 0.5, bi, 1.0))[0]) <= 1e-14 * max(1, abs(v))


def test_broadcast_over_time():
    b = np.array([0.5, 2.0 + 1j])
    t = np.array([[0.3], [1.0], [2.5]])
    vals, _ = kernel_values(1.2, 0.4, 1.0, 0.5, b[None, :], t)
    assert vals.shape == (3, 2)
    for i, ti in enumerate(t[:, 0]):
        row, _ = kernel_values(1.2, 0.4, 1.0, 0.5, b, float(ti))
        assert np.allclose(vals[i], row, rtol=1e-14, atol=0)


@settings(max_examples=25)
@given(st.floats(1.1, 2.0), st.floats(0.2, 0.9), st.floats(0.0, 2.0),
       st.complex_numbers(max_magnitude=5.0).filter(lambda b: b.real >= 0), st.floats(0.2, 3.0))
def test_conjugation(alpha, beta, a, b, t):
    v = kernel_values(alpha, beta, 1.0, a, np.array([b]), t)[0][0]
    w = kernel_values(alpha, beta, 1.0, a, np.array([b.conjugate()]), t)[0][0]
    assert abs(w - v.conjugate()) <= 1e-13 * max(1, abs(v))


@settings(max_examples=15)
@given(st.floats(1.2, 1.8), st.floats(0.2, 0.6), st.floats(0.0, 2.0), st.floats(0.0, 4.0))
def test_continuous_and_finite_in_time(alpha, beta_frac, a, b):
    beta = alpha * beta_frac
    t = np.linspace(0.05, 10.0, 25)
    vals, rep = kernel_values(alpha, beta, 1.0, a, np.full(t.size, b + 0j), t)
    assert np.all(np.isfinite(vals)) and not rep.degraded
    # no jump much larger than the neighbouring increments
    steps = np.abs(np.diff(vals))
    assert np.all(steps[1:-1] <= 10 * (steps[:-2] + steps[2:]) + 1e-12)


@pytest.mark.parametrize("alpha,beta,rho,a,b,t", [
    (1.2, 0.4, 1.0, 0.5, 0.5, 0.25),
    (1.5, 0.9, 1.25, 2.0, 1 + 1j, 1.0),
    (1.8, 0.4, 0.8, 0.5, 4.0, 4.0),
    (0.9, 0.3, 1.0, 1.0, 0.3 + 1.2j, 2.0),
])
def test_against_talbot(alpha, beta, rho, a, b, t):
    v = kernel_values(alpha, beta, rho, a, np.array([b]), t)[0][0]
    ref = talbot(alpha, beta, rho, a, b, t)
    assert abs(v - ref) <= 1e-9 * max(1, abs(ref))


def test_absolute_floor_near_oscillation_zeros():
    # E_1.8(-k^2) for k near 15.3 lies close to a zero; only an absolute bound can be certified
    b = np.linspace(15.25, 15.35, 11) ** 2 + 0j
    strict, rep_strict = kernel_values(1.8, 1.2, 1.8, 0.0, b, 1.0)
    floored, rep = kernel_values(1.8, 1.2, 1.8, 0.0, b, 1.0, atol=1e-12)
    assert rep_strict.degraded and not rep.degraded
    assert np.array_equal(strict, floored)
    for bi, v in zip(b[::5], floored[::5]):
        assert abs(v - talbot(1.8, 1.2, 1.8, 0.0, bi, 1.0, nodes=96)) <= 1e-12


def test_negative_atol_rejected():
    with pytest.raises(ParameterError):
        kernel_values(1.5, 0.5, 1.0, 0.0, np.array([1.0]), 1.0, atol=-1.0)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frdiff.errors import ParameterError, TailError
from frdiff.quadrature import QuadratureConfig, fourier_inverse_many, graded_mesh, invert_fourier
from frdiff.special_functions import mittag_leffler_one

# (1/pi) int_0^80 E_0.9(-k^1.7) cos(0.5 k) dk: Talbot values of the integrand on
# a 4x finer Gauss-Legendre mesh than the default configuration.
FOURIER_ML_REFERENCE = 0.2654809389680219


def ml_spectrum(k):
    return mittag_leffler_one(0.9, -np.abs(k) ** 1.7)


class TestFourierInverse:
    def test_gaussian(self):
        v, im = invert_fourier(lambda k: np.exp(-k * k), 0.0)
        assert abs(v - 1 / (2 * math.sqrt(math.pi))) <= 1e-12
        assert im <= 1e-14

    @pytest.mark.parametrize("x", [0.0, 0.7, 3.0])
    def test_gaussian_at_offset(self, x):
        v, _ = invert_fourier(lambda k: np.exp(-k * k), x)
        assert abs(v - math.exp(-x * x / 4) / (2 * math.sqrt(math.pi))) <= 1e-12

    def test_lorentzian(self):
        # exp(-|k|) is the transform of 1 / (pi (1 + x^2)); the tail beyond 80 is e^-80
        v, _ = invert_fourier(lambda k: np.exp(-np.abs(k)), 0.0)
        assert abs(v - 1 / math.pi) <= 1e-12

    def test_mittag_leffler_reference(self):
        cfg = QuadratureConfig(tail_tol=1e-2)
        v, _, rep = invert_fourier(ml_spectrum, 0.5, cfg, full_output=True)
        assert abs(v - FOURIER_ML_REFERENCE) <= 1e-9
        assert 0 < rep.tail_estimate <= 1e-2

    def test_slow_tail_is_reported(self):
        with pytest.raises(TailError) as info:
            invert_fourier(ml_spectrum, 0.5)
        assert info.value.tail > QuadratureConfig().tail_tol

    def test_tail_bound_covers_truncation(self):
        # exp(-k^2/50) at k_max = 20: true omitted mass (1/pi) int_20^inf
        cfg = QuadratureConfig(k_max=20.0, tail_tol=1.0)
        _, _, rep = invert_fourier(lambda k: np.exp(-k * k / 50), 0.0, cfg, full_output=True)
        omitted = math.sqrt(50) * math.erfc(20 / math.sqrt(50)) * math.sqrt(math.pi) / 2 / math.pi
        assert rep.tail_estimate >= omitted

    def test_folded_matches_two_sided(self):
        # skewed spectrum: Hermitian but not real
        def spec(k):
            return np.exp(-np.abs(k) ** 1.5 * (1 + 0.4j * np.sign(k)))
        x = 0.8
        v, _ = invert_fourier(spec, x)
        kk = np.linspace(-60, 60, 240001)
        direct = np.trapezoid(spec(kk) * np.exp(-1j * kk * x), kk) / (2 * math.pi)
        assert abs(v - direct.real) <= 1e-8
        assert abs(direct.imag) <= 1e-12

    def test_refinement_is_stable(self):
        spec = lambda k: np.exp(-np.abs(k) ** 1.3)
        xs = [0.0, 1.0, 4.0]
        coarse = fourier_inverse_many(spec, xs).values
        fine = fourier_inverse_many(spec, xs, QuadratureConfig().refined()).values
        assert np.max(np.abs(coarse - fine)) <= 1e-12

    def test_non_hermitian_residual(self):
        v, im = invert_fourier(lambda k: np.exp(-k * k) * (1 + 1e-3j), 0.0)
        assert im > 1e-5

    def test_shape_checked(self):
        with pytest.raises(ParameterError):
            invert_fourier(lambda k: np.ones(3), 0.0)

    def test_non_finite_rejected(self):
        with pytest.raises(ParameterError):
            invert_fourier(lambda k: np.full(k.shape, np.nan), 0.0)


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(k_max=0.0), dict(panels=0), dict(nodes_per_panel=1),
                                    dict(tail_tol=0.0), dict(grading_exponent=0.5), dict(realness_tol=-1)])
    def test_invalid(self, kw):
        with pytest.raises(ParameterError):
            QuadratureConfig(**kw)

    def test_refined(self):
        r = QuadratureConfig().refined(2)
        assert (r.panels, r.nodes_per_panel) == (128, 32)


class TestGradedMesh:
    @pytest.mark.parametrize("power,exact", [(-0.2, 1.25), (-0.5, 2.0), (0.0, 1.0)])
    def test_weighted_unit_integral(self, power, exact):
        mesh = graded_mesh(1.0, 3.0, 16, power=power)
        assert abs(mesh.integrate(np.ones_like(mesh.nodes)) - exact) <= 1e-12

    def test_uniform_mesh(self):
        mesh = graded_mesh(2.0, 1.0, 4)
        assert np.allclose(mesh.breakpoints, [0, 0.5, 1, 1.5, 2])
        assert abs(mesh.integrate(np.cos(mesh.nodes)) - math.sin(2.0)) <= 1e-14

    def test_grading_clusters_at_origin(self):
        mesh = graded_mesh(1.0, 3.0, 8)
        assert mesh.breakpoints[1] == pytest.approx(1 / 512)

    def test_singular_weight_times_smooth(self):
        # int_0^2 xi^-0.3 exp(-xi) dxi = lower incomplete gamma(0.7, 2)
        from scipy.special import gamma, gammainc
        mesh = graded_mesh(2.0, 3.0, 8, power=-0.3)
        exact = gamma(0.7) * gammainc(0.7, 2.0)
        assert abs(mesh.integrate(np.exp(-mesh.nodes)) - exact) <= 1e-12

    @pytest.mark.parametrize("kw", [dict(t=0.0), dict(exponent=0.9), dict(n=1), dict(power=-1.0)])
    def test_invalid(self, kw):
        args = dict(t=1.0, exponent=2.0, n=4, power=0.0) | kw
        with pytest.raises(ParameterError):
            graded_mesh(**args)


@settings(max_examples=30)
@given(st.floats(0.3, 3.0), st.floats(-6.0, 6.0))
def test_gaussian_family(width, x):
    v, _ = invert_fourier(lambda k: np.exp(-0.5 * (width * k) ** 2), x)
    exact = math.exp(-x * x / (2 * width ** 2)) / (width * math.sqrt(2 * math.pi))
    assert abs(v - exact) <= 1e-10

"""Space-time fractional diffusion with multi-term time derivatives.

The package evaluates three-parameter Mittag-Leffler functions, the
relaxation kernels built from them, and the Fourier-space and physical-space
solutions of two-term time-fractional reaction-diffusion problems with
Riesz-Feller space derivatives.
"""

from .config import RunConfig, parse_config
from .errors import (ConfigError, ConvergenceError, FamilyError, FrdiffError, ParameterError, QuadratureError,
                     RealnessError, StabilityError, TailError)
from .kernel import KernelParams, kernel_series_term, kernel_values, two_term_kernel
from .oracles import (caputo_two_term_transform, gl_subdiffusion_solve, highprec_series, relaxation_transform,
                      talbot_inverse_laplace)
from .problem import Family, InitialData, Problem, Source, TimeDerivative
from .quadrature import QuadratureConfig, graded_mesh, invert_fourier
from .report import TruncationReport
from .solution import (CorollaryTag, Grid, SolutionField, green_function, solve, source_convolution, specialize,
                       spectral_solution, spectral_solution_t1, spectral_solution_t2, spectral_solution_t3)
from .special_functions import PrabhakarParams, mittag_leffler_one, mittag_leffler_two, prabhakar
from .spectral import SpaceTerm, riesz_feller_symbol, spectral_coefficient

__version__ = "0.1.0"

__all__ = [
    "CorollaryTag", "ConfigError", "ConvergenceError", "FamilyError", "Family", "FrdiffError", "Grid",
    "InitialData", "KernelParams", "ParameterError", "PrabhakarParams", "Problem", "QuadratureConfig",
    "QuadratureError", "RealnessError", "RunConfig", "SolutionField", "Source", "SpaceTerm", "StabilityError",
    "TailError", "TimeDerivative", "TruncationReport", "caputo_two_term_transform", "gl_subdiffusion_solve",
    "graded_mesh", "green_function", "highprec_series", "invert_fourier", "kernel_series_term", "kernel_values",
    "mittag_leffler_one", "mittag_leffler_two", "parse_config", "prabhakar", "relaxation_transform",
    "riesz_feller_symbol", "solve", "source_convolution", "specialize", "spectral_coefficient",
    "spectral_solution", "spectral_solution_t1", "spectral_solution_t2", "spectral_solution_t3",
    "talbot_inverse_laplace", "two_term_kernel",
]

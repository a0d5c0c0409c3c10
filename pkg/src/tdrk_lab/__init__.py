"""Two-derivative Runge-Kutta methods under simulated floating-point formats.

The package couples three ingredients that are usually studied separately:

* explicit two-derivative Runge-Kutta tableaux with exact rational
  coefficients, order verification and stability polynomials;
* a small emulation layer that rounds every elementwise operation to a
  chosen binary format, so the first derivative can be evaluated in one
  format and the second derivative in a cheaper one;
* Fourier collocation operators and two periodic transport problems on
  which the mixed-format error floors and convergence rates are measured.

The experiment harness and the ``tdrk-lab`` console script drive
convergence sweeps, stability-region scans under second-derivative noise,
and effective-noise measurements.
"""

from .precision import (Format, SimScalar, SimVector, cast_vector,
                        round_fraction, round_to, rounded_arith)
from .tableau import (ConditionReport, TdrkTableau, check_order_conditions,
                      check_perturbation_order, format_tableau,
                      parse_tableau, stability_polynomial)
from .catalog import METHODS, MethodCard, get_method, list_methods
from .stability import (RegionGrid, StabilityScan, emit_region_svg, eval_R,
                        scan_region, write_boundary_csv)
from .spectral import Build, SpectralOperator, apply, fourier_d1, fourier_d2
from .problems import (PROBLEMS, Advection, Burgers, Problem, ScalarLinear,
                       make_problem)
from .integrator import (StepConfig, Trajectory, count_steps, integrate,
                         ssp33_integrate, tdrk_step)
from .harness import (ConvergenceRecord, ExperimentConfig,
                      characterize_epsilon, emit_outputs, estimate_order,
                      reference_solution, run_convergence)

__version__ = "0.1.0"

__all__ = [
    "Format", "SimScalar", "SimVector", "cast_vector", "round_fraction",
    "round_to", "rounded_arith",
    "TdrkTableau", "ConditionReport", "check_order_conditions",
    "check_perturbation_order", "stability_polynomial", "parse_tableau",
    "format_tableau",
    "MethodCard", "METHODS", "get_method", "list_methods",
    "RegionGrid", "StabilityScan", "eval_R", "scan_region",
    "emit_region_svg", "write_boundary_csv",
    "Build", "SpectralOperator", "fourier_d1", "fourier_d2", "apply",
    "Problem", "Advection", "Burgers", "ScalarLinear", "PROBLEMS",
    "make_problem",
    "StepConfig", "Trajectory", "count_steps", "tdrk_step", "integrate",
    "ssp33_integrate",
    "ExperimentConfig", "ConvergenceRecord", "run_convergence",
    "estimate_order", "emit_outputs", "reference_solution",
    "characterize_epsilon",
    "__version__",
]

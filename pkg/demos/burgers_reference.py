"""
Burgers equation against an extended-precision reference
========================================================

There is no closed-form solution for u_t + (u^2/2)_x = 0 with smooth data
on the torus, so errors are measured against a three-stage strong-stability
-preserving run carried in double-double arithmetic at a tiny step.  The
nonlinearity exercises the full two-derivative machinery: the second
derivative is -D(u F(u)), a genuinely state-dependent operator rather than
a fixed matrix.

Full-precision runs converge at the design order; dropping the second
derivative to half precision reduces each method to its noise order, the
same ranking the advection tables show.
"""

import numpy as np

from tdrk_lab import (Format, StepConfig, estimate_order, get_method,
                      integrate, make_problem, reference_solution)

print("building the reference (5000 extended-precision steps) ...")
ref = reference_solution("burgers", 50, 0.5, ref_dt=1e-4)


def error(method, dt, high, low):
    problem = make_problem("burgers", 50, high, low)
    traj = integrate(StepConfig(get_method(method), problem, dt, 0.5))
    if traj.diverged:
        return None
    return float(np.abs(traj.final_state.to_float64() - ref).max())


methods = ("TDRK2s3p1e", "TDRK2s3p2e", "TDRK3s3p3e", "TDRK2s4p1e",
           "TDRK3s4p2e")

print("\nfull precision, dt in {2e-2, 1e-2, 5e-3}:")
for name in methods:
    dts = (2e-2, 1e-2, 5e-3)
    errs = [error(name, dt, Format.B64, Format.B64) for dt in dts]
    slope = estimate_order(dts, errs)
    cells = "  ".join(f"{e:.2e}" for e in errs)
    print(f"  {name}: {cells}   slope {slope:.2f}")

print("\nsecond derivative at half precision, dt in {1e-2, 1e-3, 1e-4}:")
for name in methods[:3]:
    dts = (1e-2, 1e-3, 1e-4)
    errs = [error(name, dt, Format.B64, Format.B16) for dt in dts]
    slope = estimate_order(dts, errs)
    cells = "  ".join(f"{e:.2e}" for e in errs)
    print(f"  {name}: {cells}   slope {slope:.2f}")

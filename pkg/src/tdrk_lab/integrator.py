"""Fixed-step time integration with precision-faithful stage arithmetic.

All tableau linear combinations run at the problem's high format with one
rounding per operation, in a fixed order: for each stage, the F terms in
column order, then the Fd terms in column order; the update accumulates
the same way.  Rational coefficients are rounded to the working format
once, up front, together with their dt and dt^2 factors, so every step
reuses identical scaled coefficients.

A non-finite state ends the run: the trajectory reports the last finite
state and how many full steps completed.  Overflow inside a low-format
derivative evaluation surfaces as infinities in the next state, so the
per-step check is where divergence is caught.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .precision import Format, SimVector, cast_vector, round_fraction, round_to

__all__ = ["StepConfig", "Trajectory", "tdrk_step", "integrate",
           "ssp33_integrate", "count_steps"]


def count_steps(dt, t_final):
    """Number of fixed steps; dt must divide t_final to 1e-12 relative."""
    if dt < 0 or t_final < 0:
        raise ValueError("dt and t_final must be nonnegative")
    if t_final == 0:
        return 0
    if dt == 0:
        raise ValueError("dt must be positive for a nonzero time span")
    steps = round(t_final / dt)
    if steps < 1 or abs(steps * dt - t_final) > 1e-12 * t_final:
        raise ValueError(f"dt={dt} does not divide t_final={t_final}")
    return steps


@dataclass(frozen=True)
class Trajectory:
    """Outcome of a run: last (finite) state, divergence flag, step count."""

    final_state: SimVector
    diverged: bool
    steps_taken: int


class StepConfig:
    """A method bound to a problem, step size, and horizon."""

    def __init__(self, method, problem, dt, t_final):
        self.method = method
        self.problem = problem
        self.dt = float(dt)
        self.t_final = float(t_final)
        self.steps = count_steps(self.dt, self.t_final)

        # accept a catalog card or a bare tableau
        t = getattr(method, "tableau", method)
        self.tableau = t
        s = t.stages
        high = problem.high
        dt_s = round_to(self.dt, high)
        dt2_s = dt_s * dt_s
        self._dta = [[_scaled(dt_s, t.a[i][j], high) for j in range(s)]
                     for i in range(s)]
        self._dtad = [[_scaled(dt2_s, t.ad[i][j], high) for j in range(s)]
                      for i in range(s)]
        self._dtb = [_scaled(dt_s, t.b[j], high) for j in range(s)]
        self._dtbd = [_scaled(dt2_s, t.bd[j], high) for j in range(s)]
        self._need_f = [t.b[j] != 0 or any(t.a[i][j] != 0 for i in range(j + 1, s))
                        for j in range(s)]
        self._need_fd = [t.bd[j] != 0 or any(t.ad[i][j] != 0 for i in range(j + 1, s))
                         for j in range(s)]


def _scaled(dt_s, coeff, high):
    if coeff == 0:
        return None
    return dt_s * round_fraction(coeff, high)


def tdrk_step(u, cfg):
    """One step from state u; dt = 0 returns u unchanged."""
    s = cfg.tableau.stages
    fs = [None] * s
    fds = [None] * s
    for i in range(s):
        y = u
        for j in range(i):
            cf = cfg._dta[i][j]
            if cf is not None:
                y = y + cf * fs[j]
        for j in range(i):
            cf = cfg._dtad[i][j]
            if cf is not None:
                y = y + cf * fds[j]
        if cfg._need_f[i]:
            fs[i] = cfg.problem.F(y)
        if cfg._need_fd[i]:
            fds[i] = cfg.problem.Fdot(y)
    unew = u
    for j in range(s):
        if cfg._dtb[j] is not None:
            unew = unew + cfg._dtb[j] * fs[j]
    for j in range(s):
        if cfg._dtbd[j] is not None:
            unew = unew + cfg._dtbd[j] * fds[j]
    return unew


def integrate(cfg, u0=None):
    """March steps = t_final / dt times; stop early on a non-finite state."""
    u = cfg.problem.initial_condition() if u0 is None else u0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for k in range(cfg.steps):
            unext = tdrk_step(u, cfg)
            if not unext.is_finite():
                return Trajectory(u, True, k)
            u = unext
    return Trajectory(u, False, cfg.steps)


def ssp33_integrate(problem, dt, t_final, policy=Format.EXT):
    """Reference march with the three-stage SSP Runge-Kutta scheme.

    Uses only F (no second derivative), all arithmetic at ``policy``.
    Intended for tight reference solutions at the pair format when no
    closed-form solution exists.
    """
    steps = count_steps(float(dt), float(t_final))
    dt_s = round_to(float(dt), policy)
    c14 = round_fraction(Fraction(1, 4), policy)
    c34 = round_fraction(Fraction(3, 4), policy)
    c13 = round_fraction(Fraction(1, 3), policy)
    c23 = round_fraction(Fraction(2, 3), policy)
    u = cast_vector(problem.initial_pair(), policy)
    F = problem.F_at
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for k in range(steps):
            u1 = u + dt_s * F(u, policy)
            u2 = c34 * u + c14 * (u1 + dt_s * F(u1, policy))
            unext = c13 * u + c23 * (u2 + dt_s * F(u2, policy))
            if not unext.is_finite():
                return Trajectory(u, True, k)
            u = unext
    return Trajectory(u, False, steps)

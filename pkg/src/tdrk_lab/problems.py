"""Periodic 1-D test problems exposing F and its time derivative Fd.

Each problem is bound to a grid size and a precision pair (high, low).
The first derivative F(u) is evaluated at the high format; the
second-derivative term Fd(u) — the chain-rule time derivative of F — is
evaluated *entirely* at the low format and embedded back, which is the
whole point: the expensive extra derivative is the part a mixed-precision
solver wants to buy cheaply.

Linear advection  u_t = -a u_x  on [-1, 1):

    F(u)  = -a D u            (high)
    Fd(u) =  a^2 (D D) u      (low; uses the squared operator)

Inviscid Burgers  u_t = -(u^2/2)_x:

    F(u)  = -D (u^2/2)                    (high)
    Fd(u) = -D (u . F(u)),  F recomputed  (low)

since Fd = F_u F = -D diag(u) F for this flux.  The Burgers initial
profile 1/2 + sin(pi x)/4 first shocks near t = 4/pi, so runs to t = 0.5
stay smooth.
"""

import mpmath
import numpy as np

from .precision import Format, SimVector, cast_vector, round_to, rounded_arith
from .spectral import Build, apply, fourier_d1, fourier_d2

__all__ = ["Problem", "Advection", "Burgers", "ScalarLinear", "make_problem",
           "PROBLEMS"]


class Problem:
    """Shared wiring: grid, precision pair, operator lookup."""

    name = "problem"

    def __init__(self, n, high=Format.B64, low=None, build=Build.NATIVE):
        low = high if low is None else low
        if low not in high:
            raise ValueError(
                f"low format {low} is not contained in high format {high}")
        self.n = n
        self.high = high
        self.low = low
        self.build = Build(build)

    def grid(self):
        """Binary64 view of the nodes x_j = -1 + 2 j / n."""
        return -1.0 + 2.0 * np.arange(self.n) / self.n

    def _sample_pair(self, fn):
        """Evaluate fn at the exact grid rationals, in the pair format."""
        hi = np.empty(self.n)
        lo = np.empty(self.n)
        with mpmath.workprec(130):
            for j in range(self.n):
                x = mpmath.mpf(-1) + mpmath.mpf(2 * j) / self.n
                v = fn(x)
                h = float(v)
                hi[j] = h
                lo[j] = float(v - mpmath.mpf(h))
        return SimVector.from_pairs(hi, lo)

    def initial_pair(self):
        raise NotImplementedError

    def initial_condition(self):
        """Initial data sampled in the pair format, cast to ``high``."""
        return cast_vector(self.initial_pair(), self.high)

    def exact_solution(self, t):
        """Exact solution at time t cast to ``high``, or None."""
        return None

    def F(self, u):
        return self.F_at(u, self.high)

    def F_at(self, u, policy):
        raise NotImplementedError

    def Fdot(self, u):
        """Low-format second-derivative term, embedded back into ``high``."""
        raise NotImplementedError


class Advection(Problem):
    """u_t = -a u_x with initial profile sin(pi x)."""

    name = "advection"

    def __init__(self, n, high=Format.B64, low=None, build=Build.NATIVE,
                 speed=1.0):
        super().__init__(n, high, low, build)
        self.speed = float(speed)

    def initial_pair(self):
        return self._sample_pair(lambda x: mpmath.sin(mpmath.pi * x))

    def exact_solution(self, t):
        a, tt = self.speed, t
        shifted = self._sample_pair(
            lambda x: mpmath.sin(mpmath.pi * (x - mpmath.mpf(a) * tt)))
        return cast_vector(shifted, self.high)

    def F_at(self, u, policy):
        w = apply(fourier_d1(self.n, policy), u)
        return round_to(-self.speed, policy) * w

    def Fdot(self, u):
        ul = cast_vector(u, self.low)
        w = apply(fourier_d2(self.n, self.low, self.build), ul)
        a2 = rounded_arith("mul", self.speed, self.speed, self.low)
        return cast_vector(a2 * w, self.high)


class Burgers(Problem):
    """u_t = -(u^2/2)_x with initial profile 1/2 + sin(pi x)/4."""

    name = "burgers"

    def initial_pair(self):
        return self._sample_pair(
            lambda x: mpmath.mpf(1) / 2 + mpmath.sin(mpmath.pi * x) / 4)

    def F_at(self, u, policy):
        half = round_to(0.5, policy)
        flux = half * (u * u)
        return -apply(fourier_d1(self.n, policy), flux)

    def Fdot(self, u):
        low = self.low
        d1 = fourier_d1(self.n, low, self.build)
        ul = cast_vector(u, low)
        half = round_to(0.5, low)
        f_low = -apply(d1, half * (ul * ul))
        return cast_vector(-apply(d1, ul * f_low), self.high)


class ScalarLinear(Problem):
    """The scalar test u' = lambda u as a one-element problem.

    F = lambda u and Fd = lambda^2 u, with the same precision routing as
    the PDE problems; one step reproduces the stability polynomial.
    """

    name = "scalar"

    def __init__(self, high=Format.B64, low=None, build=Build.NATIVE,
                 rate=-1.0):
        # Bypass the n >= 4 grid check; there is no grid here.
        low = high if low is None else low
        if low not in high:
            raise ValueError(
                f"low format {low} is not contained in high format {high}")
        self.n = 1
        self.high = high
        self.low = low
        self.build = Build(build)
        self.rate = float(rate)

    def initial_pair(self):
        return SimVector.from_pairs([1.0], [0.0])

    def exact_solution(self, t):
        with mpmath.workprec(130):
            v = mpmath.e ** (mpmath.mpf(self.rate) * t)
            h = float(v)
            pair = SimVector.from_pairs([h], [float(v - mpmath.mpf(h))])
        return cast_vector(pair, self.high)

    def F_at(self, u, policy):
        return round_to(self.rate, policy) * u

    def Fdot(self, u):
        ul = cast_vector(u, self.low)
        r2 = rounded_arith("mul", self.rate, self.rate, self.low)
        return cast_vector(r2 * ul, self.high)


PROBLEMS = {"advection": Advection, "burgers": Burgers}


def make_problem(name, n, high=Format.B64, low=None, build=Build.NATIVE,
                 **params):
    """Instantiate a named problem on an n-point grid."""
    try:
        cls = PROBLEMS[str(name).lower()]
    except KeyError:
        raise ValueError(
            f"unknown problem {name!r}; available: {', '.join(PROBLEMS)}"
        ) from None
    return cls(n, high=high, low=low, build=build, **params)

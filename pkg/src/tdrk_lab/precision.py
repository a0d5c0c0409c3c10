"""Simulated floating-point formats with round-after-every-operation semantics.

Four working formats are supported:

======  =============================  ==========================
name    storage                        semantics
======  =============================  ==========================
b16     numpy float16                  IEEE 754 binary16
b32     numpy float32                  IEEE 754 binary32
b64     numpy float64                  IEEE 754 binary64
ext     pair of float64 (double-double)  ~106-bit extended format
======  =============================  ==========================

Every arithmetic operation rounds its result to the active format before
the next operation sees it, with round-to-nearest, ties-to-even, subnormals
enabled, and overflow saturating to infinity.  For the three IEEE formats
this is exactly what numpy's elementwise operations do on the matching
dtype, so no bit twiddling is needed; operation *order* is what must be
pinned down, and the reduction helpers here fix it explicitly.

The extended format is an unevaluated double-double pair, not binary128:
it carries about 106 significand bits with the exponent range of binary64,
which is plenty of headroom to serve as the reference format here.
"""

import enum
import math
import struct
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import doubledouble as dd

__all__ = [
    "Format",
    "SimScalar",
    "SimVector",
    "round_to",
    "round_fraction",
    "rounded_arith",
    "cast_vector",
    "matvec_native",
]


class Format(enum.Enum):
    """A working precision.  Ordered by representable-set inclusion."""

    B16 = "b16"
    B32 = "b32"
    B64 = "b64"
    EXT = "ext"

    def __str__(self):
        return self.value

    @property
    def dtype(self):
        """numpy storage dtype, or None for the pair format."""
        return _DTYPES[self]

    @property
    def rank(self):
        """Position in the inclusion chain b16 < b32 < b64 < ext."""
        return _RANKS[self]

    def __contains__(self, other):
        """True when every value of ``other`` is representable here."""
        return isinstance(other, Format) and other.rank <= self.rank

    @classmethod
    def parse(cls, name):
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown precision {name!r}; expected one of "
                + ", ".join(f.value for f in cls)
            ) from None


_DTYPES = {Format.B16: np.float16, Format.B32: np.float32,
           Format.B64: np.float64, Format.EXT: None}
_RANKS = {Format.B16: 0, Format.B32: 1, Format.B64: 2, Format.EXT: 3}


@dataclass(frozen=True)
class SimScalar:
    """One number rounded to a format.

    ``hi`` is the stored value (exactly representable in ``policy``); ``lo``
    is the second component of the pair format and is 0.0 otherwise.
    """

    hi: float
    lo: float
    policy: Format

    def __float__(self):
        return self.hi + self.lo

    def __add__(self, other):
        return rounded_arith("add", self, other, self.policy)

    def __sub__(self, other):
        return rounded_arith("sub", self, other, self.policy)

    def __mul__(self, other):
        if isinstance(other, SimVector):
            return other.scale(self)
        return rounded_arith("mul", self, other, self.policy)

    def __truediv__(self, other):
        return rounded_arith("div", self, other, self.policy)

    def __neg__(self):
        return SimScalar(-self.hi, -self.lo, self.policy)

    def is_finite(self):
        return math.isfinite(self.hi) and math.isfinite(self.lo)

    def __repr__(self):
        if self.policy is Format.EXT and self.lo != 0.0:
            return f"SimScalar({self.hi!r}+{self.lo!r}, {self.policy})"
        return f"SimScalar({self.hi!r}, {self.policy})"


def round_to(x, policy):
    """Round a real number to ``policy`` (nearest, ties-to-even).

    Accepts ints, floats, and exact :class:`~fractions.Fraction` values.
    Floats are taken at face value as binary64; overflow gives a signed
    infinity; NaN and infinities pass through.
    """
    if isinstance(x, SimScalar):
        if x.policy is policy:
            return x
        x = Fraction(x.hi) + Fraction(x.lo) if x.is_finite() else x.hi
    if isinstance(x, Fraction):
        return round_fraction(x, policy)
    v = float(x)
    if policy is Format.EXT:
        return SimScalar(v, 0.0, policy)
    with np.errstate(over="ignore"):
        return SimScalar(float(policy.dtype(v)), 0.0, policy)


def round_fraction(frac, policy):
    """Round an exact rational to ``policy`` in a single rounding step.

    Going through binary64 first would round twice; for the narrow formats
    the binary64 value is nudged to its round-to-odd representative before
    the final conversion, which makes the composite rounding exact.
    """
    frac = Fraction(frac)
    try:
        r = float(frac)
    except OverflowError:
        r = math.inf if frac > 0 else -math.inf
    if policy is Format.B64:
        return SimScalar(r, 0.0, policy)
    if policy is Format.EXT:
        if not math.isfinite(r):
            return SimScalar(r, 0.0, policy)
        lo = float(frac - Fraction(r))
        return SimScalar(*dd.fast_two_sum(r, lo), policy)
    if math.isfinite(r):
        err = frac - Fraction(r)
        if err and not _mantissa_odd(r):
            r = math.nextafter(r, math.inf if err > 0 else -math.inf)
    return SimScalar(float(policy.dtype(r)), 0.0, policy)


def _mantissa_odd(x):
    (bits,) = struct.unpack("<q", struct.pack("<d", x))
    return bits & 1 == 1


def rounded_arith(op, x, y, policy):
    """One correctly rounded scalar operation at ``policy``.

    ``op`` is one of ``add sub mul div``.  Operands not already in the
    format are rounded to it first.
    """
    a = round_to(x, policy)
    b = round_to(y, policy)
    if policy is Format.EXT:
        hi, lo = _DD_OPS[op]((a.hi, a.lo), (b.hi, b.lo))
        if not math.isfinite(hi):
            lo = 0.0
        return SimScalar(hi, lo, policy)
    t = policy.dtype
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        r = _PY_OPS[op](t(a.hi), t(b.hi))
    return SimScalar(float(r), 0.0, policy)


_DD_OPS = {"add": dd.add, "sub": dd.sub, "mul": dd.mul, "div": dd.div}
_PY_OPS = {"add": lambda a, b: a + b, "sub": lambda a, b: a - b,
           "mul": lambda a, b: a * b, "div": lambda a, b: a / b}


class SimVector:
    """A vector whose elements share one working format.

    Elementwise operators round after every operation at the vector's
    format.  Instances are treated as immutable; operations allocate new
    vectors.  ``hi`` is the stored array (native dtype for the IEEE
    formats, float64 for the pair format) and ``lo`` is the pair residual
    or None.
    """

    __slots__ = ("hi", "lo", "policy")

    def __init__(self, hi, lo, policy):
        self.hi = hi
        self.lo = lo
        self.policy = policy

    @classmethod
    def from_values(cls, values, policy):
        """Round binary64 input values into a fresh vector."""
        v = np.asarray(values, dtype=np.float64)
        if policy is Format.EXT:
            return cls(v.copy(), np.zeros_like(v), policy)
        return cls(v.astype(policy.dtype), None, policy)

    @classmethod
    def from_pairs(cls, hi, lo):
        """Adopt an already-normalized (hi, lo) pair as an ext vector."""
        return cls(np.asarray(hi, dtype=np.float64),
                   np.asarray(lo, dtype=np.float64), Format.EXT)

    def __len__(self):
        return self.hi.shape[0]

    def __getitem__(self, k):
        if self.policy is Format.EXT:
            return SimScalar(float(self.hi[k]), float(self.lo[k]), self.policy)
        return SimScalar(float(self.hi[k]), 0.0, self.policy)

    def _binop(self, other, ddop, npop):
        if not isinstance(other, SimVector) or other.policy is not self.policy:
            raise ValueError("operands must share one working format")
        if self.policy is Format.EXT:
            hi, lo = ddop((self.hi, self.lo), (other.hi, other.lo))
            return SimVector(hi, lo, self.policy)
        if self.policy is Format.B64:
            return SimVector(npop(self.hi, other.hi), None, self.policy)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return SimVector(npop(self.hi, other.hi), None, self.policy)

    def __add__(self, other):
        return self._binop(other, dd.add, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binop(other, dd.sub, lambda a, b: a - b)

    def __mul__(self, other):
        return self._binop(other, dd.mul, lambda a, b: a * b)

    def __neg__(self):
        if self.policy is Format.EXT:
            return SimVector(-self.hi, -self.lo, self.policy)
        return SimVector(-self.hi, None, self.policy)

    def scale(self, s):
        """Multiply by a scalar of the same format, one rounding per element."""
        if not isinstance(s, SimScalar):
            s = round_to(s, self.policy)
        elif s.policy is not self.policy:
            raise ValueError("scalar format does not match vector format")
        if self.policy is Format.EXT:
            hi, lo = dd.mul((self.hi, self.lo), (s.hi, s.lo))
            return SimVector(hi, lo, self.policy)
        if self.policy is Format.B64:
            return SimVector(self.hi * s.hi, None, self.policy)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return SimVector(self.hi * self.policy.dtype(s.hi), None, self.policy)

    def to_float64(self):
        """Binary64 view of the values (exact except from the pair format)."""
        if self.policy is Format.EXT:
            return self.hi + self.lo
        return self.hi.astype(np.float64)

    def is_finite(self):
        if self.policy is Format.EXT:
            return bool(np.isfinite(self.hi).all() and np.isfinite(self.lo).all())
        return bool(np.isfinite(self.hi).all())

    def copy(self):
        lo = None if self.lo is None else self.lo.copy()
        return SimVector(self.hi.copy(), lo, self.policy)

    def __repr__(self):
        return f"SimVector(n={len(self)}, {self.policy})"


def cast_vector(v, policy):
    """Re-represent a vector in another format.

    Widening casts are exact.  Narrowing casts round each element once:
    from the pair format the value is first replaced by its round-to-odd
    binary64 representative, which makes the following conversion agree
    with direct rounding of the full pair.
    """
    src = v.policy
    if src is policy:
        return v
    if src is Format.EXT:
        return SimVector(narrow_pair(v.hi, v.lo, policy), None, policy)
    if policy is Format.EXT:
        h = v.hi.astype(np.float64)
        return SimVector(h, np.zeros_like(h), policy)
    return SimVector(v.hi.astype(policy.dtype), None, policy)


def narrow_pair(hi, lo, policy):
    """Round a pair array once to a narrower IEEE format."""
    s, e = dd.two_sum(hi, lo)
    if policy is Format.B64:
        return s
    return _round_to_odd(s, e).astype(policy.dtype)


def _round_to_odd(s, e):
    """Round-to-odd representative of the exact sum s + e (s = fl(s + e))."""
    inexact = (e != 0) & np.isfinite(s)
    if not inexact.any():
        return s
    even = (s.view(np.int64) & 1) == 0
    target = np.where(e > 0, np.inf, -np.inf)
    return np.where(inexact & even, np.nextafter(s, target), s)


def matvec_native(cols, v):
    """Matrix-vector product with a fixed accumulation order.

    ``cols[k]`` holds column k of the matrix (contiguous rows of the
    transposed matrix); the sum runs k = 0, 1, ... with one rounding per
    multiply and per add at the arrays' dtype.
    """
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        acc = cols[0] * v[0]
        for k in range(1, cols.shape[0]):
            acc = acc + cols[k] * v[k]
    return acc

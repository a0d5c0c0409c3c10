"""Dense Fourier differentiation matrices on the periodic interval [-1, 1).

On the uniform grid x_j = -1 + 2j/n the trigonometric interpolant gives
the classical first-derivative matrix

    n even:  D[j][k] = (pi/2) (-1)^(j-k) cot(pi (j-k) / n),   D[j][j] = 0
    n odd:   D[j][k] = (pi/2) (-1)^(j-k) csc(pi (j-k) / n),   D[j][j] = 0

and the operator used for second derivatives here is the square D*D.
Matrices are dense and applied with an explicitly ordered multiply-add
loop, so the rounding behavior at a narrow format is fully pinned down;
no FFT is used anywhere.

Two build variants exist for a target format:

* ``Build.NATIVE`` (1): entries from ordinary binary64 evaluation, each
  rounded to the format; the square D*D is then accumulated *in* the
  format, one rounding per multiply and per add.
* ``Build.DOWNCAST`` (2): entries and the square are carried in the
  extended pair format and rounded to the target exactly once.

At the extended format the two variants coincide.  The gap between them
is the point: a matrix squared inside a 10-bit format carries far more
error than the same matrix rounded once, and that gap is visible in the
mixed-precision convergence floors downstream.
"""

import enum
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from . import doubledouble as dd
from .precision import Format, SimVector, matvec_native, narrow_pair

__all__ = ["Build", "SpectralOperator", "fourier_d1", "fourier_d2", "apply"]


class Build(enum.IntEnum):
    """How an operator destined for a narrow format is constructed."""

    NATIVE = 1
    DOWNCAST = 2


@dataclass(frozen=True, eq=False)
class SpectralOperator:
    """A differentiation matrix bound to one working format.

    ``cols_hi[k]`` is column k of the matrix (the transposed matrix,
    stored contiguously for the fixed-order matvec); ``cols_lo`` is the
    pair residual for the extended format and None otherwise.
    """

    kind: str
    n: int
    policy: Format
    build: Build
    cols_hi: np.ndarray
    cols_lo: np.ndarray

    @property
    def matrix(self):
        """The (n, n) matrix with rows first (a transposed view)."""
        return self.cols_hi.T

    def __repr__(self):
        return (f"SpectralOperator({self.kind}, n={self.n}, {self.policy}, "
                f"build={int(self.build)})")


def _check_n(n):
    if n < 4:
        raise ValueError(f"grid needs at least 4 points, got n={n}")


@lru_cache(maxsize=None)
def _toeplitz_ext(n):
    """Pair-format symbol values f(d), d = -(n-1)..(n-1), via mpmath."""
    hi = np.zeros(2 * n - 1)
    lo = np.zeros(2 * n - 1)
    with mpmath.workprec(130):
        half_pi = mpmath.pi / 2
        for d in range(1, n):
            ang = mpmath.pi * d / n
            if n % 2 == 0:
                v = half_pi * mpmath.cot(ang)
            else:
                v = half_pi / mpmath.sin(ang)
            if d % 2:
                v = -v
            h = float(v)
            l = float(v - h)
            hi[n - 1 + d], lo[n - 1 + d] = h, l
            hi[n - 1 - d], lo[n - 1 - d] = -h, -l
    return hi, lo


@lru_cache(maxsize=None)
def _toeplitz_f64(n):
    """Binary64 symbol values from ordinary numpy evaluation."""
    d = np.arange(1, n, dtype=np.float64)
    ang = np.pi * d / n
    vals = 0.5 * np.pi / np.tan(ang) if n % 2 == 0 else 0.5 * np.pi / np.sin(ang)
    vals = np.where(np.arange(1, n) % 2 == 1, -vals, vals)
    full = np.zeros(2 * n - 1)
    full[n:] = vals
    full[:n - 1] = -vals[::-1]
    return full


def _index_grid(n):
    # [j - k] offset into the symbol table for the transposed layout:
    # cols[k, j] = f(j - k).
    k = np.arange(n)
    return (k[None, :] - k[:, None]) + (n - 1)


def _d1_pair(n):
    hi, lo = _toeplitz_ext(n)
    idx = _index_grid(n)
    return hi[idx], lo[idx]


@lru_cache(maxsize=None)
def fourier_d1(n, policy, build=Build.NATIVE):
    """First-derivative matrix at a working format."""
    _check_n(n)
    build = Build(build)
    if policy is Format.EXT:
        cols_hi, cols_lo = _d1_pair(n)
    elif build is Build.DOWNCAST:
        cols_hi = narrow_pair(*_d1_pair(n), policy)
        cols_lo = None
    else:
        cols_hi = _toeplitz_f64(n)[_index_grid(n)].astype(policy.dtype)
        cols_lo = None
    return SpectralOperator("d1", n, policy, build,
                            _contig(cols_hi), _contig(cols_lo))


@lru_cache(maxsize=None)
def fourier_d2(n, policy, build=Build.NATIVE):
    """Squared first-derivative matrix at a working format.

    NATIVE accumulates the square with one rounding per operation at the
    format; DOWNCAST squares in the extended pair format and rounds each
    entry once.
    """
    _check_n(n)
    build = Build(build)
    if policy is not Format.EXT and build is Build.NATIVE:
        d1 = fourier_d1(n, policy, build)
        cols_hi = _square_native_t(d1.cols_hi)
        cols_lo = None
    else:
        sq_hi, sq_lo = _square_pair_t(*_d1_pair(n))
        if policy is Format.EXT:
            cols_hi, cols_lo = sq_hi, sq_lo
        else:
            cols_hi = narrow_pair(sq_hi, sq_lo, policy)
            cols_lo = None
    return SpectralOperator("d2", n, policy, build,
                            _contig(cols_hi), _contig(cols_lo))


def _square_native_t(cols):
    """(M @ M) transposed, accumulated k-major with per-op rounding.

    ``cols`` holds M transposed: cols[k, j] = M[j, k].  The transposed
    square is (M@M)^T = M^T M^T, i.e. plain row-times-column on ``cols``
    itself, accumulated as a sum of outer products in fixed k order.
    """
    n = cols.shape[0]
    with np.errstate(over="ignore", invalid="ignore"):
        acc = cols[:, 0][:, None] * cols[0][None, :]
        for k in range(1, n):
            acc = acc + cols[:, k][:, None] * cols[k][None, :]
    return acc


def _square_pair_t(hi, lo):
    """Same contraction as _square_native_t in pair arithmetic."""
    n = hi.shape[0]
    acc = None
    for k in range(n):
        term = dd.mul((hi[:, k][:, None], lo[:, k][:, None]),
                      (hi[k][None, :], lo[k][None, :]))
        acc = term if acc is None else dd.add(acc, term)
    return acc


def _contig(arr):
    if arr is None:
        return None
    out = np.ascontiguousarray(arr)
    out.flags.writeable = False
    return out


def apply(op, v):
    """Matrix-vector product at the operator's format, fixed sum order.

    The IEEE formats accumulate column-by-column with one rounding per
    multiply and per add; the pair format uses full pair products with a
    deterministic pairwise-tree reduction.
    """
    if not isinstance(v, SimVector) or v.policy is not op.policy:
        raise ValueError("vector format must match the operator format")
    if len(v) != op.n:
        raise ValueError(f"length {len(v)} does not match n={op.n}")
    if op.policy is Format.EXT:
        hi, lo = dd.matvec_t((op.cols_hi, op.cols_lo), (v.hi, v.lo))
        return SimVector(hi, lo, op.policy)
    return SimVector(matvec_native(op.cols_hi, v.hi), None, op.policy)

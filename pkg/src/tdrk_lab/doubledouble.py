"""Double-double arithmetic on floats or numpy arrays.

A value is carried as an unevaluated pair ``(hi, lo)`` of binary64 numbers
with ``hi = fl(hi + lo)`` and ``|lo| <= ulp(hi)/2``, giving roughly 106
significand bits.  Every helper accepts Python floats or same-shape numpy
arrays and relies only on correctly rounded binary64 ``+ - * /``, so the
results are identical no matter how the inputs are batched.

The error-free transformations are the classical ones: ``two_sum`` (Knuth),
``fast_two_sum`` (Dekker), and ``two_prod`` built on Dekker's splitting,
since numpy exposes no fused multiply-add.
"""

import numpy as np

# 2**27 + 1, splits a 53-bit significand into two 26-bit halves.
_SPLITTER = 134217729.0


def two_sum(a, b):
    """Return (s, e) with s = fl(a + b) and s + e = a + b exactly."""
    s = a + b
    t = s - a
    e = (a - (s - t)) + (b - t)
    return s, e


def fast_two_sum(a, b):
    """two_sum for pre-ordered operands; requires |a| >= |b| or a == 0."""
    s = a + b
    e = b - (s - a)
    return s, e


def two_prod(a, b):
    """Return (p, e) with p = fl(a * b) and p + e = a * b exactly."""
    p = a * b
    aa = _SPLITTER * a
    a_hi = aa - (aa - a)
    a_lo = a - a_hi
    bb = _SPLITTER * b
    b_hi = bb - (bb - b)
    b_lo = b - b_hi
    e = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, e


def from_float(x):
    """Embed a binary64 value exactly."""
    x = np.asarray(x, dtype=np.float64) if not isinstance(x, float) else x
    return x, np.zeros_like(x) if isinstance(x, np.ndarray) else 0.0


def to_float(a):
    """Round a pair to the nearest binary64 (a single addition suffices)."""
    return a[0] + a[1]


def neg(a):
    return -a[0], -a[1]


def absolute(a):
    """Magnitude; the sign of the pair is the sign of hi."""
    flip = np.signbit(a[0])
    return np.where(flip, -a[0], a[0]), np.where(flip, -a[1], a[1])


def add(a, b):
    """Accurate pair addition, worst-case relative error ~2^-105."""
    s, e = two_sum(a[0], b[0])
    t, f = two_sum(a[1], b[1])
    e = e + t
    s, e = fast_two_sum(s, e)
    e = e + f
    return fast_two_sum(s, e)


def sub(a, b):
    return add(a, neg(b))


def mul(a, b):
    p, e = two_prod(a[0], b[0])
    e = e + (a[0] * b[1] + a[1] * b[0])
    return fast_two_sum(p, e)


def scale(a, s):
    """Multiply a pair by an exact binary64 scalar or array."""
    p, e = two_prod(a[0], s)
    e = e + a[1] * s
    return fast_two_sum(p, e)


def div(a, b):
    """Long division with two refinement steps, relative error ~2^-104."""
    q1 = a[0] / b[0]
    r = sub(a, scale(b, q1))
    q2 = r[0] / b[0]
    r = sub(r, scale(b, q2))
    q3 = r[0] / b[0]
    s, e = fast_two_sum(q1, q2)
    return add((s, e), (q3, np.zeros_like(q3) if isinstance(q3, np.ndarray) else 0.0))


def tree_sum(hi, lo):
    """Sum pairs along axis 0 by fixed pairwise halving.

    The reduction order depends only on the input length, so repeated calls
    are bitwise reproducible.  An odd count is padded with an exact zero.
    """
    while hi.shape[0] > 1:
        if hi.shape[0] % 2:
            pad = np.zeros((1,) + hi.shape[1:])
            hi = np.concatenate([hi, pad])
            lo = np.concatenate([lo, pad])
        hi, lo = add((hi[0::2], lo[0::2]), (hi[1::2], lo[1::2]))
    return hi[0], lo[0]


def matvec_t(mat_t, vec):
    """Pair matrix times pair vector, pairwise-tree accumulation per row.

    ``mat_t`` is a pair of (n, m) arrays holding the TRANSPOSED matrix, so
    the summation axis is already axis 0 and no copies are needed.  Every
    elementwise product is a full pair product; the row sums use
    ``tree_sum``.
    """
    ph, pl = mul((mat_t[0], mat_t[1]), (vec[0][:, None], vec[1][:, None]))
    return tree_sum(ph, pl)

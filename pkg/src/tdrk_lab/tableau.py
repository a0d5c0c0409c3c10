"""Two-derivative Runge-Kutta tableaus over exact rationals.

A step of an explicit two-derivative method with s stages reads

    y_i     = u + dt * sum_j a[i][j] F(y_j) + dt^2 * sum_j ad[i][j] Fd(y_j)
    u_next  = u + dt * sum_j b[j]    F(y_j) + dt^2 * sum_j bd[j]    Fd(y_j)

where F is the right-hand side and Fd its chain-rule time derivative.
All coefficients are kept as :class:`fractions.Fraction`, so the order
conditions below are decided exactly, not to a tolerance.

The perturbation order classifies how strongly an O(eps) error in the
second-derivative evaluations can leak into the update: schemes whose
``bd`` row vanishes push the leak one power of dt higher, and schemes
that additionally keep the weighted ``ad`` couplings out of the update
push it a second power.
"""

from dataclasses import dataclass, field
from fractions import Fraction

__all__ = [
    "TdrkTableau",
    "ConditionReport",
    "check_order_conditions",
    "check_perturbation_order",
    "stability_polynomial",
    "parse_tableau",
    "format_tableau",
]


def _frac(x):
    if isinstance(x, float):
        raise TypeError(f"tableau entries must be exact; got float {x!r}")
    return Fraction(x)


def _rows(mat):
    return tuple(tuple(_frac(x) for x in row) for row in mat)


@dataclass(frozen=True, init=False)
class TdrkTableau:
    """Coefficients (a, ad, b, bd) of one explicit scheme.

    Both matrices must be strictly lower triangular; the abscissae are
    the row sums of ``a`` and are derived, never supplied.
    """

    a: tuple
    ad: tuple
    b: tuple
    bd: tuple

    def __init__(self, a, ad, b, bd):
        object.__setattr__(self, "a", _rows(a))
        object.__setattr__(self, "ad", _rows(ad))
        object.__setattr__(self, "b", tuple(_frac(x) for x in b))
        object.__setattr__(self, "bd", tuple(_frac(x) for x in bd))
        s = len(self.b)
        for name, mat in (("a", self.a), ("ad", self.ad)):
            if len(mat) != s or any(len(row) != s for row in mat):
                raise ValueError(f"{name} must be {s}x{s}")
            for i, row in enumerate(mat):
                if any(row[j] != 0 for j in range(i, s)):
                    raise ValueError(
                        f"{name} must be strictly lower triangular (explicit)")
        if len(self.bd) != s:
            raise ValueError("b and bd must have equal length")

    @property
    def stages(self):
        return len(self.b)

    @property
    def c(self):
        """Abscissae c_i = sum_j a[i][j]."""
        return tuple(sum(row, Fraction(0)) for row in self.a)


@dataclass(frozen=True)
class ConditionReport:
    """Exact residuals of the algebraic conditions for one tableau."""

    order_residuals: dict = field(default_factory=dict)
    satisfied_order: int = 0
    perturbation_residuals: dict = field(default_factory=dict)
    perturbation_order: int = 1

    def lines(self):
        out = [f"order conditions (satisfied through order {self.satisfied_order}):"]
        for label, r in self.order_residuals.items():
            mark = "ok" if r == 0 else f"residual {r}"
            out.append(f"  {label:<28} {mark}")
        out.append(f"perturbation order m = {self.perturbation_order}:")
        for label, r in self.perturbation_residuals.items():
            mark = "ok" if r == 0 else f"residual {r}"
            out.append(f"  {label:<28} {mark}")
        return out

    def __str__(self):
        return "\n".join(self.lines())


def check_order_conditions(t):
    """Exact residuals of the order conditions through order three.

    Orders above three are not checked symbolically here; they are
    established empirically by convergence runs.
    """
    s = t.stages
    c = t.c
    one = Fraction(1)
    b_e = sum(t.b, Fraction(0))
    b_c = sum(t.b[j] * c[j] for j in range(s))
    bd_e = sum(t.bd, Fraction(0))
    bd_c = sum(t.bd[j] * c[j] for j in range(s))
    b_a_c = sum(t.a[i][j] * t.b[i] * c[j] for i in range(s) for j in range(s))
    b_ad_e = sum(t.b[i] * t.ad[i][j] for i in range(s) for j in range(s))
    b_c2 = sum(t.b[j] * c[j] * c[j] for j in range(s))

    residuals = {
        "order1: b.e - 1": b_e - one,
        "order2: b.c + bd.e - 1/2": b_c + bd_e - Fraction(1, 2),
        "order3: b.A.c + b.Ad.e + bd.c - 1/6":
            b_a_c + b_ad_e + bd_c - Fraction(1, 6),
        "order3: b.c^2 + 2 bd.c - 1/3": b_c2 + 2 * bd_c - Fraction(1, 3),
    }
    per_order = {1: ["order1: b.e - 1"],
                 2: ["order2: b.c + bd.e - 1/2"],
                 3: ["order3: b.A.c + b.Ad.e + bd.c - 1/6",
                     "order3: b.c^2 + 2 bd.c - 1/3"]}
    satisfied = 0
    for k in (1, 2, 3):
        if any(residuals[lbl] != 0 for lbl in per_order[k]):
            break
        satisfied = k

    pert = _perturbation_residuals(t)
    m = _perturbation_order(pert)
    return ConditionReport(residuals, satisfied, pert, m)


def _perturbation_residuals(t):
    s = t.stages
    c = t.c
    bd_abs = sum(abs(x) for x in t.bd)
    b_ad_abs = sum(abs(t.b[i]) * sum(abs(t.ad[i][j]) for j in range(s))
                   for i in range(s))
    bd_c_abs = sum(abs(t.bd[j]) * abs(c[j]) for j in range(s))
    return {
        "pert m>=2: |bd|.e = 0": bd_abs,
        "pert m>=3: |b|.|Ad|.e = 0": b_ad_abs,
        # Implied by |bd|.e = 0; reported for completeness.
        "pert m>=3: |bd|.|c| = 0 (redundant)": bd_c_abs,
    }


def _perturbation_order(pert):
    if pert["pert m>=2: |bd|.e = 0"] != 0:
        return 1
    if pert["pert m>=3: |b|.|Ad|.e = 0"] != 0:
        return 2
    return 3


def check_perturbation_order(t):
    """Largest m for which the low-precision error enters at O(eps dt^m)."""
    return _perturbation_order(_perturbation_residuals(t))


def _padd(p, q):
    n = max(len(p), len(q))
    p = p + [Fraction(0)] * (n - len(p))
    q = q + [Fraction(0)] * (n - len(q))
    return [x + y for x, y in zip(p, q)]


def _pshift_scale(p, k, c):
    """c * z^k * p(z)."""
    if c == 0:
        return []
    return [Fraction(0)] * k + [c * x for x in p]


def stability_polynomial(t):
    """Coefficients r_0..r_d of R(z) = u_next / u on u' = lambda*u, z = dt*lambda.

    For an explicit tableau the stage relations resolve by forward
    substitution, so R is a polynomial of degree at most 2s.  Trailing
    zero coefficients are trimmed; the zero tableau gives [1].
    """
    s = t.stages
    ys = []
    for i in range(s):
        p = [Fraction(1)]
        for j in range(i):
            p = _padd(p, _pshift_scale(ys[j], 1, t.a[i][j]))
            p = _padd(p, _pshift_scale(ys[j], 2, t.ad[i][j]))
        ys.append(p)
    r = [Fraction(1)]
    for j in range(s):
        r = _padd(r, _pshift_scale(ys[j], 1, t.b[j]))
        r = _padd(r, _pshift_scale(ys[j], 2, t.bd[j]))
    while len(r) > 1 and r[-1] == 0:
        r.pop()
    return r


def format_tableau(t):
    """Plain-text form: stage count, rows of a, rows of ad, b, bd.

    Entries are exact fractions ``p/q`` separated by spaces, one row per
    line; ``#`` starts a comment.
    """
    lines = [str(t.stages)]
    for mat in (t.a, t.ad):
        lines += [" ".join(str(x) for x in row) for row in mat]
    lines.append(" ".join(str(x) for x in t.b))
    lines.append(" ".join(str(x) for x in t.bd))
    return "\n".join(lines) + "\n"


def parse_tableau(text):
    """Inverse of :func:`format_tableau`; blank lines and comments allowed."""
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens += line.split()
    if not tokens:
        raise ValueError("empty tableau document")
    try:
        s = int(tokens[0])
    except ValueError:
        raise ValueError(f"stage count expected first, got {tokens[0]!r}") from None
    if s < 1:
        raise ValueError("stage count must be positive")
    need = 2 * s * s + 2 * s
    body = tokens[1:]
    if len(body) != need:
        raise ValueError(f"expected {need} coefficients for s={s}, got {len(body)}")
    try:
        vals = [Fraction(tok) for tok in body]
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad coefficient: {exc}") from None
    a = [vals[i * s:(i + 1) * s] for i in range(s)]
    ad = [vals[s * s + i * s:s * s + (i + 1) * s] for i in range(s)]
    b = vals[2 * s * s:2 * s * s + s]
    bd = vals[2 * s * s + s:]
    return TdrkTableau(a, ad, b, bd)

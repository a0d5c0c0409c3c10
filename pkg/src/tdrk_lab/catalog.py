"""The built-in family of explicit two-derivative schemes.

Naming: ``TDRK<s>s<p>p<m>e`` encodes stage count s, classical order p,
and perturbation order m (the power of dt multiplying the low-precision
error bound).  The p1e members are the economical schemes of Chan & Tsai
(Numer. Algorithms 53, 2010), which spend the second derivative freely in
the update; their siblings here trade stages or order for m >= 2 by
keeping the update row ``bd`` at zero.

Order conditions through order three and the stated perturbation order
are verified exactly at import time, so a corrupted coefficient fails
fast rather than producing a quietly wrong integrator.
"""

from dataclasses import dataclass
from fractions import Fraction as F

from .tableau import (
    TdrkTableau,
    check_order_conditions,
    check_perturbation_order,
)

__all__ = ["MethodCard", "METHODS", "get_method", "list_methods"]


@dataclass(frozen=True)
class MethodCard:
    """One catalog entry: tableau plus its claimed orders and lineage."""

    name: str
    tableau: TdrkTableau
    claimed_p: int
    claimed_m: int
    source: str

    def __post_init__(self):
        report = check_order_conditions(self.tableau)
        if report.satisfied_order < min(self.claimed_p, 3):
            raise ValueError(
                f"{self.name}: order conditions fail at order "
                f"{report.satisfied_order + 1}")
        m = check_perturbation_order(self.tableau)
        if m != self.claimed_m:
            raise ValueError(f"{self.name}: perturbation order is {m}, "
                             f"card claims {self.claimed_m}")


_CHAN_TSAI = "Chan & Tsai (2010)"
_HERE = "this catalog"


def _card(name, p, m, source, a, ad, b, bd):
    return MethodCard(name, TdrkTableau(a, ad, b, bd), p, m, source)


METHODS = {card.name: card for card in [
    _card("TDRK2s3p1e", 3, 1, _CHAN_TSAI,
          a=[[0, 0], [1, 0]],
          ad=[[0, 0], [F(1, 2), 0]],
          b=[1, 0],
          bd=[F(1, 3), F(1, 6)]),
    _card("TDRK2s3p2e", 3, 2, _HERE,
          a=[[0, 0], [F(2, 3), 0]],
          ad=[[0, 0], [F(2, 9), 0]],
          b=[F(1, 4), F(3, 4)],
          bd=[0, 0]),
    _card("TDRK3s3p3e", 3, 3, _HERE,
          a=[[0, 0, 0], [F(2, 3), 0, 0], [F(1, 3), F(1, 3), 0]],
          ad=[[0, 0, 0], [F(2, 9), 0, 0], [0, 0, 0]],
          b=[F(1, 4), 0, F(3, 4)],
          bd=[0, 0, 0]),
    _card("TDRK2s4p1e", 4, 1, _CHAN_TSAI,
          a=[[0, 0], [F(1, 2), 0]],
          ad=[[0, 0], [F(1, 8), 0]],
          b=[1, 0],
          bd=[F(1, 6), F(1, 3)]),
    _card("TDRK3s4p2e", 4, 2, _HERE,
          a=[[0, 0, 0], [F(1, 2), 0, 0], [1, 0, 0]],
          ad=[[0, 0, 0], [F(1, 8), 0, 0], [0, F(1, 2), 0]],
          b=[F(1, 6), F(2, 3), F(1, 6)],
          bd=[0, 0, 0]),
    _card("TDRK3s5p1e", 5, 1, _CHAN_TSAI,
          a=[[0, 0, 0], [F(1, 3), 0, 0], [F(4, 5), 0, 0]],
          ad=[[0, 0, 0], [F(1, 18), 0, 0], [F(-2, 125), F(42, 125), 0]],
          b=[1, 0, 0],
          bd=[F(5, 48), F(9, 28), F(25, 336)]),
    _card("TDRK4s6p1e", 6, 1, _CHAN_TSAI,
          a=[[0, 0, 0, 0], [F(1, 4), 0, 0, 0], [F(2, 3), 0, 0, 0],
             [1, 0, 0, 0]],
          ad=[[0, 0, 0, 0], [F(1, 32), 0, 0, 0],
              [F(-2, 81), F(20, 81), 0, 0],
              [F(5, 4), F(-6, 5), F(9, 20), 0]],
          b=[1, 0, 0, 0],
          bd=[F(3, 40), F(64, 225), F(27, 200), F(1, 180)]),
]}


def list_methods():
    """Catalog names, third order first, then by increasing order."""
    return list(METHODS)


def get_method(name):
    """Look up a catalog entry by name, case-insensitively."""
    if name in METHODS:
        return METHODS[name]
    folded = {k.lower(): v for k, v in METHODS.items()}
    try:
        return folded[str(name).lower()]
    except KeyError:
        raise KeyError(
            f"unknown method {name!r}; available: {', '.join(METHODS)}"
        ) from None

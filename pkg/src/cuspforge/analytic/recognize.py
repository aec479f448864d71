"""Rational recognition of real intervals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath as mp


def to_fraction(x) -> Fraction:
    """Exact value of a binary float (mpf or float) or a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    x = mp.mpf(x)
    if not mp.isfinite(x):
        raise ValueError("cannot convert a non-finite value")
    man, exp = x.man_exp
    out = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return -out if x < 0 else out


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational with the smallest denominator in [lo, hi] (Stern-Brocot descent)."""
    if lo > hi:
        lo, hi = hi, lo
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -simplest_between(-hi, -lo)
    fl = lo.numerator // lo.denominator
    if Fraction(fl) == lo:
        return lo
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    # lo and hi share the integer part fl
    rest = simplest_between(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / rest


@dataclass(frozen=True)
class Recognition:
    status: str  # "rational", "none" or "indeterminate"
    value: Optional[Fraction] = None

    def __bool__(self) -> bool:
        return self.status == "rational"

    def to_json(self) -> dict:
        return {"status": self.status, "value": None if self.value is None else str(self.value)}


def rational_recognize(center, radius, den_bound: int) -> Recognition:
    """The rational p/q with q <= den_bound inside [center - radius, center + radius].

    "none" is certified whenever no such rational exists.  A hit is only reported
    when the interval is narrow enough (width < 1/(2 den_bound^2)) to make it unique.
    """
    c = to_fraction(center)
    r = abs(to_fraction(radius))
    lo, hi = c - r, c + r
    best = simplest_between(lo, hi)
    if best.denominator > den_bound:
        return Recognition("none")
    if 2 * r >= Fraction(1, 2 * den_bound * den_bound):
        return Recognition("indeterminate")
    return Recognition("rational", best)

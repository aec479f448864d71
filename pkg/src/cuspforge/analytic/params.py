"""Truncation parameters and the (value, error) pair every estimator returns."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, replace

import mpmath as mp

DEFAULT_BITS = 256


def default_bits() -> int:
    raw = os.environ.get("CUSPFORGE_BITS")
    return int(raw) if raw else DEFAULT_BITS


@dataclass(frozen=True)
class TruncationParams:
    c_max: int = 200
    r_max: int = 20
    s: float = 1.5
    eps: float = 1e-3
    quad_steps: int = 2048
    precision: int = 0  # bits; 0 means CUSPFORGE_BITS or 256

    def __post_init__(self):
        if self.precision == 0:
            object.__setattr__(self, "precision", default_bits())
        bad = [k for k, v in asdict(self).items() if v <= 0 and k != "c_max"]
        if self.c_max < 0:
            bad.append("c_max")
        if bad:
            raise ValueError(f"parameters must be positive: {bad}")
        if self.s <= 1:
            raise ValueError("s must exceed 1")

    def refined(self, **changes) -> "TruncationParams":
        return replace(self, **changes)

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Estimate:
    value: object  # mpf or mpc
    error: object  # nonnegative mpf

    @property
    def real(self) -> "Estimate":
        return Estimate(mp.re(self.value), self.error)

    @property
    def imag(self) -> "Estimate":
        return Estimate(mp.im(self.value), self.error)

    def __add__(self, other: "Estimate") -> "Estimate":
        return Estimate(self.value + other.value, self.error + other.error)

    def __sub__(self, other: "Estimate") -> "Estimate":
        return Estimate(self.value - other.value, self.error + other.error)

    def scale(self, c) -> "Estimate":
        return Estimate(self.value * c, self.error * abs(c))

    def contains(self, x) -> bool:
        return abs(self.value - x) <= self.error

    def to_json(self, digits: int = 15) -> dict:
        v = self.value
        if isinstance(v, mp.mpc):
            val = [mp.nstr(v.real, digits), mp.nstr(v.imag, digits)]
        else:
            val = mp.nstr(v, digits)
        return {"value": val, "error_estimate": mp.nstr(self.error, 3)}

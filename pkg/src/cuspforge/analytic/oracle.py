"""Periods of dlog of Fermat modular units along the geodesics xi+(g), xi-(g).

x = lambda^(1/N) and y = (1 - lambda)^(1/N) are taken as single-valued functions on
the upper half-plane, fixed by log lambda(i) = i pi and log(1 - lambda(i)) = log 2.
For g in Gamma(2) with image (a, b) in (Z/N)^2 one has x(gz) = zeta^(a+b) x(z) and
y(gz) = zeta^b y(z), so every period is computed on the two fixed geodesics through i
(from 1 to -1 for side plus, from 0 to infinity for side minus) with twisted roots.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath as mp

from ..dessin import Cusp, Dessin
from ..gamma2 import Mat2, abelianization_mod
from ..homology import CuspDivisor
from .lam import lambda_pair
from .params import Estimate, TruncationParams

FAMILIES = ("x_minus_zeta", "y_minus_zeta", "x_minus_eps_zeta_y", "lambda_itself")


@dataclass(frozen=True)
class UnitSpec:
    family: str
    j: int
    level: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown unit family {self.family!r}")
        if self.level < 1 or not 0 <= self.j < self.level:
            raise ValueError("unit index out of range")

    def __str__(self) -> str:
        return f"{self.family}[{self.j}]/N={self.level}"


# a unit is a product of basic units with integer exponents
UnitProduct = Sequence[tuple[UnitSpec, int]]


def unit_divisor(unit: UnitProduct, d: Dessin) -> CuspDivisor:
    """Divisor of the unit on the Fermat dessin, in true (geometric) position."""
    from ..cuspidal import fermat_labels

    out: dict = {}
    for spec, e in unit:
        n = spec.level
        if n * n != d.n:
            raise ValueError(f"unit of level {n} on a dessin with {d.n} cosets")
        lab = fermat_labels(n, "geometric")
        terms = {}
        if spec.family == "lambda_itself":
            for k in range(n):
                terms[lab["a", k]] = terms.get(lab["a", k], 0) + n
                terms[lab["c", k]] = terms.get(lab["c", k], 0) - n
        else:
            letter = {"x_minus_zeta": "b", "y_minus_zeta": "a", "x_minus_eps_zeta_y": "c"}[spec.family]
            for k in range(n):
                terms[lab["c", k]] = terms.get(lab["c", k], 0) - 1
            terms[lab[letter, spec.j]] = terms.get(lab[letter, spec.j], 0) + n
        for c, v in terms.items():
            out[c] = out.get(c, 0) + e * v
    return CuspDivisor(out)


def _basic_value(spec: UnitSpec, lp, lq, cx, cy):
    n = spec.level
    if spec.family == "lambda_itself":
        return mp.exp(lp)
    zeta_j = mp.expjpi(mp.mpf(2 * spec.j) / n)
    x = cx * mp.exp(lp / n)
    if spec.family == "x_minus_zeta":
        return x - zeta_j
    y = cy * mp.exp(lq / n)
    if spec.family == "y_minus_zeta":
        return y - zeta_j
    return x - mp.expjpi(mp.mpf(1) / n) * zeta_j * y


def unit_eval(spec: UnitSpec, z, branch=None):
    """Value of a basic unit at z; branch = (log lambda, log(1 - lambda)) fixes the roots.

    Without a branch the principal logarithms are used, which is only meaningful
    locally; path computations go through GeodesicTrack instead.
    """
    if branch is None:
        p, q = lambda_pair(z)
        branch = (mp.log(p), mp.log(q))
    return _basic_value(spec, branch[0], branch[1], mp.mpf(1), mp.mpf(1))


class GeodesicTrack:
    """Continuous determinations of log lambda and log(1 - lambda) on a geodesic through i.

    Nodes are the hyperbolic arclength parameters s in [-S, S]; the base grid is refined
    wherever the argument of lambda or 1 - lambda jumps by more than max_turn.
    """

    def __init__(self, side: str, S, steps: int, max_turn: float = 0.5, max_depth: int = 30):
        if side not in ("plus", "minus"):
            raise ValueError("side must be plus or minus")
        self.side = side
        self.max_turn = mp.mpf(max_turn)
        self.max_depth = max_depth
        grid = [-S + 2 * S * mp.mpf(k) / steps for k in range(steps + 1)]
        mid = steps // 2
        grid[mid] = mp.mpf(0)
        self.nodes: list = []
        self.logs: list = []
        # track outward from s = 0 where the anchor is known
        right = self._track(grid[mid:], (1j * mp.pi, mp.log(2)))
        left = self._track(grid[mid::-1], (1j * mp.pi, mp.log(2)))
        for s, v in reversed(left[1:]):
            self.nodes.append(s)
            self.logs.append(v)
        for s, v in right:
            self.nodes.append(s)
            self.logs.append(v)

    def point(self, s):
        t = 1j * mp.exp(s)
        return (t + 1) / (1 - t) if self.side == "plus" else t

    def _raw(self, s):
        p, q = lambda_pair(self.point(s))
        return mp.log(p), mp.log(q)

    @staticmethod
    def _align(raw, prev):
        out = []
        for r, p in zip(raw, prev):
            out.append(r + 2j * mp.pi * mp.nint(mp.im(p - r) / (2 * mp.pi)))
        return tuple(out)

    def _track(self, grid, anchor):
        out = [(grid[0], self._align(self._raw(grid[0]), anchor))]
        for s in grid[1:]:
            self._advance(out, s, 0)
        return out

    def _advance(self, out, s, depth):
        s0, prev = out[-1]
        cur = self._align(self._raw(s), prev)
        turn = max(abs(mp.im(c - p)) for c, p in zip(cur, prev))
        if turn > self.max_turn:
            if depth >= self.max_depth:
                raise RuntimeError("branch tracking step too large even after refinement")
            self._advance(out, (s0 + s) / 2, depth + 1)
            self._advance(out, s, depth + 1)
            return
        out.append((s, cur))

    def log_change(self, unit: UnitProduct, cx, cy):
        """Change of a continuous log of the unit from the first to the last node."""
        total = mp.mpc(0)
        prev = None
        first = None
        for lp, lq in self.logs:
            val = mp.mpc(1)
            for spec, e in unit:
                val *= _basic_value(spec, lp, lq, cx, cy) ** e
            lv = mp.log(val)
            if prev is not None:
                lv += 2j * mp.pi * mp.nint(mp.im(prev - lv) / (2 * mp.pi))
                if abs(mp.im(lv - prev)) > 1.5:
                    # a jump this large means the unit turns faster than the lambda grid
                    raise RuntimeError("unit argument changes too fast for the node spacing")
            else:
                first = lv
            prev = lv
        return prev - first


_TRACK_CACHE: dict = {}


def geodesic_track(side: str, eps, steps: int, prec: int) -> GeodesicTrack:
    key = (side, mp.nstr(mp.mpf(eps), 20), steps, prec)
    if key not in _TRACK_CACHE:
        with mp.workprec(prec):
            _TRACK_CACHE[key] = GeodesicTrack(side, -mp.log(mp.mpf(eps)), steps)
    return _TRACK_CACHE[key]


def _characters(unit: UnitProduct, g: Mat2):
    levels = {spec.level for spec, _ in unit}
    if len(levels) != 1:
        raise ValueError("all factors of a unit must share the level N")
    n = levels.pop()
    a, b = abelianization_mod(g, n)
    return n, mp.expjpi(mp.mpf(2 * (a + b)) / n), mp.expjpi(mp.mpf(2 * b) / n)


def _check_support(unit: UnitProduct, d: Dessin, side: str) -> None:
    div = unit_divisor(unit, d)
    bad = [c for c in div.coeffs if (c.kind == "one") == (side == "plus")]
    if bad:
        raise ValueError(
            f"unit divisor meets the endpoints of the side {side} paths at {', '.join(map(str, bad))}"
        )


def contour_F(unit: UnitProduct, d: Dessin, g: Mat2, side: str, params: TruncationParams) -> Estimate:
    """(1/(2 pi i N)) times the integral of dlog(unit) along g(1) -> g(-1) (plus) or g0 -> g inf (minus).

    The endpoints sit at hyperbolic distance log(1/eps) from i; the value at eps/2 is
    reported with the change from eps as error estimate (the approach to a cusp is
    super-exponentially fast, so this difference is tiny once eps is small).
    """
    unit = [(u, int(e)) for u, e in unit if e]
    if not unit:
        return Estimate(mp.mpc(0), mp.mpf(0))
    _check_support(unit, d, side)
    with mp.workprec(params.precision):
        n, cx, cy = _characters(unit, g)
        vals = []
        for eps in (params.eps, params.eps / 2):
            tr = geodesic_track(side, eps, params.quad_steps, params.precision)
            vals.append(tr.log_change(unit, cx, cy) / (2j * mp.pi * n))
        err = abs(vals[1] - vals[0]) + mp.mpf(2) ** (-params.precision // 2)
        return Estimate(vals[1], err)


def unit_for_divisor(n: int, div: CuspDivisor, side: str) -> tuple[list, int]:
    """A unit u and an integer k with div(u) = k N D, D given on cusps of the Fermat dessin.

    Side plus: D on cusps over 0 and infinity, built from (y - zeta^j)/(x - eps zeta^k y).
    Side minus: D on cusps over 1, built from (x - zeta^j)/(x - zeta^k).
    """
    from ..cuspidal import fermat_labels

    geo = fermat_labels(n, "geometric")
    where = {c: key for key, c in geo.items()}
    denom = 1
    for v in div.coeffs.values():
        denom = denom * Fraction(v).denominator // __import__("math").gcd(denom, Fraction(v).denominator)
    if div.degree != 0:
        raise ValueError("divisor must have degree 0")
    terms: dict = {}
    fam = {"a": "y_minus_zeta", "c": "x_minus_eps_zeta_y", "b": "x_minus_zeta"}
    for c, v in div.coeffs.items():
        letter, j = where[c]
        if (letter == "b") != (side == "minus"):
            raise ValueError(f"cusp {c} does not belong to the side {side} boundary")
        spec = UnitSpec(fam[letter], j, n)
        terms[spec] = terms.get(spec, 0) + int(Fraction(v) * denom)
    # each basic unit has divisor N(point) - sum c; degree zero makes the pole parts cancel
    # on side plus; on side minus the x - zeta^j poles cancel the same way
    return [(s, e) for s, e in sorted(terms.items(), key=lambda t: (t[0].family, t[0].j)) if e], denom


def oracle_F(n: int, d: Dessin, div: CuspDivisor, g: Mat2, side: str, params: TruncationParams) -> Estimate:
    """F_D(g) for a rational degree-0 divisor D on the Fermat dessin."""
    unit, k = unit_for_divisor(n, div, side)
    est = contour_F(unit, d, g, side, params)
    return est.scale(mp.mpf(1) / k)

"""Truncated Kloosterman zeta functions and the estimators built from them.

For cusps j, k the scaling matrix is sigma_j = g_j diag(sqrt h_j, 1/sqrt h_j) where
g_j in SL2(Z) sends infinity to a representative of j and h_j is the SL2(Z) width.
Writing sigma_j^-1 sigma sigma_k = (* *; c d) with M = g_j^-1 sigma g_k = (* *; c' d')
gives c = c' sqrt(h_j h_k) and d/c = d'/(c' h_k), so

    phi_{jk,r}(s) = sum over double cosets of exp(2 pi i r d'/(c' h_k)) / (c'^2 h_j h_k)^s.

Double cosets with c' > 0 are the triples (c', d' mod h_k c', a mod h_j c'); the scan
runs over coprime (c', d') with c' <= c_max and tests the h_j lifts T^t M0 for
membership in g_j^-1 Gamma g_k.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from ..dessin import Cusp, Dessin
from ..gamma2 import GEN_A, IDENTITY, MAT_S, MAT_T, Mat2, decompose_ab, is_gamma2
from ..homology import CuspDivisor
from .params import Estimate, TruncationParams

KIND_MATRIX = {"inf": IDENTITY, "zero": MAT_S, "one": Mat2(1, -1, 1, 0)}


@dataclass(frozen=True)
class CuspScaling:
    cusp: Cusp
    g: Mat2  # g(infinity) represents the cusp
    width: int  # smallest h with g T^h g^-1 in Gamma

    def to_json(self) -> dict:
        return {"cusp": str(self.cusp), "g": self.g.as_list(), "width": self.width}


def _coset(d: Dessin, m: Mat2) -> int:
    return 0 if d.n == 1 else d.coset_of(m)


def cusp_scaling(d: Dessin, cusp: Cusp) -> CuspScaling:
    g = d.coset_reps[cusp.rep] @ KIND_MATRIX[cusp.kind]
    ginv = g.inverse()
    h = 1
    while True:
        m = g @ (MAT_T ** h) @ ginv
        if is_gamma2(m) and _coset(d, m) == 0:
            return CuspScaling(cusp, g, h)
        h += 1
        if h > 2 * d.n + 2:
            raise RuntimeError(f"no width found for cusp {cusp}")


def _lift(c: int, dd: int) -> Mat2:
    # a dd - b c = 1
    g, x, y = _ext_gcd(dd, c)
    return Mat2(x, -y, c, dd)


def _ext_gcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


@dataclass
class DoubleCosetTable:
    """Admissible (c', d') pairs with multiplicity (number of admissible lifts)."""

    sj: CuspScaling
    sk: CuspScaling
    c_max: int
    terms: dict  # c' -> list of (d', multiplicity)

    def count(self) -> int:
        return sum(m for lst in self.terms.values() for _, m in lst)


_TABLES: dict = {}


def double_coset_table(d: Dessin, j: Cusp, k: Cusp, c_max: int) -> DoubleCosetTable:
    key = (d.n, d.piA, d.piB, j, k)
    cached = _TABLES.get(key)
    if cached is not None and cached.c_max >= c_max:
        return DoubleCosetTable(cached.sj, cached.sk, c_max, {c: v for c, v in cached.terms.items() if c <= c_max})
    sj, sk = cusp_scaling(d, j), cusp_scaling(d, k)
    gj, gk_inv = sj.g, sk.g.inverse()
    hj, hk = sj.width, sk.width
    y = gj @ GEN_A @ gj.inverse()
    powers = [IDENTITY]
    for _ in range(hj // 2 - 1):
        powers.append(powers[-1] @ y)
    # Gamma y^u for u < h_j/2, and the coset map X -> Gamma X^-1
    y_cosets = [_coset(d, p) for p in powers]
    t_mat = gj @ MAT_T @ gj.inverse()
    terms: dict = {}
    start = cached.c_max + 1 if cached is not None else 1
    if cached is not None:
        terms.update(cached.terms)
    for c in range(start, c_max + 1):
        row = []
        for dd in range(hk * c):
            if math.gcd(c, dd) != 1:
                continue
            x = gj @ _lift(c, dd) @ gk_inv
            if not is_gamma2(x):
                x = t_mat @ x
                if not is_gamma2(x):
                    continue
            target = _coset(d, x.inverse())
            mult = sum(1 for cu in y_cosets if cu == target)
            if mult:
                row.append((dd, mult))
        if row:
            terms[c] = row
    table = DoubleCosetTable(sj, sk, c_max, terms)
    _TABLES[key] = table
    return table


def _phi_partial(table: DoubleCosetTable, r: int, s, c_lo: int = 1):
    hj, hk = table.sj.width, table.sk.width
    total = mp.mpc(0)
    for c in sorted(table.terms):
        if c < c_lo:
            continue
        if r == 0:
            inner = sum(m for _, m in table.terms[c])
        else:
            inner = sum(m * cmath.exp(2j * math.pi * r * dd / (c * hk)) for dd, m in table.terms[c])
        total += mp.mpc(inner) * mp.power(mp.mpf(c * c * hj * hk), -s)
    return total


def _tail(table: DoubleCosetTable, s) -> mp.mpf:
    """Heuristic size of the omitted terms c' > c_max from the density of the upper half."""
    cm = table.c_max
    if cm < 2:
        return mp.inf
    hj, hk = table.sj.width, table.sk.width
    lo = cm // 2 + 1
    count = sum(m for c, lst in table.terms.items() if c >= lo for _, m in lst)
    weight = sum(c for c in range(lo, cm + 1))
    rho = mp.mpf(count) / weight
    return rho * mp.power(hj * hk, -s) * mp.power(cm, 2 - 2 * s) / (2 * s - 2)


def phi_truncated(d: Dessin, j: Cusp, k: Cusp, r: int, s, c_max: int) -> Estimate:
    """Partial sum of phi_{jk,r}(s) over c' <= c_max, with a tail heuristic as error."""
    s = mp.mpf(s)
    if s <= 1 and r == 0:
        raise ValueError("phi_{jk,0}(s) needs s > 1")
    if c_max <= 0:
        return Estimate(mp.mpc(0), mp.inf if c_max == 0 else mp.mpf(0))
    table = double_coset_table(d, j, k, c_max)
    val = _phi_partial(table, r, s)
    if r == 0:
        val = mp.re(val)
    return Estimate(val, _tail(table, s) if s > 1 else _tail(table, mp.mpf(1) + mp.mpf(1) / 8))


def _check_divisor_at(d: Dessin, div: CuspDivisor, x_cusp: Cusp | None) -> None:
    if div.degree != 0:
        raise ValueError("divisor must have degree 0")
    if x_cusp is not None and div.coeffs.get(x_cusp, 0) != 0:
        raise ValueError(f"divisor has a nonzero coefficient at the evaluation cusp {x_cusp}")


def cusp_of_rational(d: Dessin, x) -> Cusp:
    """Cusp of X_Gamma containing the rational x (None for infinity)."""
    if x is None:
        return d.cusp_at(0, "inf")
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    # complete (p; q) to a matrix g with g(inf) = x, then split g = gamma t
    gc, u, v = _ext_gcd(p, q)
    g = Mat2(p, -v, q, u)
    from ..homology import TRANSVERSAL, split_sl2

    gamma, t = split_sl2(g)
    point = TRANSVERSAL[t].act(None)
    kind = {None: "inf"}.get(point, None) or {0: "zero", 1: "one"}[int(point)]
    i = 0 if d.n == 1 else d.apply_word(0, decompose_ab(gamma))
    return d.cusp_at(i, kind)


def phi_series(d: Dessin, j: Cusp, k: Cusp, r_max: int, s, c_max: int) -> tuple[np.ndarray, np.ndarray]:
    """phi_{jk,r}(s) for r = 1..r_max at once, in double precision.

    Returns (values, errors). For s > 1 the error is the tail heuristic; at s = 1 the
    c-sum is only conditionally convergent and the error is the change from c_max/2.
    """
    s = float(s)
    if s < 1:
        raise ValueError("s must be >= 1")
    table = double_coset_table(d, j, k, c_max)
    hj, hk = table.sj.width, table.sk.width
    cs = np.array([c for c, lst in table.terms.items() for _ in lst], dtype=float)
    dds = np.array([dd for lst in table.terms.values() for dd, _ in lst], dtype=float)
    mult = np.array([m for lst in table.terms.values() for _, m in lst], dtype=float)
    weight = mult / (cs * cs * hj * hk) ** s
    rs = np.arange(1, r_max + 1, dtype=float)
    phase = np.exp(2j * np.pi * np.outer(rs, dds / (cs * hk)))
    vals = phase @ weight
    if s > 1:
        errs = np.full(r_max, float(_tail(table, mp.mpf(s))))
    else:
        half = phase[:, cs <= c_max // 2] @ weight[cs <= c_max // 2]
        errs = np.abs(vals - half)
    return vals, errs


def sD_estimate(d: Dessin, div: CuspDivisor, x, params: TruncationParams, s=1) -> Estimate:
    """Boundary primitive of the weight-two Eisenstein series attached to D, read at x.

        S(x) = (m_inf / h) x + 2 pi i sum_j m_j sum_{1 <= r <= r_max} phi_{j inf, r}(s) q^r,
        q = exp(2 pi i (x + i eps) / h),  h = width of the cusp at infinity,

    so that S(g(-1)) - S(g(1)) is the period of the series over {g(1), g(-1)}. The
    boundary value is s = 1; larger s gives a smoothed family for stability checks.
    Values at eps and eps/2 are linearly extrapolated to eps = 0.
    """
    _check_divisor_at(d, div, cusp_of_rational(d, x))
    if not div.coeffs or x is None:
        # at infinity q -> 0 and m_inf = 0, so both parts vanish
        return Estimate(mp.mpc(0), mp.mpf(0))
    xf = Fraction(x)
    inf = d.cusp_at(0, "inf")
    h = cusp_scaling(d, inf).width
    series = np.zeros(params.r_max, dtype=complex)
    errs = np.zeros(params.r_max)
    for j, m in div.coeffs.items():
        v, e = phi_series(d, j, inf, params.r_max, s, params.c_max)
        series += float(m) * v
        errs += abs(float(m)) * e
    rs = np.arange(1, params.r_max + 1)
    x0 = xf.numerator / xf.denominator

    def at(eps):
        q = np.exp(2j * np.pi * rs * complex(x0, eps) / h)
        return complex(series @ q), float(errs @ np.abs(q))

    (v1, e1), (v2, e2) = at(params.eps), at(params.eps / 2)
    # geometric bound for r > r_max at eps/2, with the last coefficient as size
    ratio = math.exp(-math.pi * params.eps / h)
    tail = abs(series[-1]) * ratio ** (params.r_max + 1) / (1 - ratio)
    lin = div.coeffs.get(inf, 0) * x0 / h
    val = lin + 2j * math.pi * (2 * v2 - v1)
    err = 2 * math.pi * (abs(v2 - v1) + max(e1, e2) + tail)
    with mp.workprec(params.precision):
        return Estimate(mp.mpc(val), mp.mpf(err))


def scholl_coefficient(d: Dessin, div: CuspDivisor, r: int, params: TruncationParams, misprint: bool = False) -> Estimate:
    """a_r = -4 pi^2 r sum_j m_j phi_{j inf, r}(s); with misprint=True the pi^s normalisation is used."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if div.degree != 0:
        raise ValueError("divisor must have degree 0")
    if not div.coeffs:
        return Estimate(mp.mpc(0), mp.mpf(0))
    inf = d.cusp_at(0, "inf")
    with mp.workprec(params.precision):
        s = mp.mpf(params.s)
        tot = Estimate(mp.mpc(0), mp.mpf(0))
        for j, m in div.coeffs.items():
            tot = tot + phi_truncated(d, j, inf, r, s, params.c_max).scale(m)
        factor = -4 * mp.pi ** 2 * r
        if misprint:
            factor *= mp.power(mp.pi, s - mp.mpf(1) / 2)
        return tot.scale(factor)


def scattering_difference(d: Dessin, j: Cusp, k1: Cusp, k2: Cusp, params: TruncationParams) -> Estimate:
    """C_{j,k1} - C_{j,k2} as the limit s -> 1 of pi (phi_{jk1,0}(s) - phi_{jk2,0}(s)).

    Evaluated at s = 1 + delta, 1 + delta/2, 1 + delta/4 with delta = params.s - 1 and
    extrapolated linearly in s - 1; the error adds the extrapolation step and the change
    of the extrapolated value between c_max/2 and c_max.
    """
    if k1 == k2:
        return Estimate(mp.mpf(0), mp.mpf(0))
    with mp.workprec(params.precision):
        delta = mp.mpf(params.s) - 1

        def extrapolated(cm):
            vals = []
            for s in (1 + delta, 1 + delta / 2, 1 + delta / 4):
                a = phi_truncated(d, j, k1, 0, s, cm).value
                b = phi_truncated(d, j, k2, 0, s, cm).value
                vals.append(mp.pi * (a - b))
            rich = 2 * vals[2] - vals[1]
            prev = 2 * vals[1] - vals[0]
            return rich, abs(rich - prev)

        v, e1 = extrapolated(params.c_max)
        w, _ = extrapolated(max(1, params.c_max // 2))
        return Estimate(v, e1 + abs(v - w))

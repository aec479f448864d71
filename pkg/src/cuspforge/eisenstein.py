"""Eisenstein cycles: exact ones for Fermat curves, torsion verdicts, full-curve assembly."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Optional, Sequence

import mpmath as mp

from .cuspidal import fermat_divisor, group_generated_mod_integers
from .dessin import Cusp, Dessin, from_fermat
from .gamma2 import MAT_U
from .homology import (
    CuspDivisor,
    ManinPresentation,
    SymbolVector,
    boundary_minus,
    boundary_plus,
    lambda_minus,
    lambda_plus,
    symbol_index,
)
from .linalg import free_coordinates, rank, saturation_basis, solve

MODES = ("calibrated", "paper_literal")
BOUNDARY_SIGN = -1  # boundary of the real part of E_D is -D


class OracleDisagreement(RuntimeError):
    pass


@dataclass(frozen=True)
class EisensteinCycle:
    divisor: CuspDivisor
    side: str
    mode: str
    real_part: SymbolVector
    imag_part: SymbolVector = field(default=None)

    def __post_init__(self):
        if self.imag_part is None:
            object.__setattr__(self, "imag_part", SymbolVector(self.side, {}))


@dataclass(frozen=True)
class TorsionVerdict:
    is_torsion: Optional[bool]  # None when indeterminate
    order: Optional[int]
    certificate: dict

    def to_json(self) -> dict:
        return {"is_torsion": self.is_torsion, "order": self.order, "certificate": self.certificate}


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


# -- boundary bookkeeping ------------------------------------------------------

def cycle_boundary(d: Dessin, cycle: EisensteinCycle) -> CuspDivisor:
    bd = boundary_plus if cycle.side == "plus" else boundary_minus
    return bd(d, cycle.real_part)


def boundary_check(d: Dessin, cycle: EisensteinCycle) -> str:
    bd = cycle_boundary(d, cycle).coeffs
    target = {c: Fraction(v) for c, v in cycle.divisor.coeffs.items()}
    if {c: Fraction(v) for c, v in bd.items()} == {c: -v for c, v in target.items()}:
        return "-D"
    if {c: Fraction(v) for c, v in bd.items()} == target:
        return "+D"
    return "FAIL"


# -- exact cycles ----------------------------------------------------------------

def calibrated_plus(d: Dessin, div: CuspDivisor) -> SymbolVector:
    """Side plus vector u(Gamma g0) + v(Gamma g inf) with boundary -D."""
    if any(c.kind == "one" for c in div.coeffs):
        raise ValueError("side plus cycles need a divisor on cusps over 0 and infinity")
    zeros = [ci.cusp for ci in d.cusp_table.by_kind["zero"]]
    infs = [ci.cusp for ci in d.cusp_table.by_kind["inf"]]
    unknown = {c: i for i, c in enumerate(zeros + infs)}
    rows, rhs = [], []
    for p in zeros + infs:
        row = [Fraction(0)] * len(unknown)
        sign = -1 if p.kind == "zero" else 1
        for g in range(d.n):
            if d.cusp_at(g, p.kind) == p:
                row[unknown[d.cusp_at(g, "zero")]] += sign
                row[unknown[d.cusp_at(g, "inf")]] += sign
        rows.append(row)
        rhs.append(-Fraction(div.coeffs.get(p, 0)))
    sol = solve(rows, rhs)
    if sol is None:
        raise ValueError("no separated cycle has boundary -D on this dessin")
    return SymbolVector(
        "plus",
        {g: sol[unknown[d.cusp_at(g, "zero")]] + sol[unknown[d.cusp_at(g, "inf")]] for g in range(d.n)},
    )


def calibrated_minus(d: Dessin, div: CuspDivisor) -> SymbolVector:
    """Side minus vector w(Gamma g1) with boundary -D and coefficient sum 0."""
    if any(c.kind != "one" for c in div.coeffs):
        raise ValueError("side minus cycles need a divisor on cusps over 1")
    ones = d.cusp_table.minus()
    unknown = {c: i for i, c in enumerate(ones)}
    rows, rhs = [], []
    for b in ones:
        row = [Fraction(0)] * len(ones)
        for g in range(d.n):
            if d.cusp_at(g, "one") == b:
                row[unknown[b]] += 1
            if d.cusp_at_minus_one(g) == b:
                row[unknown[d.cusp_at(g, "one")]] -= 1
        rows.append(row)
        rhs.append(-Fraction(div.coeffs.get(b, 0)))
    gauge = [Fraction(0)] * len(ones)
    for g in range(d.n):
        gauge[unknown[d.cusp_at(g, "one")]] += 1
    rows.append(gauge)
    rhs.append(Fraction(0))
    sol = solve(rows, rhs)
    if sol is None:
        raise ValueError("no cycle of the form w(Gamma g1) has boundary -D on this dessin")
    return SymbolVector("minus", {g: sol[unknown[d.cusp_at(g, "one")]] for g in range(d.n)})


def _check_indices(n: int, *idx: int) -> None:
    if any(not 0 <= i < n for i in idx):
        raise ValueError(f"cusp indices must lie in 0..{n - 1}")


def fermat_cycle_ac(n: int, j: int, k: int, mode: str = "calibrated", labeling: str = "combinatorial") -> EisensteinCycle:
    _check_indices(n, j, k)
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    d = from_fermat(n)
    div = fermat_divisor(n, {("a", j): 1}, labeling) - fermat_divisor(n, {("c", k): 1}, labeling)
    if mode == "calibrated":
        return EisensteinCycle(div, "plus", mode, calibrated_plus(d, div))
    a_j, c_k = fermat_divisor(n, {("a", j): 1}, labeling), fermat_divisor(n, {("c", k): 1}, labeling)
    (pa,), (pc,) = a_j.coeffs, c_k.coeffs
    coeffs: dict = {}
    for g in range(d.n):
        v = Fraction(0)
        if d.cusp_at(g, pa.kind) == pa and pa.kind == "zero":
            v += Fraction(1, n)
        if d.cusp_at(g, pc.kind) == pc and pc.kind == "inf":
            v -= Fraction(1, n)
        coeffs[g] = v
    return EisensteinCycle(div, "plus", mode, SymbolVector("plus", coeffs))


def fermat_cycle_bb(n: int, j: int, k: int, mode: str = "calibrated", labeling: str = "combinatorial") -> EisensteinCycle:
    _check_indices(n, j, k)
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    d = from_fermat(n)
    div = fermat_divisor(n, {("b", j): 1}, labeling) - fermat_divisor(n, {("b", k): 1}, labeling)
    if mode == "calibrated":
        return EisensteinCycle(div, "minus", mode, calibrated_minus(d, div))
    (bj,) = fermat_divisor(n, {("b", j): 1}, labeling).coeffs
    (bk,) = fermat_divisor(n, {("b", k): 1}, labeling).coeffs
    coeffs: dict = {}
    for g in range(d.n):
        one, minus_one = d.cusp_at(g, "one"), d.cusp_at_minus_one(g)
        v = Fraction(int(one == bj) - int(minus_one == bj) - int(one == bk) + int(minus_one == bk), 2 * n)
        coeffs[g] = v
    return EisensteinCycle(div, "minus", mode, SymbolVector("minus", coeffs))


def fermat_cycle(n: int, div: CuspDivisor, mode: str = "calibrated") -> EisensteinCycle:
    """Calibrated cycle for any degree 0 divisor supported on one side of the Fermat dessin."""
    if mode != "calibrated":
        raise ValueError("paper_literal cycles exist only for the basis divisors (a_j)-(c_k), (b_j)-(b_k)")
    d = from_fermat(n)
    kinds = {c.kind for c in div.coeffs}
    if not kinds or kinds <= {"zero", "inf"}:
        return EisensteinCycle(div, "plus", mode, calibrated_plus(d, div))
    if kinds == {"one"}:
        return EisensteinCycle(div, "minus", mode, calibrated_minus(d, div))
    raise ValueError("divisor mixes cusps over 1 with cusps over 0 or infinity; split it first")


def verify_with_oracle(n: int, cycle: EisensteinCycle, params, den_bound: int, tol: float, cosets=None) -> list[dict]:
    """Compare every coefficient with the numeric period and its rational recognition."""
    from .analytic.oracle import oracle_F
    from .analytic.recognize import rational_recognize

    d = from_fermat(n)
    rows = []
    for g in cosets if cosets is not None else range(d.n):
        est = oracle_F(n, d, cycle.divisor, d.coset_reps[g], cycle.side, params)
        exact = Fraction(cycle.real_part.coeffs.get(g, 0))
        rec = rational_recognize(mp.re(est.value), max(est.error, mp.mpf(tol) / 4), den_bound)
        ok = bool(rec) and rec.value == exact and abs(est.value - mp.mpf(exact.numerator) / exact.denominator) <= tol
        rows.append({"coset": g, "numeric": est, "recognized": rec, "exact": exact, "ok": ok})
    return rows


def checked_against_oracle(n: int, cycle: EisensteinCycle, params, den_bound: int, tol: float) -> list[dict]:
    rows = verify_with_oracle(n, cycle, params, den_bound, tol)
    bad = [r["coset"] for r in rows if not r["ok"]]
    if bad:
        raise OracleDisagreement(f"numeric periods disagree with the exact cycle at cosets {bad}")
    return rows


# -- lattices and torsion -------------------------------------------------------

def loop_rows(d: Dessin, side: str) -> list[list[int]]:
    if side == "plus":
        return [[int(x) for x in lambda_plus(d, j).to_list(d.n)] for j in d.cusp_table.minus()]
    return [[int(x) for x in lambda_minus(d, j).to_list(d.n)] for j in d.cusp_table.plus()]


def integral_modulo_loops(d: Dessin, vec: Sequence[Fraction], side: str, scale: int) -> bool:
    """True iff scale * (vec - vec[g] for a single coset g) lies in Z^n + Q.(loop span)."""
    rows = [r for r in loop_rows(d, side) if any(r)]
    v, r = saturation_basis(rows, d.n)
    for g in range(d.n):
        shifted = [scale * (Fraction(x) - Fraction(vec[g])) for x in vec]
        if all(Fraction(c).denominator == 1 for c in free_coordinates(shifted, v, r)):
            return True
    return False


def class_order(vec: Sequence[Fraction]) -> int:
    order = 1
    for x in vec:
        order = _lcm(order, Fraction(x).denominator)
    return order


def cycle_group(d: Dessin, cycles: Sequence[EisensteinCycle]):
    """Subgroup of (Q/Z)^n generated by the real parts."""
    return group_generated_mod_integers([c.real_part.to_list(d.n) for c in cycles])


def torsion_order(cycle: EisensteinCycle, n_cosets: int, den_bound: int = 10**6, tol=None) -> TorsionVerdict:
    """Exact input: always rational, so torsion iff the imaginary part vanishes."""
    vec = cycle.real_part.to_list(n_cosets)
    imag = cycle.imag_part.to_list(n_cosets)
    if any(x != 0 for x in imag):
        return TorsionVerdict(False, None, {"reason": "nonzero imaginary part"})
    order = class_order(vec)
    return TorsionVerdict(True, order, {"coefficients": [str(Fraction(x)) for x in vec]})


def torsion_order_numeric(values: Sequence, errors: Sequence, imag_bound, den_bound: int, tol) -> TorsionVerdict:
    """Interval input: recognise every coefficient; the imaginary part must be below tol."""
    from .analytic.recognize import rational_recognize

    recs = [rational_recognize(v, e, den_bound) for v, e in zip(values, errors)]
    widths = [2 * e for e in errors]
    cert = {"recognized": [r.to_json() for r in recs]}
    if any(w > tol for w in widths) or any(r.status == "indeterminate" for r in recs):
        return TorsionVerdict(None, None, {**cert, "reason": "intervals too wide"})
    if imag_bound > tol:
        return TorsionVerdict(False, None, {**cert, "reason": "imaginary part above tolerance"})
    if all(recs):
        return TorsionVerdict(True, class_order([r.value for r in recs]), cert)
    return TorsionVerdict(False, None, {**cert, "reason": "coefficient not recognised as rational"})


# -- imaginary parts -----------------------------------------------------------

@dataclass(frozen=True)
class ImaginaryPart:
    values: list  # Estimate per coset
    lambda_coords: list  # least squares coordinates on the loop classes
    residual: object  # norm of the component outside the loop span

    def norm(self):
        return max((abs(e.value) for e in self.values), default=mp.mpf(0))

    def error(self):
        return max((e.error for e in self.values), default=mp.mpf(0))


def imaginary_part_from_scattering(d: Dessin, div: CuspDivisor, side: str, diff: Callable) -> ImaginaryPart:
    """I_D from scattering constant differences diff(j, k1, k2) ~ C_{j,k1} - C_{j,k2}."""
    from .analytic.params import Estimate

    cache: dict = {}

    def cdiff(j, k1, k2):
        if (j, k1, k2) not in cache:
            cache[j, k1, k2] = diff(j, k1, k2)
        return cache[j, k1, k2]

    values = []
    for g in range(d.n):
        if side == "plus":
            k1, k2 = d.cusp_at_minus_one(g), d.cusp_at(g, "one")
        else:
            k1, k2 = d.cusp_at(g, "inf"), d.cusp_at(g, "zero")
        tot = Estimate(mp.mpf(0), mp.mpf(0))
        for j, m in div.coeffs.items():
            tot = tot + cdiff(j, k1, k2).scale(mp.pi * m)
        values.append(tot)
    basis: list = []
    for row in loop_rows(d, side):
        if rank(basis + [row]) > len(basis):  # the loop classes satisfy one relation
            basis.append(row)
    if basis:
        a = mp.matrix([[basis[i][g] for i in range(len(basis))] for g in range(d.n)])
        b = mp.matrix([v.value for v in values])
        if all(v.value == 0 for v in values):
            coords, res = [mp.mpf(0)] * len(basis), mp.mpf(0)
        else:
            x, res = mp.qr_solve(a, b)
            coords = [x[i] for i in range(len(basis))]
    else:
        coords, res = [], mp.norm(mp.matrix([v.value for v in values])) if values else mp.mpf(0)
    return ImaginaryPart(values, coords, res)


# -- full curve ------------------------------------------------------------------

def split_divisor(d: Dessin, div: CuspDivisor, base: Cusp | None = None) -> tuple[CuspDivisor, CuspDivisor]:
    """D = -E0 + E_inf with E0 on cusps over inf and 1, E_inf on cusps over 0 and 1."""
    if div.degree != 0:
        raise ValueError("split_divisor needs a degree 0 divisor")
    if base is None:
        base = d.cusp_table.minus()[0]
    if base.kind != "one":
        raise ValueError("base must be a cusp over 1")
    at_inf = {c: v for c, v in div.coeffs.items() if c.kind == "inf"}
    deg_inf = sum(at_inf.values(), Fraction(0))
    e0 = {c: -v for c, v in at_inf.items()}
    e0[base] = e0.get(base, 0) + deg_inf
    einf = {c: v for c, v in div.coeffs.items() if c.kind != "inf"}
    einf[base] = einf.get(base, 0) + deg_inf
    return CuspDivisor(e0), CuspDivisor(einf)


def transport_divisor(d: Dessin, conj: Dessin, div: CuspDivisor, kind_map: dict) -> CuspDivisor:
    """Move a divisor of X_Gamma to the conjugate dessin; kind_map says where each kind lands."""
    out: dict = {}
    for c, v in div.coeffs.items():
        target = conj.cusp_at(c.rep, kind_map[c.kind])
        out[target] = out.get(target, 0) + v
    return CuspDivisor(out)


def exact_plus_provider(conj: Dessin, div: CuspDivisor) -> list:
    return calibrated_plus(conj, div).to_list(conj.n)


def assemble_full_cycle(d: Dessin, div: CuspDivisor, provider: Callable = exact_plus_provider, base: Cusp | None = None) -> list:
    """E'_D = sum_g (F_{U^-1 E_inf}(U^-1 g) - F_{U E_0}(U g)) xi(g) over Gamma \\ SL2(Z)."""
    e0, einf = split_divisor(d, div, base)
    d1 = d.conjugate(MAT_U)  # U^-1 Gamma U
    d2 = d.conjugate(MAT_U.inverse())  # U Gamma U^-1
    f1 = provider(d1, transport_divisor(d, d1, einf, {"zero": "inf", "one": "zero"}))
    f2 = provider(d2, transport_divisor(d, d2, e0, {"inf": "zero", "one": "inf"}))
    out = [0] * (6 * d.n)
    for i in range(d.n):
        out[symbol_index(i, 2)] = f1[i]  # transversal element U
        out[symbol_index(i, 4)] = -f2[i]  # transversal element U^2
    return out


def full_boundary(p: ManinPresentation, vec: Sequence) -> CuspDivisor:
    out = {}
    for c, row in zip(p.cusps, p.boundary):
        out[c] = sum((x * y for x, y in zip(row, vec) if y), Fraction(0))
    return CuspDivisor(out)


def full_order(p: ManinPresentation, vec: Sequence[Fraction]) -> int:
    """Smallest k with k vec in Z^{6n} + Q.(Manin relations)."""
    v, r = saturation_basis(p.relations, p.size)
    return class_order(free_coordinates([Fraction(x) for x in vec], v, r))


def manin_drinfeld_check(p: ManinPresentation, values: Sequence, errors: Sequence | None = None, den_bound: int = 10**6, tol=1e-6) -> TorsionVerdict:
    """Reduce modulo the Manin relations and recognise the surviving coordinates."""
    from .analytic.recognize import rational_recognize

    red, piv = p._reduced
    free = [i for i in range(p.size) if i not in set(piv)]
    exact = errors is None and all(isinstance(x, (int, Fraction)) for x in values)
    if exact:
        vec = [Fraction(x) for x in values]
        return TorsionVerdict(True, full_order(p, vec), {"reduced": [str(x) for x in p.reduce(vec)]})
    errors = list(errors) if errors is not None else [mp.mpf(0)] * p.size
    vals = [mp.mpf(x) if not isinstance(x, Fraction) else mp.mpf(x.numerator) / x.denominator for x in values]
    reduced = list(vals)
    errs = list(errors)
    for row, pc in zip(red, piv):
        f, fe = reduced[pc], errs[pc]
        if f == 0 and fe == 0:
            continue
        for i in free:
            if row[i]:
                c = mp.mpf(row[i].numerator) / row[i].denominator
                reduced[i] -= f * c
                errs[i] += fe * abs(c)
    recs = [rational_recognize(reduced[i], errs[i], den_bound) for i in free]
    cert = {"free_coordinates": free, "recognized": [r.to_json() for r in recs]}
    if any(r.status == "indeterminate" for r in recs) or any(2 * errs[i] > tol for i in free):
        return TorsionVerdict(None, None, {**cert, "reason": "intervals too wide"})
    if all(recs):
        vec = [Fraction(0)] * p.size
        for i, r in zip(free, recs):
            vec[i] = r.value
        return TorsionVerdict(True, full_order(p, vec), cert)
    return TorsionVerdict(False, None, {**cert, "reason": "coordinate not recognised as rational"})

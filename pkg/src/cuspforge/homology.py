"""Relative homology of X_Gamma in the xi+/xi- symbol bases and the Manin presentation.

Side plus: xi+(g) is the class of the path from g0 to g-infinity, relative to the
cusps over 0 and infinity.  Side minus: xi-(g) is the path from g(-1) to g1,
relative to the cusps over 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

from .dessin import Cusp, Dessin
from .gamma2 import IDENTITY, MAT_S, MAT_U, Mat2, decompose_ab
from .linalg import nullspace, rank, reduce_mod_rowspace, rref

SIDES = ("plus", "minus")


@dataclass(frozen=True)
class SymbolVector:
    side: str
    coeffs: Mapping[int, object]  # coset -> scalar, zeros dropped

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValueError(f"side must be plus or minus, got {self.side!r}")
        object.__setattr__(self, "coeffs", {int(k): v for k, v in self.coeffs.items() if v != 0})

    @classmethod
    def basis(cls, side: str, g: int) -> "SymbolVector":
        return cls(side, {g: Fraction(1)})

    @classmethod
    def from_list(cls, side: str, values: Iterable) -> "SymbolVector":
        return cls(side, dict(enumerate(values)))

    def to_list(self, n: int) -> list:
        return [self.coeffs.get(i, Fraction(0)) for i in range(n)]

    def __add__(self, other: "SymbolVector") -> "SymbolVector":
        if other.side != self.side:
            raise ValueError("cannot add symbol vectors from different sides")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return SymbolVector(self.side, out)

    def __neg__(self) -> "SymbolVector":
        return SymbolVector(self.side, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "SymbolVector") -> "SymbolVector":
        return self + (-other)

    def scale(self, c) -> "SymbolVector":
        return SymbolVector(self.side, {k: c * v for k, v in self.coeffs.items()})

    def to_json(self) -> dict:
        return {"side": self.side, "coeffs": {str(k): str(Fraction(v)) for k, v in sorted(self.coeffs.items())}}

    @classmethod
    def from_json(cls, data: dict) -> "SymbolVector":
        return cls(data["side"], {int(k): Fraction(v) for k, v in data["coeffs"].items()})


@dataclass(frozen=True)
class CuspDivisor:
    coeffs: Mapping[Cusp, object]
    support: str = "all"  # "plus", "minus" or "all"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", {c: v for c, v in self.coeffs.items() if v != 0})

    @property
    def degree(self):
        return sum(self.coeffs.values(), Fraction(0))

    def __add__(self, other: "CuspDivisor") -> "CuspDivisor":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        sup = self.support if self.support == other.support else "all"
        return CuspDivisor(out, sup)

    def __neg__(self) -> "CuspDivisor":
        return CuspDivisor({k: -v for k, v in self.coeffs.items()}, self.support)

    def __sub__(self, other: "CuspDivisor") -> "CuspDivisor":
        return self + (-other)

    def restrict(self, kinds: Iterable[str]) -> "CuspDivisor":
        kinds = set(kinds)
        return CuspDivisor({c: v for c, v in self.coeffs.items() if c.kind in kinds}, "all")

    def to_json(self) -> dict:
        return {str(c): str(Fraction(v)) for c, v in sorted(self.coeffs.items())}


def _add(acc: dict, key, val) -> None:
    acc[key] = acc.get(key, 0) + val


def boundary_plus(d: Dessin, v: SymbolVector) -> CuspDivisor:
    if v.side != "plus":
        raise ValueError("boundary_plus needs a side plus vector")
    out: dict = {}
    for g, c in v.coeffs.items():
        _add(out, d.cusp_at(g, "inf"), c)
        _add(out, d.cusp_at(g, "zero"), -c)
    return CuspDivisor(out, "plus")


def boundary_minus(d: Dessin, v: SymbolVector) -> CuspDivisor:
    if v.side != "minus":
        raise ValueError("boundary_minus needs a side minus vector")
    out: dict = {}
    for g, c in v.coeffs.items():
        _add(out, d.cusp_at(g, "one"), c)
        _add(out, d.cusp_at_minus_one(g), -c)
    return CuspDivisor(out, "minus")


def lambda_minus(d: Dessin, j: Cusp) -> SymbolVector:
    """Loop around a cusp over 0 or infinity, as a side minus class."""
    if j.kind not in ("zero", "inf"):
        raise ValueError(f"lambda_minus needs a cusp over 0 or infinity, got {j}")
    orbit = d.cusp_table.info(j).orbit
    sign = -1 if j.kind == "inf" else 1
    out: dict = {}
    for g in orbit:
        _add(out, g, Fraction(sign))
    return SymbolVector("minus", out)


def lambda_plus(d: Dessin, j: Cusp) -> SymbolVector:
    """Loop around a cusp over 1, as a side plus class."""
    if j.kind != "one":
        raise ValueError(f"lambda_plus needs a cusp over 1, got {j}")
    out: dict = {}
    for h in d.cusp_table.info(j).orbit:
        # h runs over cosets with h1 = j; hB runs over those with hB(-1) = j
        _add(out, d.piB[h], Fraction(1))
        _add(out, h, Fraction(-1))
    return SymbolVector("plus", out)


def intersect(vp: SymbolVector, vm: SymbolVector):
    if vp.side != "plus" or vm.side != "minus":
        raise ValueError("intersect pairs a side plus vector with a side minus vector")
    return sum((c * vm.coeffs[g] for g, c in vp.coeffs.items() if g in vm.coeffs), Fraction(0))


def intersection_matrix(d: Dessin) -> list[list]:
    return [
        [intersect(SymbolVector.basis("plus", g), SymbolVector.basis("minus", h)) for h in range(d.n)]
        for g in range(d.n)
    ]


def boundary_matrix(d: Dessin, side: str) -> tuple[list[Cusp], list[list[int]]]:
    """Rows indexed by cusps of the relevant boundary, columns by cosets."""
    cusps = d.cusp_table.plus() if side == "plus" else d.cusp_table.minus()
    index = {c: r for r, c in enumerate(cusps)}
    rows = [[0] * d.n for _ in cusps]
    bd = boundary_plus if side == "plus" else boundary_minus
    for g in range(d.n):
        for c, v in bd(d, SymbolVector.basis(side, g)).coeffs.items():
            rows[index[c]][g] += int(v)
    return cusps, rows


def closing_kernel(d: Dessin, side: str) -> list[list[Fraction]]:
    """Kernel of H1(X - bd_other, bd_side) -> H1(X, bd_side), as the annihilator
    under the pairing of the closed cycles on the opposite side."""
    other = "plus" if side == "minus" else "minus"
    _, rows = boundary_matrix(d, other)
    closed = nullspace(rows, d.n)
    return nullspace(closed, d.n) if closed else [
        [Fraction(int(i == j)) for j in range(d.n)] for i in range(d.n)
    ]


# -- Manin symbols -----------------------------------------------------------

TRANSVERSAL: tuple[Mat2, ...] = (
    IDENTITY,
    MAT_S,
    MAT_U,
    MAT_U @ MAT_S,
    MAT_U @ MAT_U,
    MAT_U @ MAT_U @ MAT_S,
)
TRANSVERSAL_NAMES = ("Id", "S", "U", "US", "U2", "U2S")
_BY_RESIDUE = {t.mod2(): k for k, t in enumerate(TRANSVERSAL)}
_POINT_KIND = {Fraction(0): "zero", Fraction(1): "one", None: "inf"}


def split_sl2(m: Mat2) -> tuple[Mat2, int]:
    """Write m = gamma t with gamma in Gamma(2) and t in the transversal."""
    k = _BY_RESIDUE[m.mod2()]
    return m @ TRANSVERSAL[k].inverse(), k


@dataclass(frozen=True)
class ManinPresentation:
    dessin: Dessin
    relations: list = field(repr=False)  # rows over 6n symbols
    boundary: list = field(repr=False)  # rows over cusps, columns over symbols
    cusps: list = field(repr=False)

    @property
    def size(self) -> int:
        return 6 * self.dessin.n

    @cached_property
    def _reduced(self):
        return rref(self.relations, self.size)

    @property
    def relation_rank(self) -> int:
        return len(self._reduced[1])

    @property
    def rank(self) -> int:
        return self.size - self.relation_rank

    def reduce(self, v) -> list[Fraction]:
        red, piv = self._reduced
        return reduce_mod_rowspace(v, red, piv)


def symbol_index(i: int, t: int) -> int:
    return 6 * i + t


def right_act_symbol(d: Dessin, i: int, t: int, m: Mat2) -> tuple[int, int]:
    """(Gamma g_i t) m = Gamma g_i gamma t'  ->  (coset of g_i gamma, t')."""
    gamma, k = split_sl2(TRANSVERSAL[t] @ m)
    return d.apply_word(i, decompose_ab(gamma)), k


def manin_presentation(d: Dessin) -> ManinPresentation:
    n = d.n
    rels = []
    u2 = MAT_U @ MAT_U
    for i in range(n):
        for t in range(6):
            x = symbol_index(i, t)
            row = [0] * (6 * n)
            row[x] += 1
            row[symbol_index(*right_act_symbol(d, i, t, MAT_S))] += 1
            rels.append(row)
            row = [0] * (6 * n)
            row[x] += 1
            row[symbol_index(*right_act_symbol(d, i, t, MAT_U))] += 1
            row[symbol_index(*right_act_symbol(d, i, t, u2))] += 1
            rels.append(row)
    cusps = d.cusp_table.all_cusps()
    index = {c: r for r, c in enumerate(cusps)}
    bd = [[0] * (6 * n) for _ in cusps]
    for i in range(n):
        for t, tm in enumerate(TRANSVERSAL):
            x = symbol_index(i, t)
            bd[index[d.cusp_at(i, _POINT_KIND[tm.act(None)])]][x] += 1
            bd[index[d.cusp_at(i, _POINT_KIND[tm.act(Fraction(0))])]][x] -= 1
    return ManinPresentation(d, rels, bd, cusps)


def transport_plus(v: SymbolVector, n: int) -> list:
    """xi+(g) -> Manin symbol [Gamma g] for g in Gamma(2)."""
    out = [Fraction(0)] * (6 * n)
    for g, c in v.coeffs.items():
        out[symbol_index(g, 0)] += c
    return out


def project_to_full(p: ManinPresentation, v: SymbolVector) -> list[Fraction]:
    if v.side != "plus":
        raise ValueError("only side plus classes map to the Manin presentation")
    return p.reduce(transport_plus(v, p.dessin.n))


def plus_to_full_kernel(p: ManinPresentation) -> list[list[Fraction]]:
    """Kernel of the side plus group -> H1(X, all cusps)."""
    n = p.dessin.n
    images = [project_to_full(p, SymbolVector.basis("plus", g)) for g in range(n)]
    # kernel of v -> sum v_g images[g]
    cols = [[images[g][r] for g in range(n)] for r in range(6 * n)]
    return nullspace(cols, n)


def full_rank_expected(d: Dessin) -> int:
    from .dessin import genus

    return 2 * genus(d) + len(d.cusp_table.all_cusps()) - 1


def span_equal(a: list, b: list) -> bool:
    ra, rb = rank(a), rank(b)
    return ra == rb == rank(a + b)

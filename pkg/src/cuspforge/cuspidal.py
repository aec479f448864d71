"""Cuspidal divisor class groups as finite abelian groups (Smith form on lattices of divisors)."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod
from typing import Iterable, Sequence

from .dessin import Cusp, Dessin, fermat_index, from_fermat
from .homology import CuspDivisor
from .linalg import smith_normal_form

LABELINGS = ("combinatorial", "geometric", "rohrlich")


@dataclass(frozen=True)
class AbelianStructure:
    free_rank: int
    invariant_factors: tuple[int, ...]

    @property
    def order(self) -> int | None:
        return None if self.free_rank else prod(self.invariant_factors)

    @property
    def elementary_divisors(self) -> tuple[int, ...]:
        out = []
        for d in self.invariant_factors:
            out.extend(_prime_powers(d))
        return tuple(sorted(out))

    def is_power_of_cyclic(self, m: int, k: int) -> bool:
        """True iff the group is (Z/m)^k."""
        return self.free_rank == 0 and self.invariant_factors == (m,) * k

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "invariant_factors": list(self.invariant_factors)}

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.free_rank:
            parts.append(f"Z^{self.free_rank}")
        return " x ".join(parts) or "0"


def _prime_powers(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            q = 1
            while n % p == 0:
                n //= p
                q *= p
            out.append(q)
        p += 1
    if n > 1:
        out.append(n)
    return out


def cokernel(rows: Sequence[Sequence[int]], ncols: int) -> AbelianStructure:
    """Structure of Z^ncols / (row lattice)."""
    if not rows:
        return AbelianStructure(ncols, ())
    d, _, _ = smith_normal_form(rows)
    diag = [abs(d[i][i]) for i in range(min(len(d), ncols)) if d[i][i]]
    return AbelianStructure(ncols - len(diag), tuple(x for x in diag if x > 1))


def group_generated_mod_integers(vectors: Sequence[Sequence[Fraction]]) -> AbelianStructure:
    """Subgroup of (Q/Z)^n generated by the images of rational vectors."""
    vectors = [[Fraction(x) for x in v] for v in vectors]
    if not vectors:
        return AbelianStructure(0, ())
    m = 1
    for v in vectors:
        for x in v:
            m = m * x.denominator // gcd(m, x.denominator)
    # columns = generators; c in kernel iff (m v) . c = 0 mod m
    mat = [[int(v[i] * m) for v in vectors] for i in range(len(vectors[0]))]
    d, _, _ = smith_normal_form(mat)
    k = len(vectors)
    orders = []
    for i in range(k):
        di = d[i][i] if i < len(d) else 0
        orders.append(m // gcd(di, m))  # a zero column imposes no condition
    orders = sorted(o for o in orders if o > 1)
    # re-normalise into a divisibility chain
    return cokernel([[o if i == j else 0 for j in range(len(orders))] for i, o in enumerate(orders)], len(orders))


# -- Fermat cusp labels ------------------------------------------------------

def fermat_labels(n: int, labeling: str = "combinatorial") -> dict[tuple[str, int], Cusp]:
    """Map ('a'|'b'|'c', j) to a cusp of the Fermat dessin.

    Combinatorial: a_j is the cusp over 0 through the cosets A^j B^b, c_k the cusp
    over infinity through the cosets A^a B^k, b_j the cusp over 1 through the cosets
    with a + b = j.  Geometric: the points where y = zeta^j, x = zeta^j and
    x = eps zeta^j y, located by continuation of x = lambda^(1/N), y = (1 - lambda)^(1/N).
    Rohrlich: geometric a and c, with b_j renamed to geometric b_((N+1)/2 - j); this is the
    indexing under which the six classical relations hold on the nose.
    """
    if labeling not in LABELINGS:
        raise ValueError(f"labeling must be one of {LABELINGS}")
    d = from_fermat(n)
    out = {}
    for j in range(n):
        zero = d.cusp_at(fermat_index(n, j, 0), "zero")
        inf = d.cusp_at(fermat_index(n, 0, j), "inf")
        if labeling == "combinatorial":
            out["a", j] = zero
            out["c", j] = inf
            out["b", j] = d.cusp_at(fermat_index(n, j, 0), "one")
        else:
            out["a", j] = inf
            out["c", j] = zero
            shift = j - 1 if labeling == "geometric" else (n - 1) // 2 - j
            out["b", j] = d.cusp_at(fermat_index(n, shift % n, 0), "one")
    return out


def fermat_divisor(n: int, terms: dict, labeling: str = "combinatorial") -> CuspDivisor:
    """Divisor from {('a', j): coefficient, ...}."""
    labels = fermat_labels(n, labeling)
    out: dict = {}
    for key, v in terms.items():
        c = labels[key[0], key[1] % n]
        out[c] = out.get(c, 0) + v
    return CuspDivisor(out)


_TERM = re.compile(r"\s*([+-]?)\s*(?:(\d+(?:/\d+)?)\s*\*\s*)?([abc]\d+|(?:zero|one|inf):\d+)\s*")


def parse_divisor(text: str, d: Dessin, fermat_n: int | None = None, labeling: str = "combinatorial") -> CuspDivisor:
    """Parse e.g. "a0 - c1", "2*b0-2*b1", "+1*inf:0-1*zero:0"."""
    pos = 0
    out: dict = {}
    labels = fermat_labels(fermat_n, labeling) if fermat_n else None
    text = text.strip()
    if not text:
        raise ValueError("empty divisor")
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse divisor at {text[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        if pos and not m.group(1):
            raise ValueError(f"missing sign before {m.group(3)!r}")
        coeff = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        label = m.group(3)
        if ":" in label:
            cusp = Cusp.parse(label)
            if cusp not in d.cusp_table.all_cusps():
                raise ValueError(f"{label} is not a cusp label of this dessin")
        else:
            if labels is None:
                raise ValueError("letter labels a/b/c need a Fermat dessin")
            cusp = labels[label[0], int(label[1:]) % fermat_n]
        out[cusp] = out.get(cusp, 0) + sign * coeff
        pos = m.end()
    div = CuspDivisor(out)
    if div.degree != 0:
        raise ValueError(f"divisor has degree {div.degree}, expected 0")
    return div


def fermat_unit_divisors(n: int, labeling: str = "combinatorial") -> list[CuspDivisor]:
    """Divisors of x - zeta^j, y - zeta^j and x - eps zeta^j y."""
    out = []
    for letter in ("b", "a", "c"):
        for j in range(n):
            terms = {("c", k): -1 for k in range(n)}
            terms[letter, j] = terms.get((letter, j), 0) + n
            out.append(fermat_divisor(n, terms, labeling))
    return out


def rohrlich_relation_divisors(n: int, labeling: str = "combinatorial") -> list[CuspDivisor]:
    if n < 1 or n % 2 == 0:
        raise ValueError("Rohrlich relations need an odd N")
    base = ("a", 0)
    rels = []
    for letter in "abc":
        t = {(letter, i): 1 for i in range(n)}
        t[base] = t.get(base, 0) - 1 * n  # degree zero version of sum - [P]
        rels.append(t)
    rels.append({**{("a", i): i for i in range(n)}, **{("b", i): -i for i in range(n)}})
    rels.append({**{("a", i): i for i in range(n)}, **{("c", i): -i for i in range(n)}})
    t: dict = {}
    for i in range(n):
        for letter in "abc":
            t[letter, i] = t.get((letter, i), 0) + i * i
        t[base] = t.get(base, 0) - 3 * i * i
    rels.append(t)
    return [fermat_divisor(n, r, labeling) for r in rels]


def _degree_zero_coords(div: CuspDivisor, cusps: list[Cusp]) -> list[int]:
    """Coordinates in the basis [c] - [cusps[0]] of the degree zero lattice."""
    if div.degree != 0:
        raise ValueError("divisor is not of degree 0")
    return [int(div.coeffs.get(c, 0)) for c in cusps[1:]]


def degree_zero_quotient(cusps: list[Cusp], relations: Iterable[CuspDivisor], modulus: int = 0) -> AbelianStructure:
    """Z[cusps]^0 modulo the given relations and modulus * Z[cusps]^0."""
    k = len(cusps) - 1
    rows = [_degree_zero_coords(r, cusps) for r in relations]
    if modulus:
        rows += [[modulus * (i == j) for j in range(k)] for i in range(k)]
    return cokernel(rows, k)


def _check_odd(n: int) -> None:
    if n < 3 or n % 2 == 0:
        raise ValueError("cuspidal group formulas need an odd N >= 3")


def cuspidal_group_full(n: int, labeling: str = "combinatorial") -> AbelianStructure:
    _check_odd(n)
    cusps = from_fermat(n).cusp_table.all_cusps()
    return degree_zero_quotient(cusps, rohrlich_relation_divisors(n, labeling), n)


def cuspidal_group_minus(n: int, labeling: str = "combinatorial") -> AbelianStructure:
    """Z[cusps over 0, inf]^0 modulo N and sum_j (a_j - c_j)."""
    _check_odd(n)
    cusps = from_fermat(n).cusp_table.plus()
    rel = fermat_divisor(n, {**{("a", j): 1 for j in range(n)}, **{("c", j): -1 for j in range(n)}}, labeling)
    return degree_zero_quotient(cusps, [rel], n)


def cuspidal_group_plus(n: int) -> AbelianStructure:
    """Z[cusps over 1]^0 modulo 2N."""
    _check_odd(n)
    cusps = from_fermat(n).cusp_table.minus()
    return degree_zero_quotient(cusps, [], 2 * n)


def theta_plus(n: int, div: CuspDivisor) -> list[int]:
    """sum_{g0 = p} m_p [g] + sum_{g inf = q} m_q [g] for D = sum m_p (p) + sum m_q (q), mod N.

    On (a_j) - (c_k) this is the indicator of the a_j fibre minus that of the c_k fibre.
    """
    d = from_fermat(n)
    if any(c.kind == "one" for c in div.coeffs):
        raise ValueError("theta_plus needs a divisor supported on cusps over 0 and infinity")
    if div.degree != 0:
        raise ValueError("theta_plus needs a degree 0 divisor")
    out = []
    for g in range(d.n):
        v = div.coeffs.get(d.cusp_at(g, "zero"), 0) + div.coeffs.get(d.cusp_at(g, "inf"), 0)
        out.append(int(v) % n)
    return out


def theta_minus(n: int, div: CuspDivisor) -> list[int]:
    """sum_{g1 = b} m_b [g] - sum_{g(-1) = b} m_b [g], mod 2N."""
    d = from_fermat(n)
    if any(c.kind != "one" for c in div.coeffs):
        raise ValueError("theta_minus needs a divisor supported on cusps over 1")
    if div.degree != 0:
        raise ValueError("theta_minus needs a degree 0 divisor")
    out = []
    for g in range(d.n):
        v = div.coeffs.get(d.cusp_at(g, "one"), 0) - div.coeffs.get(d.cusp_at_minus_one(g), 0)
        out.append(int(v) % (2 * n))
    return out


def theta_image(n: int, side: str) -> AbelianStructure:
    """Structure of the image of theta on the degree zero lattice mod N (plus) or 2N (minus)."""
    d = from_fermat(n)
    if side == "plus":
        cusps, theta, mod = d.cusp_table.plus(), theta_plus, n
    else:
        cusps, theta, mod = d.cusp_table.minus(), theta_minus, 2 * n
    gens = [theta(n, CuspDivisor({c: 1, cusps[0]: -1})) for c in cusps[1:]]
    return group_generated_mod_integers([[Fraction(x, mod) for x in g] for g in gens])


def theta_kernel_basis(n: int, side: str) -> list[list[int]]:
    """Generators (in degree zero coordinates) of the kernel of theta, from the Smith form."""
    d = from_fermat(n)
    if side == "plus":
        cusps, theta, mod = d.cusp_table.plus(), theta_plus, n
    else:
        cusps, theta, mod = d.cusp_table.minus(), theta_minus, 2 * n
    k = len(cusps) - 1
    mat = [[theta(n, CuspDivisor({c: 1, cusps[0]: -1}))[g] for c in cusps[1:]] for g in range(d.n)]
    dm, _, v = smith_normal_form(mat)
    out = []
    for i in range(k):
        di = dm[i][i] if i < len(dm) else 0
        step = mod // gcd(di, mod) if di else 1
        if step % mod:
            out.append([(v[r][i] * step) % mod for r in range(k)])
    return out


def export_csv(rows: Sequence[Sequence], path, header: Sequence[str] | None = None) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(header)
        for r in rows:
            w.writerow([str(x) for x in r])


def class_order_in_cokernel(x: Sequence[int], rows: Sequence[Sequence[int]]) -> int | None:
    """Order of x in Z^k / (row lattice); None when infinite."""
    k = len(x)
    d, _, v = smith_normal_form(rows) if rows else ([], [], None)
    if v is None:
        return 1 if not any(x) else None
    coords = [sum(x[i] * v[i][j] for i in range(k)) for j in range(k)]
    order = 1
    for j, c in enumerate(coords):
        dj = abs(d[j][j]) if j < len(d) else 0
        if dj == 0:
            if c:
                return None
            continue
        step = dj // gcd(dj, c)
        order = order * step // gcd(order, step)
    return order


def full_class_order(n: int, div: CuspDivisor, labeling: str = "rohrlich") -> int | None:
    """Order of a degree zero cuspidal divisor in the Jacobian of the Fermat curve."""
    cusps = from_fermat(n).cusp_table.all_cusps()
    k = len(cusps) - 1
    rows = [_degree_zero_coords(r, cusps) for r in rohrlich_relation_divisors(n, labeling)]
    rows += [[n * (i == j) for j in range(k)] for i in range(k)]
    return class_order_in_cokernel(_degree_zero_coords(div, cusps), rows)

"""Exact linear algebra over Q and Z on lists of lists."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list]


def to_fraction(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    m = to_fraction(rows)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0


def nullspace(rows: Sequence[Sequence], ncols: int) -> Matrix:
    """Basis of {v : rows . v = 0}."""
    red, pivots = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -red[r][f]
        basis.append(v)
    return basis


def reduce_mod_rowspace(v: Sequence, red: Matrix, pivots: list[int]) -> list[Fraction]:
    """Canonical representative of v modulo the row space of an RREF matrix."""
    out = [Fraction(x) for x in v]
    for row, p in zip(red, pivots):
        if out[p] != 0:
            f = out[p]
            out = [x - f * y for x, y in zip(out, row)]
    return out


def in_rowspace(v: Sequence, rows: Sequence[Sequence]) -> bool:
    if not rows:
        return all(x == 0 for x in v)
    red, piv = rref(rows, len(v))
    return all(x == 0 for x in reduce_mod_rowspace(v, red, piv))


def solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """One solution x of a x = b, or None when inconsistent."""
    ncols = len(a[0]) if a else 0
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    red, piv = rref(aug, ncols + 1)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, piv):
        x[p] = row[-1]
    return x


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a: Sequence[Sequence]) -> Matrix:
    return [list(r) for r in zip(*a)]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Integer SNF: returns (D, U, V) with U a V = D, U and V unimodular."""
    m = len(a)
    n = len(a[0]) if m else 0
    d = [[int(x) for x in row] for row in a]
    u = identity(m)
    v = identity(n)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, f):  # row dst += f * row src
        if f:
            d[dst] = [x + f * y for x, y in zip(d[dst], d[src])]
            u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, f):
        if f:
            for row in d:
                row[dst] += f * row[src]
            for row in v:
                row[dst] += f * row[src]

    for t in range(min(m, n)):
        # choose the smallest nonzero entry in the trailing block as pivot
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if d[i][j] and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return d, u, v
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = d[t][t]
            dirty = False
            for i in range(t + 1, m):
                add_row(t, i, -(d[i][t] // p))
                dirty |= d[i][t] != 0
            for j in range(t + 1, n):
                add_col(t, j, -(d[t][j] // p))
                dirty |= d[t][j] != 0
            if dirty:
                continue
            # enforce divisibility of the remaining block
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
    return d, u, v


def elementary_divisors(a: Sequence[Sequence[int]]) -> tuple[list[int], int]:
    """Nonzero diagonal of the SNF and the number of columns, for coker(Z^m -> Z^n) rows."""
    if not a:
        return [], 0
    d, _, _ = smith_normal_form(a)
    diag = [abs(d[i][i]) for i in range(min(len(d), len(d[0]))) if d[i][i]]
    return diag, len(a[0])


def saturation_basis(rows: Sequence[Sequence[int]], n: int) -> tuple[Matrix, int]:
    """(V, r) with V unimodular such that the first r rows of V^-1 span Z^n meet Q.rows.

    A vector v lies in Z^n + Q.rows iff the coordinates (v V)_i are integers for i >= r.
    """
    if not rows:
        return identity(n), 0
    d, _, v = smith_normal_form(rows)
    r = sum(1 for i in range(min(len(d), n)) if d[i][i])
    return v, r


def free_coordinates(vec: Sequence, v: Matrix, r: int) -> list:
    """Coordinates of vec modulo the rational span, in the basis fixed by saturation_basis."""
    n = len(vec)
    return [sum(vec[i] * v[i][j] for i in range(n)) for j in range(r, n)]

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from cuspforge.linalg import (
    free_coordinates,
    in_rowspace,
    matmul,
    nullspace,
    rank,
    saturation_basis,
    smith_normal_form,
    solve,
)

matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


def _det(m):
    m = [[Fraction(x) for x in row] for row in m]
    n, det = len(m), Fraction(1)
    for i in range(n):
        p = next((r for r in range(i, n) if m[r][i]), None)
        if p is None:
            return 0
        if p != i:
            m[i], m[p] = m[p], m[i]
            det = -det
        det *= m[i][i]
        for r in range(i + 1, n):
            f = m[r][i] / m[i][i]
            m[r] = [a - f * b for a, b in zip(m[r], m[i])]
    return det


@settings(max_examples=200)
@given(matrices)
def test_smith_form(a):
    d, u, v = smith_normal_form(a)
    assert matmul(matmul(u, a), v) == d
    assert abs(_det(u)) == 1 and abs(_det(v)) == 1
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    assert all(d[i][j] == 0 for i in range(len(d)) for j in range(len(d[0])) if i != j)
    nz = [x for x in diag if x]
    assert all(x > 0 for x in nz)
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    assert len(nz) == rank(a)


def test_smith_known():
    d, _, _ = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert [d[i][i] for i in range(3)] == [2, 6, 12]


@given(matrices)
def test_nullspace(a):
    ns = nullspace(a, len(a[0]))
    assert len(ns) == len(a[0]) - rank(a)
    for v in ns:
        assert all(sum(Fraction(x) * y for x, y in zip(row, v)) == 0 for row in a)


def test_solve_and_rowspace():
    assert solve([[1, 1], [1, -1]], [3, 1]) == [2, 1]
    assert solve([[1, 1], [2, 2]], [1, 3]) is None
    assert in_rowspace([2, 2, 0], [[1, 1, 0], [0, 0, 1]])
    assert not in_rowspace([1, 0, 0], [[1, 1, 0]])


def test_saturation_coordinates():
    # Z^2 / Q.(2, 2): the free coordinate detects (1/2, 1/2) - (0, 1) as non integral
    v, r = saturation_basis([[2, 2]], 2)
    assert r == 1
    assert all(Fraction(x).denominator == 1 for x in free_coordinates([Fraction(1, 2), Fraction(1, 2)], v, r))
    assert any(Fraction(x).denominator != 1 for x in free_coordinates([Fraction(1, 2), 0], v, r))

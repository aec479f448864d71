import random
from fractions import Fraction

import mpmath as mp
import pytest

from cuspforge.analytic import TruncationParams, scattering_difference
from cuspforge.cuspidal import fermat_divisor
from cuspforge.dessin import Cusp, from_fermat, genus, trivial, validate
from cuspforge.eisenstein import (
    BOUNDARY_SIGN,
    EisensteinCycle,
    assemble_full_cycle,
    boundary_check,
    cycle_boundary,
    cycle_group,
    fermat_cycle,
    fermat_cycle_ac,
    fermat_cycle_bb,
    full_boundary,
    full_order,
    imaginary_part_from_scattering,
    integral_modulo_loops,
    manin_drinfeld_check,
    split_divisor,
    torsion_order,
)
from cuspforge.gamma2 import MAT_U
from cuspforge.homology import CuspDivisor, SymbolVector, intersect, manin_presentation


def test_ac_calibrated_closed_form():
    n = 3
    d = from_fermat(n)
    cyc = fermat_cycle_ac(n, 0, 0)
    (a0,) = fermat_divisor(n, {("a", 0): 1}).coeffs
    (c0,) = fermat_divisor(n, {("c", 0): 1}).coeffs
    for g in range(d.n):
        expected = Fraction(int(d.cusp_at(g, "zero") == a0) + int(d.cusp_at(g, "inf") == c0), 3) - Fraction(1, 9)
        assert cyc.real_part.coeffs[g] == expected
    assert boundary_check(d, cyc) == "-D"
    assert BOUNDARY_SIGN == -1


def test_ac_paper_literal():
    n = 3
    d = from_fermat(n)
    cyc = fermat_cycle_ac(n, 0, 0, "paper_literal")
    vals = sorted(cyc.real_part.to_list(d.n))
    assert vals == [Fraction(-1, 3)] * 2 + [Fraction(0)] * 5 + [Fraction(1, 3)] * 2
    assert boundary_check(d, cyc) == "FAIL"
    # the boundary is symmetric in a_0 and c_0: -(a_0) - (c_0) + (sum a + sum c)/N
    bd = cycle_boundary(d, cyc).coeffs
    labels = fermat_divisor(n, {("a", 0): 1}).coeffs | fermat_divisor(n, {("c", 0): 1}).coeffs
    assert all(bd[c] == Fraction(-2, 3) for c in labels)


def test_bb_cycles():
    n = 3
    d = from_fermat(n)
    assert not any(fermat_cycle_bb(n, 1, 1).real_part.coeffs.values())
    lit = fermat_cycle_bb(n, 0, 1, "paper_literal")
    assert set(lit.real_part.coeffs.values()) <= {Fraction(k, 6) for k in range(-2, 3)}
    assert boundary_check(d, lit) == "FAIL"
    assert boundary_check(d, fermat_cycle_bb(n, 0, 1)) == "-D"
    with pytest.raises(ValueError):
        fermat_cycle_bb(n, 0, 3)
    with pytest.raises(ValueError):
        fermat_cycle_ac(n, 0, 0, "other")


@pytest.mark.parametrize("n", [3, 5])
def test_boundary_law_and_integrality(n):
    d = from_fermat(n)
    for j in range(n):
        for k in range(n):
            ac = fermat_cycle_ac(n, j, k)
            assert boundary_check(d, ac) == "-D"
            assert integral_modulo_loops(d, ac.real_part.to_list(d.n), "plus", n)
            bb = fermat_cycle_bb(n, j, k)
            assert boundary_check(d, bb) == "-D"
            assert integral_modulo_loops(d, bb.real_part.to_list(d.n), "minus", 2 * n)


@pytest.mark.parametrize("n", [3, 5])
def test_orthogonality(n):
    ac = [fermat_cycle_ac(n, j, k) for j in range(n) for k in range(n)]
    bb = [fermat_cycle_bb(n, j, k) for j in range(n) for k in range(n)]
    for x in ac[:: n + 1]:
        for y in bb:
            assert intersect(x.real_part, y.real_part) == 0


@pytest.mark.parametrize("n", [3, 5])
def test_ac_cycle_group(n):
    d = from_fermat(n)
    g = cycle_group(d, [fermat_cycle_ac(n, j, k) for j in range(n) for k in range(n)])
    assert g.order == n ** (2 * n - 2)


@pytest.mark.parametrize("n,order", [(3, 27), (5, 3125)])
def test_bb_cycle_group_observed(n, order):
    # measured value; the closed form (2N)^(N-1) is checked (and fails) in the acceptance suite
    d = from_fermat(n)
    g = cycle_group(d, [fermat_cycle_bb(n, j, k) for j in range(n) for k in range(n)])
    assert g.order == order == n**n


def test_fermat_cycle_general_divisor():
    n = 3
    div = fermat_divisor(n, {("a", 0): 2, ("a", 1): -1, ("c", 2): -1})
    cyc = fermat_cycle(n, div)
    assert boundary_check(from_fermat(n), cyc) == "-D"
    with pytest.raises(ValueError):
        fermat_cycle(n, fermat_divisor(n, {("a", 0): 1, ("b", 0): -1}))
    with pytest.raises(ValueError):
        fermat_cycle(n, div, mode="paper_literal")


def test_torsion_examples():
    half = EisensteinCycle(CuspDivisor({}), "plus", "calibrated", SymbolVector("plus", {0: Fraction(1, 2)}))
    v = torsion_order(half, 1)
    assert v.is_torsion and v.order == 2
    cyc = fermat_cycle_ac(3, 0, 0)
    v = torsion_order(cyc, 9)
    assert v.is_torsion and 9 % v.order == 0
    bad = EisensteinCycle(CuspDivisor({}), "plus", "calibrated", SymbolVector("plus", {}), SymbolVector("plus", {0: Fraction(1)}))
    assert torsion_order(bad, 1).is_torsion is False


def test_split_divisor():
    g2 = trivial()
    inf, zero, one = Cusp("inf", 0), Cusp("zero", 0), Cusp("one", 0)
    e0, einf = split_divisor(g2, CuspDivisor({inf: 1, zero: -1}))
    assert e0.coeffs == {inf: -1, one: 1}
    assert einf.coeffs == {zero: -1, one: 1}
    d = from_fermat(3)
    ones = d.cusp_table.minus()
    e0, einf = split_divisor(d, CuspDivisor({ones[0]: 1, ones[1]: -1}))
    assert not any(e0.coeffs.values())
    rng = random.Random(5)
    cusps = d.cusp_table.all_cusps()
    for _ in range(20):
        co = {c: rng.randint(-4, 4) for c in cusps}
        co[cusps[0]] -= sum(co.values())
        div = CuspDivisor(co)
        e0, einf = split_divisor(d, div)
        assert e0.degree == 0 and einf.degree == 0
        back = (einf - e0).coeffs
        assert all(back.get(c, 0) == co[c] for c in cusps)
    with pytest.raises(ValueError):
        split_divisor(d, CuspDivisor({cusps[0]: 1}))


def test_full_cycle_gamma2():
    g2 = trivial()
    p = manin_presentation(g2)
    assert not any(assemble_full_cycle(g2, CuspDivisor({})))
    div = CuspDivisor({Cusp("inf", 0): 1, Cusp("zero", 0): -1})
    vec = assemble_full_cycle(g2, div)
    assert len(vec) == 6
    bd = full_boundary(p, vec).coeffs
    assert {c: v for c, v in bd.items() if v} == {c: -v for c, v in div.coeffs.items()}


def test_conjugate_dessins():
    d = from_fermat(3)
    for m in (MAT_U, MAT_U.inverse()):
        c = d.conjugate(m)
        assert validate(c) == [] and genus(c) == genus(d)
        assert c.cusp_table.counts() == d.cusp_table.counts()


@pytest.mark.parametrize("n", [3, 5])
def test_full_cycles_have_boundary_minus_d(n):
    d = from_fermat(n)
    p = manin_presentation(d)
    rng = random.Random(n)
    cusps = d.cusp_table.all_cusps()
    for _ in range(5):
        co = {c: rng.randint(-2, 2) for c in rng.sample(cusps, 5)}
        co[cusps[-1]] = co.get(cusps[-1], 0) - sum(co.values())
        div = CuspDivisor({c: v for c, v in co.items() if v})
        vec = assemble_full_cycle(d, div)
        bd = full_boundary(p, vec).coeffs
        assert all(bd.get(c, 0) == -div.coeffs.get(c, 0) for c in cusps)
        assert n % full_order(p, vec) == 0


def test_manin_drinfeld_examples():
    n = 3
    d = from_fermat(n)
    p = manin_presentation(d)
    exact = [Fraction(random.Random(i).randint(-5, 5), 7) for i in range(p.size)]
    assert manin_drinfeld_check(p, exact).is_torsion
    div = fermat_divisor(n, {("a", 0): 1, ("a", 1): -1})
    v = manin_drinfeld_check(p, assemble_full_cycle(d, div))
    assert v.is_torsion and n % v.order == 0
    # push an irrational amount along a free coordinate
    red, piv = p._reduced
    free = next(i for i in range(p.size) if i not in piv)
    with mp.workprec(256):
        vals = [mp.mpf(x.numerator) / x.denominator for x in exact]
        vals[free] += mp.mpf("0.30102999566")
        errs = [mp.mpf(10) ** -15] * p.size
        verdict = manin_drinfeld_check(p, vals, errs, den_bound=10**6, tol=1e-6)
    assert verdict.is_torsion is False
    with mp.workprec(256):
        wide = manin_drinfeld_check(p, vals, [mp.mpf("0.01")] * p.size, den_bound=10**6, tol=1e-6)
    assert wide.is_torsion is None


def test_imaginary_part_small_truncation():
    n = 3
    d = from_fermat(n)
    prm = TruncationParams(c_max=12, precision=64)
    diff = lambda j, k1, k2: scattering_difference(d, j, k1, k2, prm)  # noqa: E731
    zero = imaginary_part_from_scattering(d, CuspDivisor({}), "plus", diff)
    assert zero.norm() == 0
    ip = imaginary_part_from_scattering(d, fermat_divisor(n, {("a", 0): 1, ("c", 0): -1}), "plus", diff)
    im = imaginary_part_from_scattering(d, fermat_divisor(n, {("b", 0): 1, ("b", 1): -1}), "minus", diff)
    for part in (ip, im):
        assert all(abs(e.value) <= e.error for e in part.values)
    plus = SymbolVector("plus", {g: e.value for g, e in enumerate(ip.values)})
    minus = SymbolVector("minus", {g: e.value for g, e in enumerate(im.values)})
    assert abs(mp.mpf(float(intersect(plus, minus)))) <= sum(e.error for e in ip.values) + sum(e.error for e in im.values)

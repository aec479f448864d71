import json

import pytest
from hypothesis import given, settings

from cuspforge.dessin import (
    Cusp,
    Dessin,
    DessinError,
    fermat_coords,
    fermat_index,
    from_fermat,
    from_json,
    from_quotient_hom,
    genus,
    load,
    trivial,
    validate,
)
from cuspforge.gamma2 import ABWord, abelianization_mod, evaluate_word

from conftest import dessins


def test_validate_examples():
    assert validate(trivial()) == []
    assert validate(Dessin(2, (0, 1), (0, 1)))
    assert validate(from_fermat(3)) == []
    assert any("permutation" in v for v in validate(Dessin(3, (0, 0, 1), (0, 1, 2))))


def test_fermat_structure():
    assert from_fermat(1).n == 1
    d = from_fermat(3)
    assert d.n == 9
    for i in range(9):
        a, b = fermat_coords(3, i)
        assert d.piA[i] == fermat_index(3, a + 1, b)
        assert d.piB[i] == fermat_index(3, a, b + 1)
    assert d.cusp_table.counts() == {"zero": 3, "one": 3, "inf": 3}
    assert all(ci.width == 3 for k in d.cusp_table.by_kind for ci in d.cusp_table.by_kind[k])


def test_quotient_hom():
    assert from_quotient_hom([0], [0]).n == 1
    d5 = from_fermat(5)
    assert from_quotient_hom(d5.piA, d5.piB).cusp_table == d5.cusp_table
    assert validate(from_quotient_hom([1, 2, 0], [2, 0, 1])) == []
    with pytest.raises(DessinError):
        from_quotient_hom([0, 1], [0, 1])


def test_cusp_examples():
    t = trivial().cusp_table
    assert [len(t.by_kind[k]) for k in ("zero", "one", "inf")] == [1, 1, 1]
    d = Dessin(2, (1, 0), (0, 1))
    t = d.cusp_table
    assert [ci.width for ci in t.by_kind["inf"]] == [2]
    assert [ci.width for ci in t.by_kind["zero"]] == [1, 1]


def test_genus_examples():
    assert genus(trivial()) == 0
    assert genus(from_fermat(3)) == 1
    assert genus(from_fermat(5)) == 6


def test_coset_of_fermat_matches_abelianization():
    n = 5
    d = from_fermat(n)
    for text in ("", "A", "BAb", "AAbbbAB", "-bAAAbB"):
        m = evaluate_word(ABWord.parse(text))
        a, b = abelianization_mod(m, n)
        assert d.coset_of(m) == fermat_index(n, a, b)
    assert trivial().coset_of(evaluate_word(ABWord.parse("ABab"))) == 0


@pytest.mark.parametrize("n", range(1, 21))
def test_fermat_bijectivity_and_genus(n):
    d = from_fermat(n)
    pairs = {(d.cusp_at(g, "zero"), d.cusp_at(g, "inf")) for g in range(d.n)}
    assert len(pairs) == d.n
    assert genus(d) == (n - 1) * (n - 2) // 2


@settings(max_examples=60)
@given(dessins())
def test_widths_sum_to_index(d):
    for kind, infos in d.cusp_table.by_kind.items():
        assert sum(ci.width for ci in infos) == d.n
    assert genus(d) >= 0


@settings(max_examples=40)
@given(dessins(max_n=8))
def test_coset_of_is_a_right_action(d):
    w1, w2 = ABWord.parse("AbB"), ABWord.parse("bAAB")
    m1, m2 = evaluate_word(w1), evaluate_word(w2)
    assert d.coset_of(m1 @ m2) == d.apply_word(d.coset_of(m1), w2)


def test_cusp_labels_are_canonical():
    d = from_fermat(3)
    for kind, infos in d.cusp_table.by_kind.items():
        for ci in infos:
            assert ci.cusp == Cusp(kind, min(ci.orbit))
    assert Cusp.parse(str(Cusp("one", 4))) == Cusp("one", 4)


def test_json_round_trip(tmp_path):
    d = from_fermat(4)
    path = tmp_path / "d.json"
    path.write_text(json.dumps(d.to_json()))
    e = load(path)
    assert (e.n, e.piA, e.piB) == (d.n, d.piA, d.piB)
    with pytest.raises(DessinError):
        from_json({"n": 2, "piA": [0]})

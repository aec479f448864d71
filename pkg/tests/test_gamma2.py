import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuspforge.gamma2 import (
    GEN_A,
    GEN_B,
    IDENTITY,
    MAT_S,
    MINUS_ID,
    ABWord,
    Mat2,
    NotInGamma2,
    abelianization_mod,
    decompose_ab,
    decompose_ab_counted,
    evaluate_word,
    is_gamma2,
)

letters = st.lists(st.tuples(st.sampled_from("AB"), st.integers(-5, 5).filter(bool)), max_size=20)
words = st.builds(ABWord.from_letters, letters, st.sampled_from([1, -1]))


def test_membership():
    assert is_gamma2(GEN_A)
    assert not is_gamma2(MAT_S)
    assert is_gamma2(MINUS_ID)


def test_decompose_examples():
    assert decompose_ab(GEN_A) == ABWord(1, (("A", 1),))
    assert decompose_ab(MINUS_ID) == ABWord(-1, ())
    assert str(decompose_ab(Mat2(1, 2, 2, 5))) == "BA"


def test_evaluate_examples():
    assert evaluate_word(ABWord.parse("A")) == Mat2(1, 2, 0, 1)
    assert evaluate_word(ABWord.parse("b")) == Mat2(1, 0, -2, 1)
    assert evaluate_word(ABWord.parse("BA")) == Mat2(1, 2, 2, 5)


def test_decompose_rejects_outside():
    with pytest.raises(NotInGamma2):
        decompose_ab(MAT_S)


def test_abelianization_examples():
    assert abelianization_mod(GEN_A, 3) == (1, 0)
    assert abelianization_mod(MINUS_ID, 7) == (0, 0)
    assert abelianization_mod(Mat2(1, 2, 2, 5), 3) == (1, 1)
    with pytest.raises(ValueError):
        abelianization_mod(GEN_A, 0)


def test_word_string_round_trip():
    w = ABWord.parse("-BAAb")
    assert str(w) == "-BAAb"
    assert ABWord.parse(str(w)) == w


@settings(max_examples=300)
@given(words)
def test_round_trip(w):
    m = evaluate_word(w)
    assert m.a * m.d - m.b * m.c == 1
    assert decompose_ab(m) == w


@given(words, words, st.integers(1, 30))
def test_abelianization_is_a_homomorphism(w1, w2, n):
    m1, m2 = evaluate_word(w1), evaluate_word(w2)
    a1, b1 = abelianization_mod(m1, n)
    a2, b2 = abelianization_mod(m2, n)
    assert abelianization_mod(m1 @ m2, n) == ((a1 + a2) % n, (b1 + b2) % n)


@given(words)
def test_one_step_per_syllable(w):
    # each reduction step strips one syllable, so the step count is the syllable count
    _, steps = decompose_ab_counted(evaluate_word(w))
    assert steps <= len(w.letters)


def test_parabolic_words_need_linearly_many_steps():
    # (A B^-1)^k has trace -2: its entries grow linearly, so no log bound holds
    w = ABWord.parse("Ab" * 40)
    m = evaluate_word(w)
    _, steps = decompose_ab_counted(m)
    assert max(abs(x) for x in m.as_list()) < 400
    assert steps >= 79


def test_inverse_and_power():
    m = evaluate_word(ABWord.parse("ABBa"))
    assert m @ m.inverse() == IDENTITY
    assert GEN_B ** -3 == evaluate_word(ABWord.parse("bbb"))

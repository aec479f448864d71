"""Exact 2x2 integer matrices, the level-2 congruence subgroup and its free generators.

PGamma(2) is free on A = (1 2; 0 1) and B = (1 0; 2 1).  Every element of
Gamma(2) is therefore +-W for a unique reduced word W in A, B; the sign is kept
separately so that words model PGamma(2) x {+-1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class NotInGamma2(ValueError):
    """Raised when a matrix is not congruent to the identity modulo 2."""


@dataclass(frozen=True)
class Mat2:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.as_list()} is not 1")

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def __pow__(self, k: int) -> "Mat2":
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        out = IDENTITY
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def mod2(self) -> tuple[int, int, int, int]:
        return (self.a % 2, self.b % 2, self.c % 2, self.d % 2)

    def act(self, x):
        """Moebius action on a point of the upper half-plane (or a Fraction / None for infinity)."""
        if x is None:
            return None if self.c == 0 else _frac(self.a, self.c)
        den = self.c * x + self.d
        if den == 0:
            return None
        return (self.a * x + self.b) / den

    def as_list(self) -> list[int]:
        return [self.a, self.b, self.c, self.d]

    @classmethod
    def from_list(cls, entries: Sequence[int]) -> "Mat2":
        if len(entries) != 4:
            raise ValueError("a matrix is serialized as [a, b, c, d]")
        return cls(*(int(e) for e in entries))


def _frac(p, q):
    from fractions import Fraction

    return Fraction(p, q)


IDENTITY = Mat2(1, 0, 0, 1)
MINUS_ID = Mat2(-1, 0, 0, -1)
GEN_A = Mat2(1, 2, 0, 1)
GEN_B = Mat2(1, 0, 2, 1)
# S swaps 0 and infinity; U cycles 0 -> 1 -> infinity -> 0.
MAT_S = Mat2(0, 1, -1, 0)
MAT_U = Mat2(0, 1, -1, 1)
MAT_T = Mat2(1, 1, 0, 1)

_GENS = {"A": GEN_A, "B": GEN_B}


@dataclass(frozen=True)
class ABWord:
    """Signed reduced word: ``sign * prod(gen ** exp for gen, exp in letters)``."""

    sign: int = 1
    letters: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        prev = None
        for gen, exp in self.letters:
            if gen not in _GENS or exp == 0:
                raise ValueError(f"bad letter {(gen, exp)!r}")
            if gen == prev:
                raise ValueError("word is not reduced: repeated generator")
            prev = gen

    @classmethod
    def from_letters(cls, letters: Iterable[tuple[str, int]], sign: int = 1) -> "ABWord":
        """Freely reduce an arbitrary letter sequence."""
        out: list[list] = []
        for gen, exp in letters:
            if exp == 0:
                continue
            if out and out[-1][0] == gen:
                out[-1][1] += exp
                if out[-1][1] == 0:
                    out.pop()
            else:
                out.append([gen, exp])
        return cls(sign, tuple((g, e) for g, e in out))

    def __mul__(self, other: "ABWord") -> "ABWord":
        return ABWord.from_letters(self.letters + other.letters, self.sign * other.sign)

    def inverse(self) -> "ABWord":
        return ABWord(self.sign, tuple((g, -e) for g, e in reversed(self.letters)))

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def exponent_sums(self) -> tuple[int, int]:
        sa = sum(e for g, e in self.letters if g == "A")
        sb = sum(e for g, e in self.letters if g == "B")
        return sa, sb

    def __str__(self) -> str:
        body = "".join((g if e > 0 else g.lower()) * abs(e) for g, e in self.letters)
        return ("-" if self.sign < 0 else "") + body

    @classmethod
    def parse(cls, text: str) -> "ABWord":
        text = text.strip()
        sign = 1
        if text.startswith("-"):
            sign, text = -1, text[1:]
        letters = []
        for ch in text:
            if ch in "AB":
                letters.append((ch, 1))
            elif ch in "ab":
                letters.append((ch.upper(), -1))
            elif not ch.isspace():
                raise ValueError(f"unexpected character {ch!r} in word")
        return cls.from_letters(letters, sign)


def is_gamma2(m: Mat2) -> bool:
    return m.mod2() == (1, 0, 0, 1)


def evaluate_word(w: ABWord) -> Mat2:
    out = IDENTITY
    for gen, exp in w.letters:
        out = out @ (_GENS[gen] ** exp)
    return out if w.sign > 0 else -out


def _centered_quotient(x: int, m: int) -> int:
    """k minimising |x + k*m| (m != 0)."""
    # floor-based rounding of -x/m
    k = -((2 * x + m) // (2 * m)) if m > 0 else ((2 * x - m) // (-2 * m))
    # guard against off-by-one from the rounding convention
    best = min((k - 1, k, k + 1), key=lambda t: (abs(x + t * m), t))
    return best


def decompose_ab_counted(m: Mat2) -> tuple[ABWord, int]:
    """Decompose ``m`` and also return the number of reduction steps taken."""
    if not is_gamma2(m):
        raise NotInGamma2(f"{m.as_list()} is not in Gamma(2)")
    right: list[tuple[str, int]] = []  # m * X1 * X2 ... = +-A^e
    cur = m
    steps = 0
    while cur.c != 0:
        steps += 1
        if abs(cur.d) > abs(cur.c):
            # right-multiplying by A^k adds 2k*c to d
            k = _centered_quotient(cur.d, 2 * cur.c)
            cur = cur @ (GEN_A ** k)
            right.append(("A", k))
        else:
            k = _centered_quotient(cur.c, 2 * cur.d)
            cur = cur @ (GEN_B ** k)
            right.append(("B", k))
    sign = cur.a
    tail = [("A", cur.b * sign // 2)]
    letters = tail + [(g, -e) for g, e in reversed(right)]
    word = ABWord.from_letters(letters, sign)
    return word, steps


def decompose_ab(m: Mat2) -> ABWord:
    return decompose_ab_counted(m)[0]


def abelianization_mod(m: Mat2, n: int) -> tuple[int, int]:
    if n <= 0:
        raise ValueError("modulus must be a positive integer")
    sa, sb = decompose_ab(m).exponent_sums()
    return sa % n, sb % n

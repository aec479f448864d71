"""Finite-index subgroups of Gamma(2) given by a pair of permutations.

Coset ``i`` stands for ``Gamma g_i``; ``piA[i]`` is the index of ``Gamma g_i A``
(a right action).  Cusps of X_Gamma lying over infinity, 0 and 1 are the orbits
of A, B and B A^-1 respectively.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

from .gamma2 import (
    ABWord,
    GEN_A,
    GEN_B,
    IDENTITY,
    Mat2,
    decompose_ab,
    evaluate_word,
)

KINDS = ("zero", "one", "inf")


class DessinError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class Cusp(NamedTuple):
    kind: str  # "zero", "one" or "inf"
    rep: int  # smallest coset index in the orbit

    def __str__(self) -> str:
        return f"{self.kind}:{self.rep}"

    @classmethod
    def parse(cls, text: str) -> "Cusp":
        kind, _, rep = text.strip().partition(":")
        if kind not in KINDS or not rep:
            raise ValueError(f"bad cusp label {text!r}")
        return cls(kind, int(rep))


@dataclass(frozen=True)
class CuspInfo:
    cusp: Cusp
    orbit: tuple[int, ...]  # cosets in cyclic order under the stabiliser generator

    @property
    def width(self) -> int:
        return len(self.orbit)


def _inverse(p: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def _orbits(perm: Sequence[int]) -> list[tuple[int, ...]]:
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        orb = []
        i = start
        while not seen[i]:
            seen[i] = True
            orb.append(i)
            i = perm[i]
        out.append(tuple(orb))
    return out


@dataclass(frozen=True)
class CuspTable:
    by_kind: dict  # kind -> list[CuspInfo]
    of_coset: dict  # kind -> tuple mapping coset -> Cusp

    def all_cusps(self) -> list[Cusp]:
        return [ci.cusp for k in KINDS for ci in self.by_kind[k]]

    def plus(self) -> list[Cusp]:
        return [ci.cusp for k in ("zero", "inf") for ci in self.by_kind[k]]

    def minus(self) -> list[Cusp]:
        return [ci.cusp for ci in self.by_kind["one"]]

    def info(self, cusp: Cusp) -> CuspInfo:
        for ci in self.by_kind[cusp.kind]:
            if ci.cusp == cusp:
                return ci
        raise KeyError(cusp)

    def width(self, cusp: Cusp) -> int:
        return self.info(cusp).width

    def counts(self) -> dict:
        return {k: len(self.by_kind[k]) for k in KINDS}


@dataclass(frozen=True)
class Dessin:
    n: int
    piA: tuple[int, ...]
    piB: tuple[int, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "piA", tuple(int(x) for x in self.piA))
        object.__setattr__(self, "piB", tuple(int(x) for x in self.piB))

    # -- permutations -------------------------------------------------------
    @cached_property
    def piA_inv(self) -> tuple[int, ...]:
        return _inverse(self.piA)

    @cached_property
    def piB_inv(self) -> tuple[int, ...]:
        return _inverse(self.piB)

    @cached_property
    def pi_one(self) -> tuple[int, ...]:
        # right action of B A^-1: first B, then A^-1
        return tuple(self.piA_inv[self.piB[i]] for i in range(self.n))

    def act(self, i: int, gen: str, exp: int = 1) -> int:
        fwd, back = (self.piA, self.piA_inv) if gen == "A" else (self.piB, self.piB_inv)
        p = fwd if exp > 0 else back
        steps = abs(exp)
        if steps > self.n:
            # reduce by the length of the cycle through i
            j, cyc = p[i], 1
            while j != i:
                j, cyc = p[j], cyc + 1
            steps %= cyc
        for _ in range(steps):
            i = p[i]
        return i

    def apply_word(self, i: int, word: ABWord) -> int:
        for gen, exp in word.letters:
            i = self.act(i, gen, exp)
        return i

    def word_perm(self, word: ABWord) -> tuple[int, ...]:
        return tuple(self.apply_word(i, word) for i in range(self.n))

    def coset_of(self, m: Mat2) -> int:
        """Index of Gamma m; the central sign is ignored since -Id lies in Gamma."""
        return self.apply_word(0, decompose_ab(m))

    # -- geometry -----------------------------------------------------------
    @cached_property
    def cusp_table(self) -> CuspTable:
        by_kind, of_coset = {}, {}
        for kind, perm in (("inf", self.piA), ("zero", self.piB), ("one", self.pi_one)):
            infos = []
            owner = [None] * self.n
            for orb in _orbits(perm):
                cusp = Cusp(kind, min(orb))
                infos.append(CuspInfo(cusp, orb))
                for i in orb:
                    owner[i] = cusp
            infos.sort(key=lambda ci: ci.cusp.rep)
            by_kind[kind] = infos
            of_coset[kind] = tuple(owner)
        return CuspTable(by_kind, of_coset)

    def cusp_at(self, i: int, kind: str) -> Cusp:
        """Cusp of Gamma g_i x for x = 0, 1, infinity ("zero", "one", "inf")."""
        return self.cusp_table.of_coset[kind][i]

    def cusp_at_minus_one(self, i: int) -> Cusp:
        # g(-1) = (g A^-1)(1)
        return self.cusp_table.of_coset["one"][self.piA_inv[i]]

    @cached_property
    def coset_words(self) -> tuple[ABWord, ...]:
        """A word g_i with Gamma g_i = coset i, found by breadth-first search."""
        words: list = [None] * self.n
        words[0] = ABWord()
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for gen, exp in (("A", 1), ("B", 1), ("A", -1), ("B", -1)):
                j = self.act(i, gen, exp)
                if words[j] is None:
                    words[j] = words[i] * ABWord(1, ((gen, exp),))
                    queue.append(j)
        if any(w is None for w in words):
            raise DessinError(["dessin is not transitive"])
        return tuple(words)

    @cached_property
    def coset_reps(self) -> tuple[Mat2, ...]:
        return tuple(evaluate_word(w) for w in self.coset_words)

    def conjugate(self, m: Mat2) -> "Dessin":
        """Dessin of m^-1 Gamma m, coset i matched with Gamma' m^-1 g_i m."""
        pa = self.word_perm(decompose_ab(m @ GEN_A @ m.inverse()))
        pb = self.word_perm(decompose_ab(m @ GEN_B @ m.inverse()))
        return Dessin(self.n, pa, pb, name=f"conj({self.name})" if self.name else "")

    # -- serialisation -------------------------------------------------------
    def to_json(self) -> dict:
        return {"n": self.n, "piA": list(self.piA), "piB": list(self.piB)}


def validate(d: Dessin) -> list[str]:
    problems = []
    for name, perm in (("piA", d.piA), ("piB", d.piB)):
        if len(perm) != d.n:
            problems.append(f"{name} has length {len(perm)}, expected {d.n}")
        elif sorted(perm) != list(range(d.n)):
            problems.append(f"{name} is not a permutation of 0..{d.n - 1}")
    if d.n < 1:
        problems.append("n must be positive")
    if problems:
        return problems
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in (d.piA[i], d.piB[i], d.piA_inv[i], d.piB_inv[i]):
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != d.n:
        problems.append(f"not transitive: orbit of coset 0 has {len(seen)} of {d.n} cosets")
    return problems


def checked(d: Dessin) -> Dessin:
    problems = validate(d)
    if problems:
        raise DessinError(problems)
    return d


def trivial() -> Dessin:
    return Dessin(1, (0,), (0,), name="Gamma(2)")


def fermat_index(n: int, a: int, b: int) -> int:
    return (a % n) * n + (b % n)


def fermat_coords(n: int, i: int) -> tuple[int, int]:
    return divmod(i, n)


def from_fermat(n: int) -> Dessin:
    """Kernel of PGamma(2) -> (Z/n)^2, A -> (1,0), B -> (0,1); coset (a, b) <-> A^a B^b."""
    if n < 1:
        raise ValueError("N must be >= 1")
    pa = [0] * (n * n)
    pb = [0] * (n * n)
    for a in range(n):
        for b in range(n):
            i = fermat_index(n, a, b)
            pa[i] = fermat_index(n, a + 1, b)
            pb[i] = fermat_index(n, a, b + 1)
    return Dessin(n * n, tuple(pa), tuple(pb), name=f"Fermat({n})")


def from_quotient_hom(perm_a: Sequence[int], perm_b: Sequence[int]) -> Dessin:
    """Stabiliser of point 0 for the right action given by the images of A and B."""
    if len(perm_a) != len(perm_b):
        raise DessinError(["generator images act on different point sets"])
    return checked(Dessin(len(perm_a), tuple(perm_a), tuple(perm_b)))


def cusps(d: Dessin) -> CuspTable:
    return d.cusp_table


def genus(d: Dessin) -> int:
    c = sum(len(v) for v in d.cusp_table.by_kind.values())
    twice = 2 + d.n - c
    if twice < 0 or twice % 2:
        raise DessinError([f"Euler characteristic gives 2g = {twice}"])
    return twice // 2


def coset_of(d: Dessin, m: Mat2) -> int:
    return d.coset_of(m)


def load(path) -> Dessin:
    with open(path) as fh:
        data = json.load(fh)
    return from_json(data)


def from_json(data: dict) -> Dessin:
    try:
        d = Dessin(int(data["n"]), tuple(data["piA"]), tuple(data["piB"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DessinError([f"malformed dessin record: {exc}"]) from exc
    return checked(d)


def dump(d: Dessin, path) -> None:
    with open(path, "w") as fh:
        json.dump(d.to_json(), fh)

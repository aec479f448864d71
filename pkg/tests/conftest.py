import random

import pytest
from hypothesis import strategies as st

from cuspforge.dessin import Dessin, validate


def random_dessin(rng: random.Random, n: int) -> Dessin:
    """Transitive permutation pair on n points (resampled until transitive)."""
    while True:
        pa = list(range(n))
        pb = list(range(n))
        rng.shuffle(pa)
        rng.shuffle(pb)
        d = Dessin(n, tuple(pa), tuple(pb), name=f"random({n})")
        if not validate(d):
            return d


def random_dessins(count: int, max_n: int = 12, seed: int = 2024) -> list[Dessin]:
    rng = random.Random(seed)
    return [random_dessin(rng, rng.randint(1, max_n)) for _ in range(count)]


@st.composite
def dessins(draw, max_n: int = 12):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_dessin(random.Random(seed), n)


@pytest.fixture(scope="session")
def battery():
    return random_dessins(25)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])

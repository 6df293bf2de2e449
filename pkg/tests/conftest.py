import itertools
import random

import pytest
from hypothesis import strategies as st

from poset_cstar.circle import CircleExample
from poset_cstar.embedding import ChainPartition
from poset_cstar.poset import validate_poset
from poset_cstar.semigroup import PrimeSequence


def random_poset(rng: random.Random, n: int, density: float):
    """DAG relation on range(n) (edges i -> j only for i < j), so never cyclic."""
    pairs = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < density]
    return validate_poset(range(n), pairs)


@st.composite
def posets(draw, max_size=8):
    n = draw(st.integers(1, max_size))
    edges = draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))))
    return validate_poset(range(n), [(i, j) for i, j in edges if i < j])


@pytest.fixture
def lam():
    return validate_poset("acd", [("a", "c"), ("a", "d")])


@pytest.fixture
def vee():
    return validate_poset("abc", [("a", "c"), ("b", "c")])


@pytest.fixture
def chain3():
    return validate_poset("abc", [("a", "b"), ("b", "c")])


@pytest.fixture
def antichain3():
    return validate_poset("abc", [])


@pytest.fixture
def square():
    return validate_poset(["bot", "l", "r", "top"],
                          [("bot", "l"), ("bot", "r"), ("l", "top"), ("r", "top")])


@pytest.fixture(scope="session")
def circle64():
    return CircleExample(64)


@pytest.fixture
def p235():
    return PrimeSequence([2, 3, 5, 7])


@pytest.fixture(scope="session")
def nest4():
    """Abstract 4-level nest: W_1 = {1,2}, W_2 = {3}, W_3 = {4}, residual {0}."""
    return ChainPartition.from_neighborhoods(0, [{0, 1, 2, 3, 4}, {0, 3, 4}, {0, 4}, {0}])

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poset_cstar.errors import LevelMismatch, NegativeInput, OverflowGuard
from poset_cstar.semigroup import (
    FormalSum,
    PrimeSequence,
    QpElement,
    Truncation,
    enumerate_truncation,
    level_embed,
    qp_contains,
    v_matrix,
)
from poset_cstar.toeplitz import shift_matrix

INC = PrimeSequence(rule="increasing")


def test_rules():
    assert INC.prefix(6) == (2, 3, 5, 7, 11, 13)
    every = PrimeSequence(rule="every-prime-infinitely-often")
    assert every.prefix(10) == (2, 2, 3, 2, 3, 5, 2, 3, 5, 7)


@pytest.mark.parametrize("config, head", [
    ("2,3,5", (2, 3, 5)),
    ([2, 2, 2], (2, 2, 2)),
    ({"rule": "increasing"}, (2, 3, 5)),
    ("increasing", (2, 3, 5)),
])
def test_from_config(config, head):
    assert PrimeSequence.from_config(config).prefix(3) == head


@pytest.mark.parametrize("config", ["2,4", "x", {"rule": "bogus"}, {"rules": "increasing"}, []])
def test_bad_config(config):
    with pytest.raises(ValueError):
        PrimeSequence.from_config(config)


def test_explicit_runs_out():
    with pytest.raises(IndexError):
        PrimeSequence([2, 3]).p(3)


def test_qp_contains():
    assert qp_contains(INC, Fraction(5, 6)) == (True, 2)
    assert qp_contains(INC, 7) == (True, 0)
    ok, _ = qp_contains(PrimeSequence(rule="every-prime-infinitely-often"), Fraction(1, 35))
    assert ok
    twos = PrimeSequence([2] * 40)
    assert not qp_contains(twos, Fraction(1, 3))[0]
    assert not qp_contains(INC, Fraction(1, 4))[0]
    with pytest.raises(NegativeInput):
        qp_contains(INC, Fraction(-1, 2))


def test_level_embed():
    assert level_embed(INC, 1, 1).value == 1
    assert level_embed(INC, 3, 1).value == Fraction(1, 6)
    assert level_embed(INC, 2, 2).value == level_embed(INC, 1, 1).value
    assert level_embed(INC, 3, 1).stage == 3
    assert level_embed(INC, 3, 6).stage == 1


@given(st.integers(1, 6), st.integers(0, 500))
def test_level_embed_pushforward(n, m):
    # T^m at stage n and T^{m p_n} at stage n+1 name the same rational
    assert level_embed(INC, n, m).value == level_embed(INC, n + 1, m * INC.p(n)).value


def test_truncations():
    t = enumerate_truncation(INC, 1, 4)
    assert t.basis == tuple(Fraction(k, 2) for k in range(5))
    assert enumerate_truncation(INC, 0, 3).basis == (0, 1, 2, 3)
    t = enumerate_truncation(INC, 2, 6)
    assert t.basis[0] == 0 and t.basis[1] == Fraction(1, 6) and t.basis[-1] == 1 and len(t) == 7
    assert t.position(Fraction(1, 2)) == 3
    with pytest.raises(LevelMismatch):
        t.position(Fraction(1, 5))
    assert t.add(Fraction(1, 2), Fraction(1, 3)) == Fraction(5, 6)
    assert t.add(Fraction(1, 2), Fraction(2, 3)) is None


def test_overflow_guard():
    with pytest.raises(OverflowGuard):
        enumerate_truncation(INC, 16, 1000)


def test_v_matrix_examples():
    t = enumerate_truncation(INC, 0, 3)
    assert np.array_equal(v_matrix(0, t).matrix, np.eye(4, dtype=int))
    assert np.array_equal(v_matrix(1, t).matrix, shift_matrix(4).matrix)
    t = enumerate_truncation(INC, 1, 4)
    assert np.array_equal(v_matrix(Fraction(1, 2), t).matrix, shift_matrix(5).matrix)
    with pytest.raises(LevelMismatch):
        v_matrix(Fraction(1, 3), t)


@given(st.integers(0, 12), st.integers(0, 12))
@settings(max_examples=50)
def test_v_matrix_semigroup_law(a, b):
    # V_g V_h = V_{g+h} on the window, g, h on the 1/6 lattice
    t = enumerate_truncation(INC, 2, 30)
    g, h = Fraction(a, 6), Fraction(b, 6)
    assert np.array_equal((v_matrix(g, t) @ v_matrix(h, t)).matrix, v_matrix(g + h, t).matrix)


def test_v_matrix_isometry_interior():
    t = enumerate_truncation(INC, 1, 20)
    v = v_matrix(Fraction(3, 2), t)
    gram = (v.H @ v).matrix
    k = v.safe_interior
    assert k == 18
    assert np.array_equal(gram[:k, :k], np.eye(k, dtype=int))


def test_formal_sum():
    s = FormalSum({Fraction(1, 2): 2, 0: 1, Fraction(1, 3): 0})
    assert len(s) == 2
    assert s.stage(INC) == 2
    assert FormalSum({Fraction(1, 6): 1}).stage(INC) == 3
    assert s + FormalSum({0: -1}) == FormalSum({Fraction(1, 2): 2})
    assert str(FormalSum({0: 1, Fraction(1, 2): 3})) == "V[0] + 3*V[1/2]"


def test_qp_element_levels():
    g = QpElement.of(INC, Fraction(5, 6))
    assert g.level == 2 and g.numerator_at(INC, 3) == 25
    with pytest.raises(LevelMismatch):
        g.numerator_at(INC, 1)
    assert g.add(QpElement.of(INC, Fraction(1, 6)), INC) == QpElement(Fraction(1), 0)

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from poset_cstar.errors import IncompatibleCocone, StageOrderError
from poset_cstar.inductive import (
    Coburn,
    ColimitElement,
    Identity,
    InductiveSystem,
    canonical_cocone,
    canonical_form,
    chain_poset,
    check_functoriality,
    cocone_check,
    rational_cocone,
    rational_witness,
    injectivity_probe,
    toeplitz_chain,
    universal_map,
)
from poset_cstar.poset import validate_poset
from poset_cstar.semigroup import FormalSum, PrimeSequence
from poset_cstar.toeplitz import OperatorPoly

I = OperatorPoly.identity()
T = OperatorPoly.shift()
P = PrimeSequence([2, 3, 5, 7])


def test_identity_system(lam):
    bonding = {pair: Identity() for pair in lam.leq}
    system = InductiveSystem(lam, bonding, {a: (T, I, T ** 2) for a in lam.elements})
    assert check_functoriality(system)


def test_chain_bondings():
    system = toeplitz_chain(P, 3)
    assert system.sigma(1, 2) == Coburn(2)
    assert system.sigma(2, 3) == Coburn(3)
    assert system.sigma(1, 3)(T) == T ** 6
    assert check_functoriality(system)


def test_trivial_chain():
    system = toeplitz_chain(P, 1)
    assert system.stages() == (1,)
    assert system.sigma(1, 1)(T) == T


def test_functoriality_fault():
    system = toeplitz_chain(P, 3)
    system.bonding[(1, 3)] = Coburn(10)
    check = check_functoriality(system)
    assert not check and check.witness == (1, 2, 3)


def test_stage_order():
    system = toeplitz_chain(P, 3)
    with pytest.raises(StageOrderError):
        system.sigma(3, 1)
    with pytest.raises(StageOrderError):
        canonical_form(system, ColimitElement(3, T), 2)


def test_canonical_forms():
    system = toeplitz_chain(P, 3)
    assert canonical_form(system, ColimitElement(1, T), 3) == ColimitElement(3, T ** 6)
    assert canonical_form(system, ColimitElement(2, T ** 2), 2) == canonical_form(system, ColimitElement(1, T), 2)


def test_rational_witness():
    assert rational_witness(P, 1, T) == FormalSum({1: 1})
    assert rational_witness(P, 3, T) == FormalSum({Fraction(1, 6): 1})
    assert rational_witness(P, 2, I + 3 * T) == FormalSum({0: 1, Fraction(1, 2): 3})


def test_universal_map_lemma4():
    system = toeplitz_chain(P, 4)
    theta = universal_map(system, rational_cocone(P))
    assert theta(ColimitElement(2, T)) == FormalSum({Fraction(1, 2): 1})
    assert theta(ColimitElement(1, T)) == theta(ColimitElement(2, T ** 2))


def test_universal_map_identity_cocone():
    system = toeplitz_chain(P, 3)
    theta = universal_map(system, canonical_cocone(system, 3))
    elem = ColimitElement(3, T ** 5)
    assert theta(elem) == elem


def test_incompatible_cocone():
    system = toeplitz_chain(P, 3)
    # stage 2 uses the wrong lattice step
    bad = lambda a: (lambda p: rational_witness(P, 3 if a == 2 else a, p))
    assert not cocone_check(system, bad)
    with pytest.raises(IncompatibleCocone):
        universal_map(system, bad)


def test_injectivity_probe():
    system = toeplitz_chain(P, 4)
    theta = universal_map(system, rational_cocone(P))
    samples = [ColimitElement(1, T), ColimitElement(2, T ** 2), ColimitElement(2, T),
               ColimitElement(3, T ** 3), ColimitElement(1, I + T), ColimitElement(4, I + T ** 30)]
    report = injectivity_probe(theta, samples, 4)
    assert report["passed"] and report["pairs"] == 15


monomial = st.builds(lambda n, m: ColimitElement(n, T ** m), st.integers(1, 4), st.integers(0, 40))


@given(st.lists(monomial, min_size=2, max_size=8))
def test_injectivity_random(samples):
    system = toeplitz_chain(P, 4)
    theta = universal_map(system, rational_cocone(P))
    assert injectivity_probe(theta, samples, 4)["passed"]


def test_chain_poset():
    c = chain_poset(4)
    assert c.le(1, 4) and not c.le(4, 1)


def test_square_system(square):
    # exponents multiply along both routes to the top
    bond = {("bot", "l"): Coburn(2), ("bot", "r"): Coburn(3), ("l", "top"): Coburn(3),
            ("r", "top"): Coburn(2), ("bot", "top"): Coburn(6)}
    system = InductiveSystem(square, bond, {a: (T,) for a in square.elements})
    assert check_functoriality(system)

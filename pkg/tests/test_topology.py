import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from poset_cstar.circle import CLOSED, COMPLEMENT, CircleExample, RationalArc, arc_subset, random_arc
from poset_cstar.errors import ChainUnavailable, SizeLimit, UnknownElement
from poset_cstar.poset import DirectedFamily, maximal_directed_subsets, validate_poset
from poset_cstar.topology import (
    FiniteTopology,
    base_set,
    check_base_monotone,
    generate_topology,
    is_T1,
    isolated_points,
    neighborhood_chain,
    separating_witness,
)

from .conftest import posets


def fam(p):
    return maximal_directed_subsets(p)


def test_base_sets_lambda(lam):
    f = fam(lam)
    assert base_set(f, "a").indices == {0, 1}
    assert base_set(f, "c").indices == {0}
    assert base_set(f, "d").indices == {1}


def test_base_set_chain(chain3):
    f = fam(chain3)
    assert all(base_set(f, a).indices == {0} for a in "abc")


def test_base_set_unknown(lam):
    with pytest.raises(UnknownElement):
        base_set(fam(lam), "z")


def test_monotone_lambda(lam):
    assert check_base_monotone(fam(lam))


def test_monotone_fault_injection(lam):
    # an extra non-maximal member {c} puts index 2 in U_c but not in U_a
    bad = DirectedFamily(lam, [{"a", "c"}, {"a", "d"}, {"c"}])
    check = check_base_monotone(bad)
    assert not check
    assert check.witness == ("a", "c")


def test_singleton_topology():
    top = generate_topology(fam(validate_poset(["x"], [])))
    assert sorted(map(sorted, top.opens())) == [[], [0]]
    assert isolated_points(top) == {0}


def test_lambda_discrete(lam):
    top = generate_topology(fam(lam))
    assert sorted(map(sorted, top.opens())) == [[], [0], [0, 1], [1]]
    assert is_T1(top)
    assert isolated_points(top) == {0, 1}


def test_antichain_discrete(antichain3):
    top = generate_topology(fam(antichain3))
    assert len(top.opens()) == 8
    assert is_T1(top)


def test_indiscrete_not_T1():
    top = FiniteTopology([0, 1], [{0, 1}])
    assert not is_T1(top)
    assert separating_witness(top) == (0, 1)
    assert isolated_points(top) == frozenset()


def test_opens_size_limit():
    top = FiniteTopology(range(20), [{k} for k in range(20)], max_opens=1000)
    assert is_T1(top)
    with pytest.raises(SizeLimit):
        top.opens()


def test_opens_closed_under_operations():
    top = FiniteTopology(range(4), [{0, 1}, {1, 2}, {2, 3}, {0, 1, 2, 3}])
    opens = set(top.opens())
    for u in opens:
        for v in opens:
            assert u | v in opens and u & v in opens


@given(posets())
@settings(max_examples=100, deadline=None)
def test_generated_topologies_T1_and_monotone(p):
    f = fam(p)
    assert check_base_monotone(f)
    top = generate_topology(f)
    assert is_T1(top)
    assert isolated_points(top) == set(f.indices)


def test_lambda_chain_unavailable(lam):
    with pytest.raises(ChainUnavailable):
        neighborhood_chain(fam(lam), 0, 2)


def test_chain_search_on_abstract_family():
    # index 0 sits in nested base sets whose intersection is {0, 1}, so it is not isolated
    class Toy:
        indices = (0, 1, 2, 3)
        anchors = ("x", "y", "z")
        sets = {"x": {0, 1, 2, 3}, "y": {0, 1, 2}, "z": {0, 1}}

        def base_indices(self, a):
            return frozenset(self.sets[a])

        def contains(self, i, a):
            return i in self.sets[a]

        def le(self, a, b):
            return self.sets[b] <= self.sets[a]

        def order_pairs(self):
            return [(a, b) for a in self.anchors for b in self.anchors if self.le(a, b)]

    ch = neighborhood_chain(Toy(), 0, 3)
    assert ch.anchors == ("x", "y", "z")
    assert ch.verify(Toy().le)
    with pytest.raises(ChainUnavailable):
        neighborhood_chain(Toy(), 0, 4)


# circle example

def test_arc_construction():
    assert RationalArc.from_endpoints(Fraction(1, 4), Fraction(1, 2)) == RationalArc(CLOSED, Fraction(1, 4), Fraction(1, 2))
    assert RationalArc.from_endpoints(Fraction(1, 2), Fraction(1, 4)) == RationalArc(COMPLEMENT, Fraction(1, 4), Fraction(1, 2))
    with pytest.raises(ValueError):
        RationalArc(CLOSED, Fraction(1, 2), Fraction(1, 4))


def test_q8_closed_arc():
    ex = CircleExample(8)
    arc = RationalArc(CLOSED, Fraction(1, 4), Fraction(1, 2))
    expected = {Fraction(k, 8) for k in (5, 6, 7, 0, 1)}
    assert ex.base_indices(arc) == expected
    assert ex.complement_indices(arc) == expected


def test_q8_complement_arc():
    ex = CircleExample(8)
    arc = RationalArc(COMPLEMENT, Fraction(1, 4), Fraction(1, 2))
    assert ex.base_indices(arc) == {Fraction(3, 8)}
    assert ex.complement_indices(arc) == {Fraction(3, 8)}


def test_not_directed_witness(circle64):
    x1, x2, x3, x4 = (Fraction(k, 8) for k in (1, 3, 5, 7))
    a = RationalArc(CLOSED, x1, x4)
    b = RationalArc(COMPLEMENT, x2, x3)
    assert not any(arc_subset(a, c) and arc_subset(b, c) for c in circle64.anchors)


def test_arc_subset_exact():
    big = RationalArc(CLOSED, Fraction(1, 8), Fraction(7, 8))
    small = RationalArc(CLOSED, Fraction(1, 4), Fraction(1, 2))
    wrap = RationalArc(COMPLEMENT, Fraction(1, 8), Fraction(7, 8))
    assert arc_subset(small, big) and not arc_subset(big, small)
    assert not arc_subset(wrap, big) and not arc_subset(big, wrap)
    assert arc_subset(RationalArc(COMPLEMENT, Fraction(1, 4), Fraction(1, 2)), RationalArc(COMPLEMENT, Fraction(1, 3), Fraction(1, 2)))


def test_arc_subset_against_dense_sampling():
    rng = np.random.default_rng(3)
    probes = [Fraction(k, 2 * 3 * 5 * 7 * 256) for k in range(2 * 3 * 5 * 7 * 256)][::7]
    for _ in range(40):
        a, b = random_arc(rng, 16), random_arc(rng, 16)
        sampled = all(b.contains(t) for t in probes if a.contains(t))
        if arc_subset(a, b):
            assert sampled
        # endpoints have denominators <= 16, so the sample lattice resolves every gap
        else:
            assert not sampled


def test_membership_routes_agree(circle64):
    assert all(circle64.base_indices(a) == circle64.complement_indices(a) for a in circle64.anchors)


def test_circle_no_isolated_points(circle64):
    top = generate_topology(circle64)
    assert isolated_points(top) == frozenset()
    # a finite T1 space is discrete, so this view cannot be T1
    assert not is_T1(top)


def test_circle_min_neighbourhood_blocks(circle64):
    top = generate_topology(circle64)
    assert all(len(top.minimal_neighborhood(z)) == 2 for z in circle64.grid)


def test_circle_chain_depth3(circle64):
    ch = neighborhood_chain(circle64, 0, 3)
    assert ch.verify(circle64.le)
    for n, u in enumerate(ch.neighborhoods, 1):
        r = Fraction(1, 2 ** (n + 2))
        assert u == {z for z in circle64.grid if z < r or z > 1 - r}
    assert [len(u) for u in ch.neighborhoods] == [15, 7, 3]


def test_circle_chain_off_grid(circle64):
    z = Fraction(1, 3)
    ch = neighborhood_chain(circle64, z, 1)
    assert not ch.anchors[0].contains(z)
    ch = neighborhood_chain(circle64, z, 6)
    assert ch.verify(circle64.le)
    assert all(z in u for u in ch.neighborhoods)
    sizes = [len(u) for u in ch.neighborhoods]
    assert sizes == sorted(sizes, reverse=True) and len(set(sizes)) == 6


def test_circle_chain_too_deep():
    with pytest.raises(ChainUnavailable):
        CircleExample(8).neighborhood_chain(0, 5)


def test_circle_random_arcs_routes():
    ex = CircleExample(64)
    rng = np.random.default_rng(11)
    for _ in range(50):
        a = random_arc(rng)
        assert ex.base_indices(a) == ex.complement_indices(a)

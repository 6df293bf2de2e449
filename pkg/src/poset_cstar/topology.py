"""The topology on the index set I generated by the base sets U_a."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .checks import PASS, Check
from .errors import ChainUnavailable, SizeLimit

DEFAULT_MAX_OPENS = 2**16


@dataclass(frozen=True)
class BaseSet:
    anchor: object
    indices: frozenset


def base_set(family, a) -> BaseSet:
    """U_a = {i in I : a in K_i}."""
    return BaseSet(a, frozenset(family.base_indices(a)))


def check_base_monotone(family) -> Check:
    """a <= b must give U_b inside U_a; the witness is the first offending (a, b)."""
    for a, b in sorted(family.order_pairs(), key=repr):
        if not family.base_indices(b) <= family.base_indices(a):
            return Check(False, (a, b), f"U_{b} not inside U_{a}")
    return PASS


class FiniteTopology:
    """Topology on a finite ground set generated by a family of base sets.

    Points are handled as bit positions; the minimal open neighbourhood of a
    point (intersection of all base sets containing it) determines the whole
    topology, so T1 and isolation are read off it. The full list of open
    sets is only built on request.
    """

    def __init__(self, ground, base, max_opens=DEFAULT_MAX_OPENS):
        self.ground = tuple(ground)
        self._pos = {x: k for k, x in enumerate(self.ground)}
        self.base = tuple(frozenset(b) for b in base)
        self.max_opens = max_opens
        full = (1 << len(self.ground)) - 1
        self._full = full
        self._base_masks = tuple(self._mask(b) for b in self.base)

    def _mask(self, subset) -> int:
        return sum(1 << self._pos[x] for x in subset)

    def _unmask(self, mask) -> frozenset:
        return frozenset(x for k, x in enumerate(self.ground) if mask >> k & 1)

    @cached_property
    def _minimal(self) -> tuple:
        out = []
        for k in range(len(self.ground)):
            nb = self._full
            for m in self._base_masks:
                if m >> k & 1:
                    nb &= m
            out.append(nb)
        return tuple(out)

    def minimal_neighborhood(self, x) -> frozenset:
        return self._unmask(self._minimal[self._pos[x]])

    def is_open(self, subset) -> bool:
        mask = self._mask(subset)
        return all(self._minimal[k] & ~mask == 0 for k in range(len(self.ground)) if mask >> k & 1)

    @cached_property
    def _open_masks(self) -> tuple:
        atoms = sorted(set(self._minimal))
        opens = {0, self._full}
        for atom in atoms:
            new = {o | atom for o in opens}
            opens |= new
            if len(opens) > self.max_opens:
                raise SizeLimit(f"more than {self.max_opens} open sets", witness=len(opens))
        return tuple(sorted(opens))

    def opens(self) -> list:
        """All open sets, ordered by bit pattern. Raises SizeLimit past ``max_opens``."""
        return [self._unmask(m) for m in self._open_masks]


def generate_topology(family, max_opens=DEFAULT_MAX_OPENS) -> FiniteTopology:
    """Topology on the family's indices generated by {U_a}, with I itself always open."""
    base = [family.base_indices(a) for a in family.anchors]
    return FiniteTopology(family.indices, base, max_opens=max_opens)


def is_T1(top: FiniteTopology) -> bool:
    # for finite spaces: T1 iff every minimal neighbourhood is a singleton
    return all(m & (m - 1) == 0 for m in top._minimal)


def separating_witness(top: FiniteTopology):
    """First pair (i, j) where every open set containing i also contains j."""
    for k, m in enumerate(top._minimal):
        for j in range(len(top.ground)):
            if j != k and m >> j & 1:
                return top.ground[k], top.ground[j]
    return None


def isolated_points(top: FiniteTopology) -> frozenset:
    return frozenset(x for k, x in enumerate(top.ground) if top._minimal[k] == 1 << k)


@dataclass(frozen=True)
class NeighborhoodChain:
    """Anchors a_1 <= ... <= a_N at a point, with their base sets U_{a_n} (nested)."""

    point: object
    anchors: tuple
    neighborhoods: tuple

    @property
    def depth(self) -> int:
        return len(self.anchors)

    def verify(self, le) -> Check:
        """Point membership, nesting of the U's and monotonicity of the anchors."""
        for n, u in enumerate(self.neighborhoods, 1):
            if self.point not in u:
                return Check(False, n, "point outside U_{a_%d}" % n)
        for n in range(1, self.depth):
            if not self.neighborhoods[n] <= self.neighborhoods[n - 1]:
                return Check(False, n, "U_{a_%d} not nested in U_{a_%d}" % (n + 1, n))
            if not le(self.anchors[n - 1], self.anchors[n]):
                return Check(False, n, "a_%d not <= a_%d" % (n, n + 1))
        return PASS

    def truncated(self, depth: int) -> "NeighborhoodChain":
        return NeighborhoodChain(self.point, self.anchors[:depth], self.neighborhoods[:depth])

    def to_json(self) -> dict:
        return {
            "point": str(self.point),
            "anchors": [str(a) for a in self.anchors],
            "sizes": [len(u) for u in self.neighborhoods],
        }


def neighborhood_chain(family, point, depth: int) -> NeighborhoodChain:
    """Monotone anchors whose base sets strictly shrink around ``point``.

    Families that know their own geometry (the circle example) supply a
    ``neighborhood_chain`` method; otherwise a depth-first search runs over
    the anchors of K_point.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if hasattr(family, "neighborhood_chain"):
        return family.neighborhood_chain(point, depth)
    top = generate_topology(family)
    if point in isolated_points(top):
        raise ChainUnavailable(f"index {point!r} is isolated", witness=point)
    anchors = [a for a in family.anchors if family.contains(point, a)]
    u = {a: frozenset(family.base_indices(a)) for a in anchors}

    def search(path):
        if len(path) == depth:
            return path
        last = path[-1] if path else None
        for a in anchors:
            if last is not None and not (family.le(last, a) and u[a] < u[last]):
                continue
            found = search(path + [a])
            if found:
                return found
        return None

    found = search([])
    if not found:
        raise ChainUnavailable(
            f"no strictly shrinking monotone chain of depth {depth} at {point!r}", witness=point
        )
    return NeighborhoodChain(point, tuple(found), tuple(u[a] for a in found))

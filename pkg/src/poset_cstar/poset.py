"""Finite posets and their maximal upward directed subsets."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable

import numpy as np

from .errors import CycleError, SizeLimit, UnknownElement

DEFAULT_MAX_EXHAUSTIVE = 20


def max_exhaustive() -> int:
    """Size bound for the 2^n subset scan; ``POSET_CSTAR_MAX_EXHAUSTIVE`` overrides it."""
    raw = os.environ.get("POSET_CSTAR_MAX_EXHAUSTIVE")
    if raw is None:
        return DEFAULT_MAX_EXHAUSTIVE
    return int(raw)


@dataclass(frozen=True)
class Poset:
    elements: tuple
    leq: frozenset

    @cached_property
    def _position(self):
        return {a: k for k, a in enumerate(self.elements)}

    @cached_property
    def up(self) -> dict:
        ups = {a: set() for a in self.elements}
        for a, b in self.leq:
            ups[a].add(b)
        return {a: frozenset(s) for a, s in ups.items()}

    @cached_property
    def down(self) -> dict:
        dns = {a: set() for a in self.elements}
        for a, b in self.leq:
            dns[b].add(a)
        return {a: frozenset(s) for a, s in dns.items()}

    @cached_property
    def up_masks(self) -> tuple:
        """Bitmask of the up-set of each element, bit k = ``elements[k]``."""
        pos = self._position
        return tuple(sum(1 << pos[b] for b in self.up[a]) for a in self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, a):
        return a in self._position

    def le(self, a, b) -> bool:
        return (a, b) in self.leq

    def lt(self, a, b) -> bool:
        return a != b and (a, b) in self.leq

    def check_member(self, a):
        if a not in self._position:
            raise UnknownElement(f"unknown element {a!r}", witness=a)

    def maximal_elements(self) -> list:
        return [a for a in self.elements if self.up[a] == {a}]

    def minimal_elements(self) -> list:
        return [a for a in self.elements if self.down[a] == {a}]

    def covers(self) -> list:
        """Pairs (a, b) with a < b and nothing strictly between."""
        out = []
        for a, b in sorted(self.leq, key=self._pair_key):
            if a == b:
                continue
            if not any(self.lt(a, c) and self.lt(c, b) for c in self.elements):
                out.append((a, b))
        return out

    def _pair_key(self, pair):
        return (self._position[pair[0]], self._position[pair[1]])

    def maximal_chains(self) -> list:
        """All maximal chains, each listed bottom to top."""
        succ = {a: [] for a in self.elements}
        for a, b in self.covers():
            succ[a].append(b)
        chains = []

        def extend(path):
            nxt = succ[path[-1]]
            if not nxt:
                chains.append(tuple(path))
                return
            for b in nxt:
                extend(path + [b])

        for a in self.minimal_elements():
            extend([a])
        return chains

    def to_json(self) -> dict:
        pairs = sorted((p for p in self.leq if p[0] != p[1]), key=self._pair_key)
        return {"elements": list(self.elements), "leq": [list(p) for p in pairs]}


def validate_poset(elements: Iterable[Hashable], relation_pairs: Iterable = ()) -> Poset:
    """Build a Poset from generating pairs, closing them reflexively and transitively.

    Raises UnknownElement for a pair naming a missing id, CycleError when the
    closure would force ``a <= b <= a`` with ``a != b``.
    """
    elements = tuple(elements)
    if not elements:
        raise ValueError("a poset needs at least one element")
    if len(set(elements)) != len(elements):
        raise ValueError("duplicate element ids")
    pos = {a: k for k, a in enumerate(elements)}
    n = len(elements)
    reach = [1 << k for k in range(n)]
    for pair in relation_pairs:
        a, b = pair
        for x in (a, b):
            if x not in pos:
                raise UnknownElement(f"relation references unknown element {x!r}", witness=x)
        reach[pos[a]] |= 1 << pos[b]
    # Warshall closure on bit rows
    for k in range(n):
        bit = 1 << k
        row_k = reach[k]
        for i in range(n):
            if reach[i] & bit:
                reach[i] |= row_k
    for i in range(n):
        for j in range(i + 1, n):
            if reach[i] >> j & 1 and reach[j] >> i & 1:
                raise CycleError(
                    f"{elements[i]!r} <= {elements[j]!r} <= {elements[i]!r}",
                    witness=(elements[i], elements[j]),
                )
    leq = frozenset(
        (elements[i], elements[j]) for i in range(n) for j in range(n) if reach[i] >> j & 1
    )
    return Poset(elements, leq)


def poset_from_json(obj) -> Poset:
    """Ingest ``{"elements": [...], "leq": [[a, b], ...]}``."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "elements" not in obj:
        raise ValueError('poset JSON must be an object with an "elements" key')
    pairs = obj.get("leq", [])
    for p in pairs:
        if not isinstance(p, (list, tuple)) or len(p) != 2:
            raise ValueError(f"leq entries must be pairs, got {p!r}")
    return validate_poset(obj["elements"], [tuple(p) for p in pairs])


def is_upward_directed(poset: Poset, subset) -> bool:
    subset = set(subset)
    for a in subset:
        poset.check_member(a)
    items = list(subset)
    for x, a in enumerate(items):
        up_a = poset.up[a] & subset
        for b in items[x + 1:]:
            if not (up_a & poset.up[b]):
                return False
    return True


def _member_key(member):
    return sorted(member)


@dataclass(frozen=True)
class DirectedFamily:
    """An indexed family of subsets K_0, K_1, ... of a poset.

    Index i refers to ``members[i]``. Construction does not validate; use
    :meth:`validate` (the fault-injection tests rely on that).
    """

    poset: Poset
    members: tuple
    _contains: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(frozenset(m) for m in self.members))
        index = {a: set() for a in self.poset.elements}
        for i, m in enumerate(self.members):
            for a in m:
                index.setdefault(a, set()).add(i)
        object.__setattr__(self, "_contains", {a: frozenset(s) for a, s in index.items()})

    def __len__(self):
        return len(self.members)

    @property
    def indices(self) -> tuple:
        return tuple(range(len(self.members)))

    @property
    def anchors(self) -> tuple:
        return self.poset.elements

    def base_indices(self, a) -> frozenset:
        self.poset.check_member(a)
        return self._contains[a]

    def contains(self, i, a) -> bool:
        return a in self.members[i]

    def le(self, a, b) -> bool:
        return self.poset.le(a, b)

    def order_pairs(self):
        return iter(self.poset.leq)

    def validate(self):
        """Return the first violated family invariant as a string, or None."""
        seen = set()
        for i, m in enumerate(self.members):
            if m in seen:
                return f"member {i} repeats an earlier member"
            seen.add(m)
            if not is_upward_directed(self.poset, m):
                return f"member {i} is not upward directed"
            for x in self.poset.elements:
                if x not in m and is_upward_directed(self.poset, m | {x}):
                    return f"member {i} extends by {x!r}"
        covered = set().union(*self.members) if self.members else set()
        if covered != set(self.poset.elements):
            return "members do not cover the ground set"
        return None

    def to_json(self) -> dict:
        return {
            "index_count": len(self.members),
            "members": [_member_key(m) for m in self.members],
        }


def _sorted_family(poset, members) -> DirectedFamily:
    return DirectedFamily(poset, tuple(sorted(members, key=_member_key)))


def maximal_directed_subsets(poset: Poset) -> DirectedFamily:
    """Maximal upward directed subsets, ordered lexicographically.

    A non-empty finite directed set contains an upper bound of all its
    members, i.e. a greatest element, so every directed set lies below some
    maximal element m and the principal down-set of m is directed. The
    maximal directed subsets are therefore exactly these down-sets. Each
    candidate is still checked against one-point extensions before it is
    returned.
    """
    members = []
    for m in poset.maximal_elements():
        candidate = set(poset.down[m])
        for x in poset.elements:
            if x not in candidate and is_upward_directed(poset, candidate | {x}):
                raise AssertionError(f"down-set of {m!r} extends by {x!r}")
        members.append(frozenset(candidate))
    return _sorted_family(poset, members)


def brute_force_directed_family(poset: Poset, limit: int | None = None) -> DirectedFamily:
    """Exhaustive scan of all 2^n subsets, keeping the maximal directed ones.

    Directedness is tested from the definition on every subset, and
    maximality against every strict superset (not only one-point extensions).
    """
    n = len(poset)
    limit = max_exhaustive() if limit is None else limit
    if n > limit:
        raise SizeLimit(f"{n} elements exceeds exhaustive bound {limit}", witness=n)
    masks = np.arange(1 << n, dtype=np.int64)
    up = poset.up_masks
    directed = np.ones(1 << n, dtype=bool)
    for a in range(n):
        in_a = (masks >> a) & 1 == 1
        for b in range(a + 1, n):
            both = in_a & ((masks >> b) & 1 == 1)
            bounded = (masks & (up[a] & up[b])) != 0
            directed &= ~both | bounded
    # superset-OR transform: has_super[S] = any directed T with T >= S
    has_super = directed.copy()
    for x in range(n):
        bit = 1 << x
        lacking = (masks & bit) == 0
        has_super[lacking] |= has_super[masks[lacking] | bit]
    strict_super = np.zeros(1 << n, dtype=bool)
    for x in range(n):
        bit = 1 << x
        lacking = (masks & bit) == 0
        strict_super[lacking] |= has_super[masks[lacking] | bit]
    maximal = directed & ~strict_super
    members = []
    for mask in np.flatnonzero(maximal):
        members.append(frozenset(poset.elements[k] for k in range(n) if int(mask) >> k & 1))
    return _sorted_family(poset, members)

"""Closed arcs of the unit circle, ordered by inclusion, at finite resolution.

A circle point is a rational t in [0, 1) standing for exp(2 pi i t). The
index set is the whole circle; it is evaluated on the grid {k/q}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import ChainUnavailable
from .topology import NeighborhoodChain

CLOSED = "closed-arc"
COMPLEMENT = "complement-of-open-arc"


def _point(t) -> Fraction:
    return Fraction(t) % 1


@dataclass(frozen=True, order=True)
class RationalArc:
    """Either the closed arc [x, y] or S^1 minus the open arc (x, y), with 0 <= x < y < 1."""

    kind: str
    x: Fraction
    y: Fraction

    def __post_init__(self):
        if self.kind not in (CLOSED, COMPLEMENT):
            raise ValueError(f"unknown arc kind {self.kind!r}")
        x, y = Fraction(self.x), Fraction(self.y)
        if not 0 <= x < y < 1:
            raise ValueError(f"need 0 <= x < y < 1, got x={x}, y={y}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_endpoints(cls, start, stop) -> "RationalArc":
        """Closed arc running counterclockwise from ``start`` to ``stop``."""
        u, v = _point(start), _point(stop)
        if u == v:
            raise ValueError("degenerate arc")
        return cls(CLOSED, u, v) if u < v else cls(COMPLEMENT, v, u)

    def contains(self, t) -> bool:
        t = _point(t)
        if self.kind == CLOSED:
            return self.x <= t <= self.y
        return t <= self.x or t >= self.y

    def complement(self) -> "OpenArc":
        if self.kind == CLOSED:
            return OpenArc(self.y, self.x)
        return OpenArc(self.x, self.y)

    @property
    def endpoints(self) -> tuple:
        return (self.x, self.y)

    def __str__(self):
        if self.kind == CLOSED:
            return f"[{self.x},{self.y}]"
        return f"S1\\({self.x},{self.y})"


@dataclass(frozen=True)
class OpenArc:
    """Open arc running counterclockwise from ``start`` to ``stop``."""

    start: Fraction
    stop: Fraction

    def contains(self, t) -> bool:
        t = _point(t)
        if self.start < self.stop:
            return self.start < t < self.stop
        return t > self.start or t < self.stop


def arc_subset(a: RationalArc, b: RationalArc) -> bool:
    """Exact test of a inside b.

    Both sets are unions of intervals with endpoints among the (at most four)
    critical points, so membership is constant between consecutive critical
    points; testing each critical point and one interior point of every gap
    decides inclusion.
    """
    crit = sorted(set(a.endpoints + b.endpoints))
    probes = list(crit)
    for k, c in enumerate(crit):
        nxt = crit[k + 1] if k + 1 < len(crit) else crit[0] + 1
        probes.append(_point((c + nxt) / 2))
    return all(b.contains(t) for t in probes if a.contains(t))


def random_arc(rng, max_denominator: int = 256) -> RationalArc:
    """Arc with random rational endpoints (``rng`` is a numpy Generator)."""
    while True:
        d1, d2 = (int(d) for d in rng.integers(1, max_denominator + 1, size=2))
        u = Fraction(int(rng.integers(0, d1)), d1)
        v = Fraction(int(rng.integers(0, d2)), d2)
        if u != v:
            return RationalArc.from_endpoints(u, v)


class CircleExample:
    """The arc poset at resolution q.

    ``indices`` is the grid {k/q}. ``anchors`` is a finite family of arcs
    whose endpoints sit half a grid step off every second grid point, so
    each base set U_A (the grid points off A) is a union of blocks of at
    least two neighbouring grid points and no grid point is isolated.
    Arbitrary rational arcs are accepted by every method.
    """

    def __init__(self, resolution: int):
        if resolution < 4:
            raise ValueError("resolution must be at least 4")
        self.resolution = q = resolution
        self.grid = tuple(Fraction(k, q) for k in range(q))
        self.endpoints = tuple(Fraction(4 * k + 1, 2 * q) for k in range(q // 2))

    @property
    def indices(self) -> tuple:
        return self.grid

    @cached_property
    def anchors(self) -> tuple:
        return tuple(
            RationalArc.from_endpoints(u, v) for u in self.endpoints for v in self.endpoints if u != v
        )

    def contains(self, z, arc: RationalArc) -> bool:
        """Is ``arc`` a member of K_z, i.e. does it avoid z?"""
        return not arc.contains(z)

    def le(self, a: RationalArc, b: RationalArc) -> bool:
        return arc_subset(a, b)

    def order_pairs(self):
        for a in self.anchors:
            for b in self.anchors:
                if arc_subset(a, b):
                    yield a, b

    def member(self, z) -> tuple:
        """K_z restricted to the finite arc family."""
        return tuple(a for a in self.anchors if self.contains(z, a))

    def base_indices(self, arc: RationalArc, points=None) -> frozenset:
        """U_A = {z : A in K_z}, evaluated on ``points`` (default the grid)."""
        points = self.grid if points is None else points
        return frozenset(z for z in points if self.contains(z, arc))

    def complement_indices(self, arc: RationalArc, points=None) -> frozenset:
        """Grid points of the open arc S^1 minus A."""
        points = self.grid if points is None else points
        hole = arc.complement()
        return frozenset(z for z in points if hole.contains(z))

    def chain_radii(self, depth: int) -> list:
        """Radii max(2^-(n+2), (depth-n+1)/q), n = 1..depth.

        The dyadic radii alone stop separating grid points once 2^-(n+2) < 1/q;
        the second term keeps consecutive radii at least 1/q apart so every
        step removes a grid point.
        """
        q = self.resolution
        return [max(Fraction(1, 2 ** (n + 2)), Fraction(depth - n + 1, q)) for n in range(1, depth + 1)]

    def neighborhood_chain(self, z, depth: int) -> NeighborhoodChain:
        """A_n = S^1 minus the open arc of radius r_n around z; U_{A_n} shrinks to z."""
        if depth < 1:
            raise ValueError("depth must be at least 1")
        z = _point(z)
        radii = self.chain_radii(depth)
        if radii[0] >= Fraction(1, 2):
            raise ChainUnavailable(
                f"depth {depth} needs more than {self.resolution} grid points", witness=depth
            )
        points = self.grid if z in self.grid else self.grid + (z,)
        anchors = tuple(RationalArc.from_endpoints(z + r, z - r) for r in radii)
        hoods = tuple(self.base_indices(a, points) for a in anchors)
        for n in range(1, depth):
            if not hoods[n] < hoods[n - 1]:
                raise ChainUnavailable(f"U_{{a_{n + 1}}} does not shrink at resolution {self.resolution}")
        return NeighborhoodChain(z, anchors, hoods)

    def points_for(self, chain: NeighborhoodChain) -> tuple:
        return self.grid if chain.point in self.grid else self.grid + (chain.point,)

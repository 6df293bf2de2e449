"""Finite inductive systems over posets and their colimits in canonical form.

A colimit element is a pair (stage, payload). Diagrams here always have a
greatest stage, so the class of (a, x) is represented by the pushforward of
x to a chosen terminal stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from .checks import PASS, Check
from .errors import IncompatibleCocone, StageOrderError
from .poset import Poset, validate_poset
from .semigroup import FormalSum, PrimeSequence, level_embed
from .toeplitz import OperatorPoly, coburn_map


@dataclass(frozen=True)
class Identity:
    def __call__(self, x):
        return x

    def __str__(self):
        return "id"


@dataclass(frozen=True)
class Coburn:
    """T -> T^factor on analytic polynomials."""

    factor: int

    def __call__(self, p: OperatorPoly) -> OperatorPoly:
        return coburn_map(self.factor)(p)

    def __str__(self):
        return f"T->T^{self.factor}"


@dataclass(frozen=True)
class Restriction:
    """Restrict an operator field to a smaller domain, pointwise."""

    domain: frozenset

    def __call__(self, f):
        return f.restrict(self.domain)

    def __str__(self):
        return f"restrict[{len(self.domain)}]"


@dataclass(frozen=True)
class ColimitElement:
    stage: Any
    payload: Any

    def __str__(self):
        return f"({self.stage}, {self.payload})"


@dataclass
class InductiveSystem:
    """Poset-indexed diagram: ``bonding[(a, b)]`` for a <= b, generator payloads per stage.

    A missing diagonal entry (a, a) means the identity.
    """

    index: Poset
    bonding: dict
    generators: Mapping = field(default_factory=dict)

    def sigma(self, a, b):
        if not self.index.le(a, b):
            raise StageOrderError(f"{a!r} is not <= {b!r}", witness=(a, b))
        if a == b and (a, b) not in self.bonding:
            return Identity()
        return self.bonding[(a, b)]

    def stages(self) -> tuple:
        return self.index.elements

    def sample(self, a) -> tuple:
        return tuple(self.generators.get(a, ()))


def check_functoriality(system: InductiveSystem) -> Check:
    """sigma_aa = id and sigma_ca = sigma_cb o sigma_ba on every stage's generators."""
    idx = system.index
    for a in idx.elements:
        for x in system.sample(a):
            if system.sigma(a, a)(x) != x:
                return Check(False, (a, a, a), f"sigma_{a}{a} moves {x}")
    for a in idx.elements:
        for b in idx.up[a]:
            for c in idx.up[b]:
                direct = system.sigma(a, c)
                via = system.sigma(b, c)
                first = system.sigma(a, b)
                for x in system.sample(a):
                    if direct(x) != via(first(x)):
                        return Check(False, (a, b, c), f"composition fails on {x}")
    return PASS


def canonical_form(system: InductiveSystem, elem: ColimitElement, terminal) -> ColimitElement:
    if not system.index.le(elem.stage, terminal):
        raise StageOrderError(f"stage {elem.stage!r} is not below terminal {terminal!r}",
                              witness=(elem.stage, terminal))
    return ColimitElement(terminal, system.sigma(elem.stage, terminal)(elem.payload))


def chain_poset(n: int) -> Poset:
    """The chain 1 < 2 < ... < n."""
    return validate_poset(range(1, n + 1), [(k, k + 1) for k in range(1, n)])


def toeplitz_chain(primes: PrimeSequence, n: int) -> InductiveSystem:
    """Stages 1..n of T_1 -> T_2 -> ..., the step k -> k+1 being T -> T^{p_k}."""
    if n < 1:
        raise ValueError("need at least one stage")
    index = chain_poset(n)
    bonding = {}
    for a in range(1, n + 1):
        for b in range(a, n + 1):
            bonding[(a, b)] = Coburn(primes.product(a, b - 1))
    gens = (OperatorPoly.shift(), OperatorPoly.identity())
    return InductiveSystem(index, bonding, {a: gens for a in range(1, n + 1)})


def rational_witness(primes: PrimeSequence, n: int, p: OperatorPoly) -> FormalSum:
    """Send T^m at stage n to V_g with g = m / (p_1...p_{n-1}), linearly."""
    return FormalSum({level_embed(primes, n, m).value: c for m, c in p.terms.items()})


def rational_cocone(primes: PrimeSequence) -> Callable:
    return lambda a: (lambda p: rational_witness(primes, a, p))


def canonical_cocone(system: InductiveSystem, terminal) -> Callable:
    """The maps of each stage into the diagram's own colimit."""
    return lambda a: (lambda x: canonical_form(system, ColimitElement(a, x), terminal))


@dataclass
class UniversalMap:
    """theta on the colimit, defined by theta(a, x) = psi_a(x)."""

    system: InductiveSystem
    cocone: Callable

    def __call__(self, elem: ColimitElement):
        return self.cocone(elem.stage)(elem.payload)

    def well_defined_on(self, pairs) -> Check:
        """Each (a, x), b pair: theta(a, x) must equal theta(b, sigma_ba(x))."""
        for a, x, b in pairs:
            lhs = self(ColimitElement(a, x))
            rhs = self(ColimitElement(b, self.system.sigma(a, b)(x)))
            if lhs != rhs:
                return Check(False, (a, b, x), "presentations disagree")
        return PASS


def cocone_check(system: InductiveSystem, cocone: Callable) -> Check:
    """psi_a = psi_b o sigma_ba on generators, for every a <= b."""
    idx = system.index
    for a in idx.elements:
        psi_a = cocone(a)
        for b in idx.up[a]:
            psi_b = cocone(b)
            sigma = system.sigma(a, b)
            for x in system.sample(a):
                if psi_a(x) != psi_b(sigma(x)):
                    return Check(False, (a, b, x), f"psi_{a} != psi_{b} o sigma_{b}{a}")
    return PASS


def universal_map(system: InductiveSystem, cocone: Callable) -> UniversalMap:
    """The unique map out of the colimit through a compatible cocone.

    ``cocone(a)`` returns psi_a. Raises IncompatibleCocone if the cocone law
    fails on the generators.
    """
    check = cocone_check(system, cocone)
    if not check:
        raise IncompatibleCocone(check.detail, witness=check.witness)
    theta = UniversalMap(system, cocone)
    pairs = [(a, x, b) for a in system.index.elements for b in system.index.up[a] for x in system.sample(a)]
    wd = theta.well_defined_on(pairs)
    if not wd:
        raise IncompatibleCocone(wd.detail, witness=wd.witness)
    return theta


def injectivity_probe(theta: UniversalMap, samples, terminal) -> dict:
    """Compare theta on all pairs of sampled colimit elements.

    Equivalent elements (equal canonical forms) must have equal images and
    inequivalent ones distinct images.
    """
    system = theta.system
    forms = [canonical_form(system, s, terminal) for s in samples]
    images = [theta(s) for s in samples]
    collisions, splits, checked = [], [], 0
    for i in range(len(samples)):
        for j in range(i + 1, len(samples)):
            checked += 1
            same_form = forms[i] == forms[j]
            same_image = images[i] == images[j]
            if same_form and not same_image:
                splits.append((str(samples[i]), str(samples[j])))
            elif same_image and not same_form:
                collisions.append((str(samples[i]), str(samples[j])))
    return {
        "pairs": checked,
        "collisions": collisions,
        "splits": splits,
        "passed": not collisions and not splits,
    }

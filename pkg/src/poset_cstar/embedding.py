"""Operator fields over base sets and the embedding of C*_r(Q_P^+) into their colimit.

Fields are finite assignments j -> OperatorPoly. Along a neighbourhood chain
U_{a_1} > U_{a_2} > ... > U_{a_N} of a point, the cells are
W_n = U_{a_n} minus U_{a_{n+1}} (n < N) and the residual is U_{a_N}.
The field L_{a_n} carries T^(p_n ... p_k) on W_k; residual indices get
the identity, a convention that keeps every component an isometry and
commutes with T -> T^p.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .checks import PASS, Check
from .errors import (
    ChainTooShort,
    CofinalityFailure,
    DegreeOverflow,
    DepthExceeded,
    DimensionMismatch,
    EmptyDomain,
    NotSubset,
)
from .inductive import ColimitElement, InductiveSystem, Restriction, canonical_form, chain_poset
from .semigroup import FormalSum, PrimeSequence, QpElement
from .topology import NeighborhoodChain
from .toeplitz import (
    OperatorPoly,
    coburn_map,
    evaluate,
    identity_matrix,
    masked_equal,
    operator_norm,
    symbol_sup_norm,
)

NORM_TOL = 1e-9
MATRIX_TOL = 1e-3


class OperatorField:
    """An element f of the product algebra over a finite index set."""

    __slots__ = ("assignment",)

    def __init__(self, assignment: Mapping):
        if not assignment:
            raise EmptyDomain("operator field on an empty domain")
        self.assignment = dict(sorted(assignment.items()))

    @classmethod
    def constant(cls, domain, p: OperatorPoly) -> "OperatorField":
        return cls({j: p for j in domain})

    @property
    def domain(self) -> frozenset:
        return frozenset(self.assignment)

    def __getitem__(self, j) -> OperatorPoly:
        return self.assignment[j]

    def __iter__(self):
        return iter(self.assignment.items())

    def __len__(self):
        return len(self.assignment)

    def __eq__(self, other):
        if isinstance(other, OperatorField):
            return self.assignment == other.assignment
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.assignment.items()))

    def _zip(self, other, op):
        if self.domain != other.domain:
            raise DimensionMismatch("fields live on different domains")
        return OperatorField({j: op(p, other[j]) for j, p in self})

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __mul__(self, other):
        if isinstance(other, OperatorField):
            return self._zip(other, lambda a, b: a * b)
        return OperatorField({j: p * other for j, p in self})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return OperatorField({j: p ** k for j, p in self})

    def map(self, fn) -> "OperatorField":
        return OperatorField({j: fn(p) for j, p in self})

    def restrict(self, domain) -> "OperatorField":
        return restrict(self, domain)

    def sup_norm(self, grid: int) -> float:
        """max_j ||f(j)||, each component norm being the sup of its symbol."""
        cache = {}
        for _, p in self:
            if p not in cache:
                cache[p] = symbol_sup_norm(p, grid)
        return max(cache.values())

    def __repr__(self):
        return f"OperatorField({len(self)} indices)"


class FieldAlgebra:
    """Product of copies of the Toeplitz algebra over a finite domain."""

    def __init__(self, domain):
        domain = frozenset(domain)
        if not domain:
            raise EmptyDomain("field algebra over an empty domain")
        self.domain = domain

    def constant(self, p: OperatorPoly) -> OperatorField:
        return OperatorField.constant(self.domain, p)

    def identity(self) -> OperatorField:
        return self.constant(OperatorPoly.identity())

    def field(self, mapping) -> OperatorField:
        f = OperatorField(mapping) if isinstance(mapping, Mapping) else OperatorField(
            {j: mapping(j) for j in self.domain})
        if f.domain != self.domain:
            raise DimensionMismatch("field domain differs from the algebra's")
        return f

    def norm(self, f: OperatorField, grid: int = 4096) -> float:
        return f.sup_norm(grid)


def build_field_algebra(domain) -> FieldAlgebra:
    return FieldAlgebra(domain)


def restrict(f: OperatorField, domain) -> OperatorField:
    """tau_ba: keep the components on ``domain``."""
    domain = frozenset(domain)
    if not domain:
        raise EmptyDomain("restriction to an empty domain")
    if not domain <= f.domain:
        raise NotSubset("target domain is not inside the field's domain",
                        witness=sorted(domain - f.domain)[:1])
    return OperatorField({j: f[j] for j in domain})


@dataclass(frozen=True)
class ChainPartition:
    chain: NeighborhoodChain
    cells: tuple
    residual: frozenset

    @classmethod
    def from_chain(cls, chain: NeighborhoodChain) -> "ChainPartition":
        hoods = chain.neighborhoods
        cells = tuple(hoods[n] - hoods[n + 1] for n in range(len(hoods) - 1))
        return cls(chain, cells, hoods[-1])

    @classmethod
    def from_neighborhoods(cls, point, neighborhoods) -> "ChainPartition":
        """Partition for explicit nested index sets; anchors are named a1, a2, ..."""
        hoods = tuple(frozenset(u) for u in neighborhoods)
        anchors = tuple(f"a{n}" for n in range(1, len(hoods) + 1))
        return cls.from_chain(NeighborhoodChain(point, anchors, hoods))

    @property
    def depth(self) -> int:
        return self.chain.depth

    def neighborhood(self, n: int) -> frozenset:
        """U_{a_n}, 1-based."""
        return self.chain.neighborhoods[n - 1]

    def cell_of(self, j):
        """k with j in W_k, or None for residual indices."""
        for k, w in enumerate(self.cells, 1):
            if j in w:
                return k
        if j in self.residual:
            return None
        raise KeyError(j)

    def validate(self) -> Check:
        for k, w in enumerate(self.cells, 1):
            for l in range(k + 1, len(self.cells) + 1):
                if w & self.cells[l - 1]:
                    return Check(False, (k, l), "cells overlap")
        for n in range(1, self.depth + 1):
            rebuilt = self.residual.union(*self.cells[n - 1:])
            if rebuilt != self.neighborhood(n):
                return Check(False, n, "cells do not rebuild U_{a_%d}" % n)
        if self.chain.point not in self.residual:
            return Check(False, self.chain.point, "point outside the residual")
        return PASS


def _need_stage(part: ChainPartition, n: int):
    if not 1 <= n < part.depth:
        raise ChainTooShort(f"stage {n} needs 1 <= n < depth {part.depth}", witness=n)


def dilation(primes: PrimeSequence, part: ChainPartition, n: int, j) -> int:
    """Exponent of L_{a_n}(j): p_n...p_k on W_k, 0 on the residual."""
    k = part.cell_of(j)
    return 0 if k is None else primes.product(n, k)


def L_field(primes: PrimeSequence, part: ChainPartition, n: int) -> OperatorField:
    _need_stage(part, n)
    out = {}
    for j in part.neighborhood(n):
        e = dilation(primes, part, n, j)
        out[j] = OperatorPoly.shift(e) if e else OperatorPoly.identity()
    return OperatorField(out)


def check_tauL(primes: PrimeSequence, part: ChainPartition, n: int, lower=None, upper=None) -> Check:
    """L_{a_{n+1}}^{p_n} = tau_{a_{n+1} a_n}(L_{a_n}), index by index.

    ``lower``/``upper`` replace L_{a_n}/L_{a_{n+1}} (fault injection).
    """
    if not 1 <= n or n + 1 >= part.depth:
        raise ChainTooShort(f"stage {n} needs n + 1 < depth {part.depth}", witness=n)
    lower = L_field(primes, part, n) if lower is None else lower
    upper = L_field(primes, part, n + 1) if upper is None else upper
    lhs = upper ** primes.p(n)
    rhs = restrict(lower, part.neighborhood(n + 1))
    for j, p in lhs:
        if rhs[j] != p:
            return Check(False, j, f"{p} != {rhs[j]}")
    return PASS


def psi(primes: PrimeSequence, part: ChainPartition, n: int, p: OperatorPoly) -> ColimitElement:
    """psi_n(p) = p(L_{a_n}) pointwise, as an element at stage n."""
    L = L_field(primes, part, n)
    return ColimitElement(n, L.map(lambda gen: p.compose(gen)))


def field_system(part: ChainPartition) -> InductiveSystem:
    """Restrictions B_{a_1} -> B_{a_2} -> ... -> B_{a_N}."""
    index = chain_poset(part.depth)
    bonding = {(a, b): Restriction(part.neighborhood(b))
               for a in range(1, part.depth + 1) for b in range(a, part.depth + 1)}
    return InductiveSystem(index, bonding)


def terminal_stage(part: ChainPartition) -> int:
    """Deepest stage whose domain still meets a cell."""
    return part.depth - 1


def canonical_field(part: ChainPartition, elem: ColimitElement, terminal=None) -> ColimitElement:
    terminal = terminal_stage(part) if terminal is None else terminal
    return canonical_form(field_system(part), elem, terminal)


def check_psi_compat(primes: PrimeSequence, part: ChainPartition, n: int, polys) -> Check:
    """psi_{n+1}(p(T^{p_n})) and psi_n(p) agree once moved to stage n+1."""
    if not 1 <= n or n + 1 >= part.depth:
        raise ChainTooShort(f"stage {n} needs n + 1 < depth {part.depth}", witness=n)
    step = coburn_map(primes.p(n))
    for p in polys:
        lhs = psi(primes, part, n + 1, step(p))
        rhs = canonical_field(part, psi(primes, part, n, p), n + 1)
        if lhs != rhs:
            return Check(False, str(p), f"stage {n}: presentations differ")
    return PASS


def isometry_check(f: OperatorField, N: int) -> dict:
    """Every component T^e: (T_N^e)^T T_N^e = I on the first N - e coordinates, exactly."""
    widths, failures, by_exp = {}, [], {}
    for j, p in f:
        if not p.is_monomial():
            raise ValueError(f"component at {j} is not a monomial: {p}")
        e = p.exponent
        if e >= N:
            raise DegreeOverflow(f"exponent {e} at index {j} does not fit in N={N}", witness=j)
        if e not in by_exp:
            m = evaluate(OperatorPoly.shift(e), N)
            gram = m.H @ m
            width = gram.safe_interior
            by_exp[e] = (width, masked_equal(gram, identity_matrix(N), width))
        width, ok = by_exp[e]
        widths[j] = width
        if not ok:
            failures.append(j)
    return {"passed": not failures, "widths": widths, "failures": failures}


def _as_qp(primes, x) -> QpElement:
    return x if isinstance(x, QpElement) else QpElement.of(primes, x)


def stage_poly(primes: PrimeSequence, x, n: int) -> OperatorPoly:
    """Polynomial sum c_g T^{g p_1...p_{n-1}} presenting x at stage n."""
    d = primes.denominator(n - 1)
    terms = []
    for g, c in _as_sum(primes, x).items():
        scaled = Fraction(g) * d
        if scaled.denominator != 1:
            raise ValueError(f"{g} is not a stage-{n} generator")
        terms.append((scaled.numerator, c))
    return OperatorPoly(terms)


def _as_sum(primes, x) -> FormalSum:
    if isinstance(x, FormalSum):
        return x
    return FormalSum({_as_qp(primes, x).value: 1})


def theta(primes: PrimeSequence, part: ChainPartition, x) -> ColimitElement:
    """Image of V_g (or a formal sum of them) in the colimit of the field chain.

    Uses the least stage n at which every g is m / (p_1...p_{n-1}).
    """
    s = _as_sum(primes, x)
    n = s.stage(primes)
    if n >= part.depth:
        raise DepthExceeded(f"needs stage {n}, chain supports stages < {part.depth}", witness=n)
    return psi(primes, part, n, stage_poly(primes, s, n))


def theta_at_stage(primes: PrimeSequence, part: ChainPartition, x, n: int) -> ColimitElement:
    """theta computed through the presentation at a given (possibly later) stage."""
    _need_stage(part, n)
    return psi(primes, part, n, stage_poly(primes, x, n))


def norm_preservation_probe(primes, part, sums, grid: int, N: int | None = None,
                            tol: float = NORM_TOL, matrix_tol: float = MATRIX_TOL) -> list:
    """Compare ||x|| computed at its stage with the sup over components of theta(x).

    A component on W_k is the stage polynomial dilated by E = p_n...p_k; its
    symbol is evaluated on the grid * E roots of unity, which z -> z^E maps
    onto the undilated grid. With ``N`` the N x N section norm of the stage
    polynomial is also compared against the symbol norm.
    """
    records = []
    for x in sums:
        s = _as_sum(primes, x)
        n = s.stage(primes)
        p = stage_poly(primes, s, n)
        lhs = symbol_sup_norm(p, grid)
        image = theta(primes, part, s).payload
        per_exp = {}
        for j, comp in image:
            e = dilation(primes, part, n, j)
            if e not in per_exp:
                per_exp[e] = symbol_sup_norm(comp, grid * max(e, 1))
        rhs = max(per_exp.values())
        rec = {"sum": str(s), "stage": n, "lhs": lhs, "rhs": rhs, "diff": abs(lhs - rhs)}
        ok = rec["diff"] <= tol
        if N is not None:
            mn = operator_norm(evaluate(p, N), tol=NORM_TOL)
            rec["matrix_norm"] = mn
            rec["matrix_diff"] = abs(mn - lhs)
            ok = ok and rec["matrix_diff"] <= matrix_tol
        rec["passed"] = ok
        records.append(rec)
    return records


def random_formal_sum(primes: PrimeSequence, rng, max_stage: int, max_degree: int = 8) -> FormalSum:
    """Random sum of V_g whose stage polynomial has degree <= max_degree.

    Coefficients are complex Gaussian, scaled to unit l^2 norm.
    """
    n = int(rng.integers(1, max_stage + 1))
    deg = int(rng.integers(0, max_degree + 1))
    coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
    coeffs /= np.linalg.norm(coeffs)
    d = primes.denominator(n - 1)
    return FormalSum({Fraction(m, d): complex(c) for m, c in enumerate(coeffs)})


def _hood(family, a, points):
    if points is None:
        return frozenset(family.base_indices(a))
    return frozenset(family.base_indices(a, points))


def lemma_lim_check(family, chain: NeighborhoodChain, samples, tested, points=None) -> Check:
    """Sequence and directed presentations of sampled fields agree.

    ``samples`` are (anchor, field on U_anchor) pairs and ``tested`` the
    anchors forming the directed diagram. Raises CofinalityFailure when some
    U_b contains no U_{a_n}.
    """
    if points is None and hasattr(family, "points_for"):
        points = family.points_for(chain)
    hoods = chain.neighborhoods
    U = {a: _hood(family, a, points) for a in tested}

    def entry(b):
        for n, h in enumerate(hoods):
            if h <= U[b]:
                return n
        raise CofinalityFailure(f"no chain neighbourhood inside U_{b}", witness=(str(b),))

    for a in tested:
        for b in tested:
            if U[b] <= U[a]:
                try:
                    entry(b)
                except CofinalityFailure:
                    raise CofinalityFailure(f"pair ({a}, {b}) is not cofinal", witness=(str(a), str(b))) from None
    last = len(hoods) - 1
    for a, f in samples:
        if a not in U:
            U[a] = _hood(family, a, points)
        if f.domain != U[a]:
            return Check(False, str(a), "sample field is not on U_a")
        n = entry(a)
        seq = restrict(f, hoods[n])
        for k in range(n + 1, last + 1):
            seq = restrict(seq, hoods[k])
        for b in tested:
            if not U[b] <= U[a]:
                continue
            g = restrict(f, U[b])
            g = restrict(g, hoods[entry(b)])
            g = restrict(g, hoods[last])
            if g != seq:
                return Check(False, (str(a), str(b)), "presentations differ")
    return PASS


def random_monomial_field(domain, rng, max_exponent: int = 12) -> OperatorField:
    return OperatorField({j: OperatorPoly.shift(int(rng.integers(0, max_exponent + 1))) for j in domain})

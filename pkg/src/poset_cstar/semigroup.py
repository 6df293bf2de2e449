"""Exact arithmetic in Q_P^+, the non-negative rationals m / (p_1 ... p_n)."""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import prod

import numpy as np
from sympy import isprime, prime

from .errors import LevelMismatch, NegativeInput, OverflowGuard

EXACT_LIMIT = 2**63
DEFAULT_MAX_LEVEL = 64
RULES = ("increasing", "every-prime-infinitely-often")


def _every_prime_infinitely_often():
    # 2 | 2 3 | 2 3 5 | 2 3 5 7 | ...
    for block in itertools.count(1):
        for k in range(1, block + 1):
            yield prime(k)


def _increasing():
    for k in itertools.count(1):
        yield prime(k)


class PrimeSequence:
    """A sequence p_1, p_2, ... of primes, indexed from 1.

    Either an explicit finite list or one of the named rules in ``RULES``.
    """

    def __init__(self, primes=None, rule=None):
        if (primes is None) == (rule is None):
            raise ValueError("give exactly one of primes or rule")
        if primes is not None:
            primes = tuple(int(p) for p in primes)
            if not primes:
                raise ValueError("explicit prime list is empty")
            for p in primes:
                if not isprime(p):
                    raise ValueError(f"{p} is not prime")
            self._cache = list(primes)
            self._source = None
        else:
            if rule not in RULES:
                raise ValueError(f"unknown prime rule {rule!r}; expected one of {RULES}")
            self._cache = []
            self._source = _increasing() if rule == "increasing" else _every_prime_infinitely_often()
        self.rule = rule
        self.explicit = primes

    @classmethod
    def from_config(cls, config) -> "PrimeSequence":
        """Accept a list of primes, ``{"rule": name}``, a rule name, or ``"2,3,5"``."""
        if isinstance(config, PrimeSequence):
            return config
        if isinstance(config, dict):
            if set(config) != {"rule"}:
                raise ValueError(f"prime config object must have only a 'rule' key, got {sorted(config)}")
            return cls(rule=config["rule"])
        if isinstance(config, str):
            config = config.strip()
            if config in RULES:
                return cls(rule=config)
            try:
                return cls(primes=[int(s) for s in config.split(",") if s.strip()])
            except ValueError as exc:
                raise ValueError(f"cannot parse prime config {config!r}: {exc}") from None
        return cls(primes=list(config))

    def to_config(self):
        return {"rule": self.rule} if self.rule else list(self.explicit)

    @property
    def length(self):
        """Number of available terms (None for an infinite rule)."""
        return None if self.explicit is None else len(self.explicit)

    def p(self, n: int) -> int:
        if n < 1:
            raise IndexError("prime sequence is indexed from 1")
        while len(self._cache) < n:
            if self._source is None:
                raise IndexError(f"explicit prime sequence has only {len(self._cache)} terms")
            self._cache.append(next(self._source))
        return self._cache[n - 1]

    def prefix(self, n: int) -> tuple:
        return tuple(self.p(k) for k in range(1, n + 1))

    def denominator(self, n: int) -> int:
        """p_1 * ... * p_n (1 for n = 0)."""
        return prod(self.prefix(n))

    def product(self, start: int, stop: int) -> int:
        """p_start * ... * p_stop (1 when stop < start)."""
        return prod(self.p(k) for k in range(start, stop + 1))

    def __repr__(self):
        if self.rule:
            return f"PrimeSequence(rule={self.rule!r})"
        return f"PrimeSequence({list(self.explicit)})"


def _as_fraction(value) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


def qp_contains(primes: PrimeSequence, value, max_level: int = DEFAULT_MAX_LEVEL):
    """Return ``(True, n)`` for the least n with value * p_1...p_n integral, else ``(False, max_level)``."""
    value = _as_fraction(value)
    if value < 0:
        raise NegativeInput(f"{value} is negative", witness=value)
    den = value.denominator
    d = 1
    for n in range(0, max_level + 1):
        if n > 0:
            try:
                d *= primes.p(n)
            except IndexError:
                return False, n - 1
        if d % den == 0:
            return True, n
    return False, max_level


@dataclass(frozen=True, order=True)
class QpElement:
    value: Fraction
    level: int

    def __post_init__(self):
        object.__setattr__(self, "value", _as_fraction(self.value))

    @classmethod
    def of(cls, primes: PrimeSequence, value, max_level: int = DEFAULT_MAX_LEVEL) -> "QpElement":
        ok, level = qp_contains(primes, value, max_level)
        if not ok:
            raise ValueError(f"{value} is not in Q_P^+ up to level {level}")
        return cls(_as_fraction(value), level)

    @property
    def stage(self) -> int:
        """Least Toeplitz-chain stage n at which this is m / (p_1...p_{n-1})."""
        return self.level + 1

    def numerator_at(self, primes: PrimeSequence, level: int) -> int:
        scaled = self.value * primes.denominator(level)
        if scaled.denominator != 1:
            raise LevelMismatch(f"{self.value} is not an integer multiple of 1/{primes.denominator(level)}")
        return scaled.numerator

    def add(self, other: "QpElement", primes: PrimeSequence) -> "QpElement":
        return QpElement.of(primes, self.value + other.value, max(self.level, other.level))

    def __str__(self):
        return str(self.value)


def level_embed(primes: PrimeSequence, n: int, m: int) -> QpElement:
    """Image of T^m at chain stage n: the rational m / (p_1 ... p_{n-1})."""
    if n < 1:
        raise ValueError("stages start at 1")
    if m < 0:
        raise NegativeInput(f"exponent {m} is negative", witness=m)
    return QpElement.of(primes, Fraction(m, primes.denominator(n - 1)), max_level=n - 1)


@dataclass(frozen=True)
class Truncation:
    """Window {m / (p_1...p_n) : 0 <= m <= M} of the basis of l^2(Q_P^+)."""

    primes: PrimeSequence
    depth: int
    bound: int

    @cached_property
    def denominator(self) -> int:
        return self.primes.denominator(self.depth)

    @cached_property
    def basis(self) -> tuple:
        d = self.denominator
        return tuple(Fraction(m, d) for m in range(self.bound + 1))

    def __len__(self):
        return self.bound + 1

    def position(self, value) -> int:
        """Basis position of ``value``; LevelMismatch if it is off the window's lattice."""
        scaled = _as_fraction(value) * self.denominator
        if scaled.denominator != 1:
            raise LevelMismatch(f"{value} is not on the 1/{self.denominator} lattice", witness=value)
        return scaled.numerator

    def add(self, g, h):
        """Partial addition: g + h if it stays inside the window, else None."""
        s = _as_fraction(g) + _as_fraction(h)
        return s if self.position(s) <= self.bound else None


def enumerate_truncation(primes: PrimeSequence, n: int, M: int) -> Truncation:
    if n < 0:
        raise ValueError("depth must be non-negative")
    if M < 1:
        raise ValueError("bound M must be at least 1")
    if primes.denominator(n) * M >= EXACT_LIMIT:
        raise OverflowGuard(f"M * p_1...p_{n} exceeds 2^63", witness=(n, M))
    return Truncation(primes, n, M)


def v_matrix(g, trunc: Truncation):
    """Truncated isometry V_g: e_h -> e_{g+h}, or 0 when g + h leaves the window.

    Integer matrix (exact); columns 0..M-s are free of truncation loss, s = g's lattice offset.
    """
    from .toeplitz import TruncatedOperator

    value = g.value if isinstance(g, QpElement) else _as_fraction(g)
    if value < 0:
        raise NegativeInput(f"{value} is negative", witness=value)
    shift = trunc.position(value)
    size = len(trunc)
    mat = np.eye(size, k=-shift, dtype=np.int64) if shift < size else np.zeros((size, size), np.int64)
    return TruncatedOperator(mat, max(size - shift, 0), lower=True)


class FormalSum(Mapping):
    """Finitely supported map g -> coefficient on Q_P^+, read as sum c_g V_g."""

    def __init__(self, terms=None):
        acc = {}
        items = terms.items() if isinstance(terms, Mapping) else (terms or ())
        for g, c in items:
            g = g.value if isinstance(g, QpElement) else _as_fraction(g)
            if g < 0:
                raise NegativeInput(f"{g} is negative", witness=g)
            acc[g] = acc.get(g, 0) + c
        self._terms = {g: c for g, c in sorted(acc.items()) if c != 0}

    def __getitem__(self, g):
        return self._terms[_as_fraction(g)]

    def __iter__(self):
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, FormalSum):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __add__(self, other):
        return FormalSum(list(self._terms.items()) + list(other._terms.items()))

    def __repr__(self):
        return f"FormalSum({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"{_fmt_coeff(c)}V[{g}]" for g, c in self._terms.items())

    def stage(self, primes: PrimeSequence, max_level: int = DEFAULT_MAX_LEVEL) -> int:
        """Least chain stage at which every term is a monomial T^m."""
        if not self._terms:
            return 1
        return max(QpElement.of(primes, g, max_level).stage for g in self._terms)


def _fmt_coeff(c):
    if c == 1:
        return ""
    if isinstance(c, complex):
        return f"({c.real:g}{c.imag:+g}j)"
    return f"{c}*"

"""Analytic polynomials in the unilateral shift T and their finite sections."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from math import gcd

import numpy as np

from .errors import DegreeOverflow, DimensionMismatch, NonConvergence

FLOAT_ATOL = 1e-12
DEFAULT_MAX_ITER = 2**26


class OperatorPoly:
    """Sum of c_m T^m over finitely many exponents m >= 0.

    Multiplication is operator composition, so T^a * T^b = T^(a+b).
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        acc = {}
        items = terms.items() if isinstance(terms, dict) else (terms or ())
        for m, c in items:
            m = int(m)
            if m < 0:
                raise ValueError(f"negative exponent {m}")
            acc[m] = acc.get(m, 0) + c
        self.terms = {m: c for m, c in sorted(acc.items()) if c != 0}

    @classmethod
    def identity(cls):
        return cls({0: 1})

    @classmethod
    def shift(cls, power=1):
        return cls({power: 1})

    @property
    def degree(self) -> int:
        return max(self.terms, default=0)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1 and next(iter(self.terms.values())) == 1

    @property
    def exponent(self) -> int:
        """Exponent of a monomial T^e."""
        if not self.is_monomial():
            raise ValueError(f"{self} is not a monomial")
        return next(iter(self.terms))

    def __eq__(self, other):
        if isinstance(other, OperatorPoly):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __add__(self, other):
        if not isinstance(other, OperatorPoly):
            other = OperatorPoly({0: other})
        return OperatorPoly(list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return OperatorPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, OperatorPoly):
            return OperatorPoly({m: c * other for m, c in self.terms.items()})
        out = []
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                out.append((a + b, ca * cb))
        return OperatorPoly(out)

    def __rmul__(self, scalar):
        return OperatorPoly({m: scalar * c for m, c in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        if self.is_monomial():
            return OperatorPoly({self.exponent * k: 1})
        out = OperatorPoly.identity()
        for _ in range(k):
            out = out * self
        return out

    def compose(self, inner: "OperatorPoly") -> "OperatorPoly":
        """Substitute ``inner`` for T."""
        if inner.is_monomial():
            e = inner.exponent
            return OperatorPoly([(m * e, c) for m, c in self.terms.items()])
        out = OperatorPoly()
        for m, c in self.terms.items():
            out = out + (inner ** m) * c
        return out

    def symbol(self, z):
        """Evaluate sum c_m z^m (vectorised over numpy arrays)."""
        z = np.asarray(z)
        return sum((c * z**m for m, c in self.terms.items()), np.zeros_like(z, dtype=complex))

    def __repr__(self):
        return f"OperatorPoly({self.terms})"

    def __str__(self):
        if not self.terms:
            return "0"
        out = ""
        for m, c in self.terms.items():
            base = "I" if m == 0 else ("T" if m == 1 else f"T^{m}")
            sign = " + "
            if isinstance(c, (int, float)) and c < 0:
                sign, c = " - ", -c
            if c == 1:
                text = base
            elif isinstance(c, complex):
                text = f"{c}{base}"
            else:
                text = f"{c}{base}"
            out += sign + text
        return out[3:] if out.startswith(" + ") else "-" + out[3:]


_TERM = re.compile(r"^(?P<coeff>\([^)]*\)|[0-9.eE+\-j]*)\*?(?P<base>I|T(?:\^(?P<exp>\d+))?)?$")


def parse_poly(text: str) -> OperatorPoly:
    """Parse strings like ``"I + 2T + T^3"`` or ``"(1+2j)T^2 - 0.5"``."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    # split on +/- that start a term (not inside parentheses or exponents)
    terms, depth, start = [], 0, 0
    for k, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and k > start and s[k - 1] not in "eE(+-":
            terms.append(s[start:k])
            start = k
    terms.append(s[start:])
    out = OperatorPoly()
    for raw in terms:
        sign = 1
        body = raw
        if body[:1] in "+-":
            sign = -1 if body[0] == "-" else 1
            body = body[1:]
        m = _TERM.match(body)
        if not m or not body:
            raise ValueError(f"cannot parse term {raw!r} in {text!r}")
        coeff_txt = m.group("coeff").strip("()")
        base = m.group("base")
        if base is None and not coeff_txt:
            raise ValueError(f"cannot parse term {raw!r} in {text!r}")
        coeff = _parse_number(coeff_txt) if coeff_txt else 1
        exp = 0 if base in (None, "I") else int(m.group("exp") or 1)
        out = out + OperatorPoly({exp: sign * coeff})
    return out


def _parse_number(txt):
    for kind in (int, float, complex):
        try:
            return kind(txt)
        except ValueError:
            continue
    raise ValueError(f"bad coefficient {txt!r}")


def coburn_map(n: int):
    """Unital endomorphism T -> T^n, acting on analytic polynomials."""
    if n < 1:
        raise ValueError("Coburn maps need n >= 1")

    def apply(p: OperatorPoly) -> OperatorPoly:
        return OperatorPoly([(m * n, c) for m, c in p.terms.items()])

    apply.factor = n
    return apply


@dataclass(eq=False)
class TruncatedOperator:
    """N x N section of an operator on l^2(Z^+).

    ``safe_interior`` is the number of leading columns that agree exactly with
    the infinite operator. ``lower`` records lower-triangularity, which makes
    the adjoint loss-free.
    """

    matrix: np.ndarray
    safe_interior: int
    lower: bool = False

    def __post_init__(self):
        n, m = self.matrix.shape
        if n != m:
            raise DimensionMismatch(f"matrix is {n}x{m}")
        if not 0 <= self.safe_interior <= n:
            raise ValueError("safe_interior out of range")
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("non-finite matrix entries")

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def loss(self) -> int:
        return self.dimension - self.safe_interior

    @property
    def exact(self) -> bool:
        return np.issubdtype(self.matrix.dtype, np.integer)

    @property
    def H(self) -> "TruncatedOperator":
        # a lower-triangular section has complete rows, so its adjoint is exact
        safe = self.dimension if self.lower else 0
        return TruncatedOperator(self.matrix.conj().T, safe, lower=False)

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        _same_dim(self, other)
        safe = max(0, min(other.safe_interior, self.safe_interior - other.loss))
        if self.exact and other.exact:
            bound = int(np.abs(self.matrix).max(initial=0)) * int(np.abs(other.matrix).max(initial=0))
            if bound * self.dimension < 2**53:
                # every partial sum is an integer below 2^53, so BLAS float64 is exact
                prod = (self.matrix.astype(np.float64) @ other.matrix.astype(np.float64)).astype(np.int64)
                return TruncatedOperator(prod, safe, self.lower and other.lower)
        return TruncatedOperator(self.matrix @ other.matrix, safe, self.lower and other.lower)

    def __add__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        _same_dim(self, other)
        safe = min(self.safe_interior, other.safe_interior)
        return TruncatedOperator(self.matrix + other.matrix, safe, self.lower and other.lower)

    def __rmul__(self, scalar):
        return TruncatedOperator(scalar * self.matrix, self.safe_interior, self.lower)

    def __pow__(self, k: int) -> "TruncatedOperator":
        out = identity_matrix(self.dimension, self.matrix.dtype)
        for _ in range(k):
            out = self @ out
        return out


def _same_dim(a, b):
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"dimensions {a.dimension} and {b.dimension} differ")


def identity_matrix(n: int, dtype=np.int64) -> TruncatedOperator:
    return TruncatedOperator(np.eye(n, dtype=dtype), n, lower=True)


def shift_matrix(n: int) -> TruncatedOperator:
    """e_k -> e_{k+1}; the last basis vector falls off the window."""
    if n < 2:
        raise ValueError("shift_matrix needs N >= 2")
    return TruncatedOperator(np.eye(n, k=-1, dtype=np.int64), n - 1, lower=True)


def evaluate(p: OperatorPoly, n: int) -> TruncatedOperator:
    """Finite section of p(T) on the first n basis vectors.

    Integer coefficients give an exact integer matrix, anything else complex.
    """
    if p.degree >= n:
        raise DegreeOverflow(f"degree {p.degree} does not fit in dimension {n}", witness=p.degree)
    integral = all(isinstance(c, (int, np.integer)) for c in p.terms.values())
    dtype = np.int64 if integral else np.complex128
    mat = np.zeros((n, n), dtype=dtype)
    for m, c in p.terms.items():
        mat += (c if integral else complex(c)) * np.eye(n, k=-m, dtype=dtype)
    return TruncatedOperator(mat, n - p.degree, lower=True)


def operator_norm(op, tol: float = 1e-9, max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Largest singular value by power iteration on A^H A.

    Start vector is all-ones (normalised). Between rounds the iteration
    operator is squared, so after k rounds the iterate is (A^H A)^(2^k - 1)
    applied to the start vector; ``max_iter`` bounds that exponent. The
    loop stops when the Rayleigh-quotient residual guarantees the returned
    singular value is within ``tol`` of a singular value of A.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = op.matrix if isinstance(op, TruncatedOperator) else np.asarray(op)
    a = a.astype(np.complex128 if np.iscomplexobj(a) else np.float64)
    b = a.conj().T @ a
    scale = np.abs(b).max(initial=0.0)
    if scale == 0.0:
        return 0.0
    x = np.ones(b.shape[0], dtype=b.dtype) / np.sqrt(b.shape[0])
    step = b / scale
    power = 1
    while True:
        y = step @ x
        ny = np.linalg.norm(y)
        if ny == 0.0:
            # start vector annihilated; only possible when it lies in ker(A)
            raise NonConvergence("iterate vanished", witness=power)
        x = y / ny
        bx = b @ x
        mu = float(np.real(np.vdot(x, bx)))
        resid = np.linalg.norm(bx - mu * x)
        sigma = np.sqrt(max(mu, 0.0))
        # |mu - lambda| <= resid for some eigenvalue lambda of A^H A
        bound = resid / sigma if sigma > 0 else np.sqrt(resid)
        if bound <= tol:
            return float(sigma)
        power *= 2
        if power > max_iter:
            raise NonConvergence(f"no convergence within {max_iter} iterations (bound {bound:.3g})", witness=bound)
        step = step @ step
        step /= np.abs(step).max()


def symbol_sup_norm(p: OperatorPoly, grid_size: int) -> float:
    """max |sum c_m z^m| over the grid_size-th roots of unity.

    Exponents are reduced modulo the grid in exact integers. When every
    exponent shares a factor g with the grid, p(z) = q(z^g) and z^g runs over
    the (grid/g)-th roots, so the coarser grid is used.
    """
    if grid_size < 4 * (p.degree + 1):
        raise ValueError(f"grid_size {grid_size} < 4*(degree+1) = {4 * (p.degree + 1)}")
    if not p.terms:
        return 0.0
    g = reduce(gcd, p.terms, grid_size)
    grid = grid_size // g
    j = np.arange(grid, dtype=np.int64)
    vals = np.zeros(grid, dtype=np.complex128)
    for m, c in p.terms.items():
        phase = ((m // g) * j) % grid
        vals += c * np.exp(2j * np.pi * phase / grid)
    return float(np.abs(vals).max())


def masked_equal(a: TruncatedOperator, b: TruncatedOperator, k: int) -> bool:
    """Do the first k columns agree (exactly for integer matrices, else to 1e-12)?"""
    _same_dim(a, b)
    if k > min(a.safe_interior, b.safe_interior):
        raise ValueError(f"k={k} exceeds the safe interiors ({a.safe_interior}, {b.safe_interior})")
    ca, cb = a.matrix[:, :k], b.matrix[:, :k]
    if a.exact and b.exact:
        return bool(np.array_equal(ca, cb))
    return bool(np.allclose(ca, cb, rtol=0.0, atol=FLOAT_ATOL))

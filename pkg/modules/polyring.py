"""Sparse multivariate polynomials with exact rational coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Union

Rational = Fraction
Monomial = tuple[int, ...]
Coefficient = Union[int, Fraction]


class ContextMismatchError(ValueError):
    """Raised when polynomials or monomials from different rings are combined."""


def monomial_degree(m: Monomial) -> int:
    return sum(m)


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    """True if a divides b."""
    return all(x <= y for x, y in zip(a, b))


def monomial_quotient(b: Monomial, a: Monomial) -> Monomial:
    return tuple(y - x for x, y in zip(a, b))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


@dataclass(frozen=True)
class RingContext:
    variables: tuple[str, ...]

    def __post_init__(self):
        if len(self.variables) < 1:
            raise ValueError("a ring needs at least one variable")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"variable names must be distinct: {self.variables}")

    @classmethod
    def standard(cls, n: int, prefix: str = "x") -> "RingContext":
        if n < 1:
            raise ValueError(f"variable count must be positive, got {n}")
        return cls(tuple(f"{prefix}{i}" for i in range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError as e:
            raise ContextMismatchError(f"unknown variable {name!r}") from e

    def check_monomial(self, m: Monomial) -> None:
        if len(m) != self.n:
            raise ContextMismatchError(f"monomial {m} has {len(m)} exponents, ring has {self.n} variables")

    def unit(self, i: int) -> Monomial:
        return tuple(1 if k == i else 0 for k in range(self.n))

    def one_monomial(self) -> Monomial:
        return (0,) * self.n

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def constant(self, c: Coefficient) -> "Polynomial":
        return Polynomial(self, {self.one_monomial(): c})

    def variable(self, name_or_index: Union[str, int]) -> "Polynomial":
        i = self.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        return Polynomial(self, {self.unit(i): 1})

    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.variable(i) for i in range(self.n))

    def monomial_name(self, m: Monomial) -> str:
        """Render a bare monomial, e.g. ``x1^2*x3``; the unit monomial is ``1``."""
        parts = []
        for name, e in zip(self.variables, m):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"


class OrderKind(str, Enum):
    DEGREVLEX = "degrevlex"
    LEX = "lex"
    DEGLEX = "deglex"


@dataclass(frozen=True)
class MonomialOrder:
    """Total monomial order given by a sort key: larger key means larger monomial."""

    kind: OrderKind
    context: RingContext

    def key(self, m: Monomial) -> tuple[int, ...]:
        if self.kind is OrderKind.DEGREVLEX:
            return (sum(m),) + tuple(-e for e in reversed(m))
        if self.kind is OrderKind.DEGLEX:
            return (sum(m),) + tuple(m)
        return tuple(m)

    def reverse_key(self, m: Monomial) -> tuple[int, ...]:
        """Ascending in this key means descending in the order (heap friendly)."""
        return tuple(-k for k in self.key(m))

    def compare(self, a: Monomial, b: Monomial) -> int:
        self.context.check_monomial(a)
        self.context.check_monomial(b)
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)

    def descending(self, monomials: Iterable[Monomial]) -> list[Monomial]:
        return sorted(monomials, key=self.key, reverse=True)

    @classmethod
    def named(cls, name: Union[str, OrderKind], context: RingContext) -> "MonomialOrder":
        return cls(OrderKind(name), context)


def compare_monomials(a: Monomial, b: Monomial, order: MonomialOrder) -> int:
    """Return 1 if a > b, -1 if a < b and 0 if equal under ``order``."""
    return order.compare(a, b)


class Polynomial:
    """Immutable polynomial: a map from exponent tuples to nonzero rationals."""

    __slots__ = ("context", "_terms", "_hash")

    def __init__(self, context: RingContext, terms: Mapping[Monomial, Coefficient]):
        clean: dict[Monomial, Fraction] = {}
        for m, c in terms.items():
            m = tuple(m)
            context.check_monomial(m)
            if any(e < 0 for e in m):
                raise ValueError(f"negative exponent in {m}")
            c = Fraction(c)
            if c:
                clean[m] = clean.get(m, Fraction(0)) + c
                if not clean[m]:
                    del clean[m]
        self.context = context
        self._terms = clean
        self._hash = None

    @classmethod
    def _trusted(cls, context: RingContext, terms: dict[Monomial, Fraction]) -> "Polynomial":
        # terms must already be clean: right length, Fraction values, no zeros
        p = cls.__new__(cls)
        p.context = context
        p._terms = terms
        p._hash = None
        return p

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def coefficient(self, m: Monomial) -> Fraction:
        return self._terms.get(tuple(m), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m in self._terms)

    def support(self) -> list[Monomial]:
        return list(self._terms)

    def total_degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def leading_monomial(self, order: MonomialOrder) -> Monomial:
        if not self._terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self._terms, key=order.key)

    def leading_coefficient(self, order: MonomialOrder) -> Fraction:
        return self._terms[self.leading_monomial(order)]

    def monic(self, order: MonomialOrder) -> "Polynomial":
        if not self._terms:
            return self
        return self.scale(1 / self.leading_coefficient(order))

    def scale(self, c: Coefficient) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return self.context.zero()
        return Polynomial._trusted(self.context, {m: v * c for m, v in self._terms.items()})

    def shift(self, m: Monomial) -> "Polynomial":
        """Multiply by the monomial ``m``."""
        return Polynomial._trusted(self.context, {monomial_mul(k, m): v for k, v in self._terms.items()})

    def evaluate(self, point: Mapping[Union[str, int], Coefficient]) -> Fraction:
        """Evaluate at a point given by variable name or index; missing variables count as 0."""
        values = [Fraction(0)] * self.context.n
        for k, v in point.items():
            i = self.context.index(k) if isinstance(k, str) else k
            values[i] = Fraction(v)
        total = Fraction(0)
        for m, c in self._terms.items():
            term = c
            for x, e in zip(values, m):
                if e:
                    term *= x ** e
                    if not term:
                        break
            total += term
        return total

    def embed(self, context: RingContext, positions: Optional[Iterable[int]] = None) -> "Polynomial":
        """Move into a larger ring; variable k goes to ``positions[k]`` (default: same index)."""
        positions = list(range(self.context.n)) if positions is None else list(positions)
        if len(positions) != self.context.n or max(positions, default=0) >= context.n:
            raise ContextMismatchError(f"cannot embed a {self.context.n}-variable ring into {context.n} variables")
        out = {}
        for m, c in self._terms.items():
            e = [0] * context.n
            for k, p in zip(m, positions):
                e[p] = k
            out[tuple(e)] = c
        return Polynomial._trusted(context, out)

    def _check(self, other: "Polynomial") -> None:
        if not isinstance(other, Polynomial):
            raise TypeError(f"expected Polynomial, got {type(other).__name__}")
        if other.context != self.context:
            raise ContextMismatchError(f"ring mismatch: {self.context.variables} vs {other.context.variables}")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.context.constant(other)
        return other

    def __add__(self, other) -> "Polynomial":
        return poly_add(self, self._lift(other))

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return self.scale(-1)

    def __sub__(self, other) -> "Polynomial":
        return poly_add(self, -self._lift(other))

    def __rsub__(self, other) -> "Polynomial":
        return poly_add(self._lift(other), -self)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            raise ValueError(f"exponent must be a nonnegative integer, got {k!r}")
        result = self.context.constant(1)
        base = self
        while k:
            if k & 1:
                result = poly_mul(result, base)
            k >>= 1
            if k:
                base = poly_mul(base, base)
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.context.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.context == other.context and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.context, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        from modules.parser import print_polynomial

        return f"Polynomial({print_polynomial(self)!r})"


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    a._check(b)
    out = dict(a._terms)
    for m, c in b._terms.items():
        v = out.get(m, 0) + c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return Polynomial._trusted(a.context, out)


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    a._check(b)
    out: dict[Monomial, Fraction] = {}
    for ma, ca in a._terms.items():
        for mb, cb in b._terms.items():
            m = monomial_mul(ma, mb)
            out[m] = out.get(m, 0) + ca * cb
    return Polynomial._trusted(a.context, {m: c for m, c in out.items() if c})


def expand_sos(polys: Iterable[Polynomial], context: Optional[RingContext] = None) -> Polynomial:
    """Return the sum of squares of ``polys``; an empty list needs an explicit ``context``."""
    polys = list(polys)
    if not polys:
        if context is None:
            raise ValueError("expand_sos of an empty list needs a ring context")
        return context.zero()
    total = polys[0].context.zero()
    for p in polys:
        total = poly_add(total, poly_mul(p, p))
    return total


ZERO_DEGREE = "zero"


def is_homogeneous(p: Polynomial) -> Union[int, str, None]:
    """Common degree of all terms, ``"zero"`` for the zero polynomial, ``None`` otherwise."""
    degrees = {sum(m) for m in p._terms}
    if not degrees:
        return ZERO_DEGREE
    if len(degrees) == 1:
        return degrees.pop()
    return None


def homogeneous_monomials(n: int, d: int) -> list[Monomial]:
    """All exponent vectors of length n summing to d, lexicographically descending."""
    if n == 1:
        return [(d,)]
    out = []
    for first in range(d, -1, -1):
        for rest in homogeneous_monomials(n - 1, d - first):
            out.append((first,) + rest)
    return out

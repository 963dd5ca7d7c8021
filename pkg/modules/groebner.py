"""Buchberger's algorithm over the rationals.

Basis elements are kept internally as primitive integer polynomials (integer
coefficients, content 1, positive leading coefficient); division runs
fraction-free and tracks the rational scale separately, so exact remainders can
still be recovered. Pairs are chosen by the normal strategy and pruned with the
Gebauer–Möller criteria.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Mapping, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field

from modules.polyring import (
    ContextMismatchError,
    Monomial,
    MonomialOrder,
    Polynomial,
    RingContext,
    monomial_divides,
    monomial_lcm,
    monomial_mul,
    monomial_quotient,
)

logger = logging.getLogger(__name__)

PROGRESS_EVERY = 500


class ZeroPolynomialError(ValueError):
    pass


class Outcome(str, Enum):
    COMPLETE = "complete"
    BUDGET_EXHAUSTED = "budget-exhausted"


class Budget(BaseModel):
    model_config = ConfigDict(frozen=True)
    max_pairs: int = Field(default=200_000, gt=0)
    max_coeff_bits: int = Field(default=4096, gt=0)


@dataclass(frozen=True)
class Ideal:
    context: RingContext
    generators: tuple[Polynomial, ...]

    def __post_init__(self):
        for g in self.generators:
            if g.context != self.context:
                raise ContextMismatchError("ideal generators must live in the ideal's ring")
            if g.is_zero():
                raise ZeroPolynomialError("ideal generators must be nonzero")


@dataclass(frozen=True)
class GroebnerBasis:
    order: MonomialOrder
    elements: tuple[Polynomial, ...]
    reduced: bool = True
    outcome: Outcome = Outcome.COMPLETE
    pairs_processed: int = 0
    pairs_pruned: int = 0

    def is_unit(self) -> bool:
        return len(self.elements) == 1 and self.elements[0] == 1


@dataclass
class _Element:
    lm: Monomial
    terms: dict[Monomial, int] = field(repr=False)

    @property
    def lc(self) -> int:
        return self.terms[self.lm]


def _primitive(terms: Mapping[Monomial, Fraction]) -> tuple[dict[Monomial, int], Fraction]:
    """Split ``terms`` as factor * integer polynomial with content 1."""
    denominator = reduce(lcm, (c.denominator for c in terms.values()), 1)
    integers = {m: int(c * denominator) for m, c in terms.items()}
    content = reduce(gcd, (abs(v) for v in integers.values()), 0) or 1
    return {m: v // content for m, v in integers.items()}, Fraction(content, denominator)


def _strip(terms: dict[Monomial, int]) -> int:
    content = reduce(gcd, (abs(v) for v in terms.values()), 0)
    if content > 1:
        for m in terms:
            terms[m] //= content
    return content or 1


def _element(terms: dict[Monomial, int], order: MonomialOrder) -> _Element:
    _strip(terms)
    lm = max(terms, key=order.key)
    if terms[lm] < 0:
        terms = {m: -v for m, v in terms.items()}
    return _Element(lm, terms)


def _reduce(
    terms: Mapping[Monomial, int], reducers: Sequence[_Element], order: MonomialOrder
) -> tuple[dict[Monomial, int], Fraction]:
    """Full multivariate division: returns (r, s) with remainder = s * r."""
    work = dict(terms)
    heap = [(order.reverse_key(m), m) for m in work]
    heapq.heapify(heap)
    remainder: dict[Monomial, int] = {}
    scale = Fraction(1)
    scaled_steps = 0
    while heap:
        _, m = heapq.heappop(heap)
        c = work.pop(m, 0)
        if not c:
            continue
        reducer = next((r for r in reducers if monomial_divides(r.lm, m)), None)
        if reducer is None:
            remainder[m] = c
            continue
        q = monomial_quotient(m, reducer.lm)
        g = gcd(c, reducer.lc)
        a, b = reducer.lc // g, c // g
        if a != 1:
            for k in work:
                work[k] *= a
            for k in remainder:
                remainder[k] *= a
            scale /= a
            scaled_steps += 1
        for mm, cc in reducer.terms.items():
            if mm == reducer.lm:
                continue
            t = monomial_mul(mm, q)
            v = work.get(t, 0) - b * cc
            if v:
                if t not in work:
                    heapq.heappush(heap, (order.reverse_key(t), t))
                work[t] = v
            else:
                work.pop(t, None)
        if scaled_steps >= 32:
            content = reduce(gcd, (abs(v) for v in remainder.values()), reduce(gcd, (abs(v) for v in work.values()), 0))
            if content > 1:
                for k in work:
                    work[k] //= content
                for k in remainder:
                    remainder[k] //= content
                scale *= content
            scaled_steps = 0
    return remainder, scale


def _check_ring(polys: Sequence[Polynomial], order: MonomialOrder) -> None:
    for p in polys:
        if p.context != order.context:
            raise ContextMismatchError("polynomials must live in the order's ring")


def normal_form(p: Polynomial, G: Sequence[Polynomial], order: MonomialOrder) -> Polynomial:
    """Remainder of p on division by G, reducers tried in list order."""
    G = [g for g in G if not g.is_zero()]
    if not G:
        raise ValueError("normal form needs at least one nonzero divisor")
    _check_ring([p, *G], order)
    if p.is_zero():
        return p
    reducers = [_element(_primitive(g.terms)[0], order) for g in G]
    integers, factor = _primitive(p.terms)
    remainder, scale = _reduce(integers, reducers, order)
    scale *= factor
    return Polynomial(p.context, {m: scale * v for m, v in remainder.items()})


def s_polynomial(f: Polynomial, g: Polynomial, order: MonomialOrder) -> Polynomial:
    """(L / LT(f))·f − (L / LT(g))·g with L the lcm of the leading monomials."""
    if f.is_zero() or g.is_zero():
        raise ZeroPolynomialError("s-polynomial of a zero polynomial")
    _check_ring([f, g], order)
    lf, lg = f.leading_monomial(order), g.leading_monomial(order)
    L = monomial_lcm(lf, lg)
    left = f.shift(monomial_quotient(L, lf)).scale(1 / f.terms[lf])
    right = g.shift(monomial_quotient(L, lg)).scale(1 / g.terms[lg])
    return left - right


def _spoly(f: _Element, g: _Element) -> dict[Monomial, int]:
    L = monomial_lcm(f.lm, g.lm)
    h = gcd(f.lc, g.lc)
    a, b = g.lc // h, f.lc // h
    qf, qg = monomial_quotient(L, f.lm), monomial_quotient(L, g.lm)
    out: dict[Monomial, int] = {}
    for m, c in f.terms.items():
        out[monomial_mul(m, qf)] = a * c
    for m, c in g.terms.items():
        t = monomial_mul(m, qg)
        v = out.get(t, 0) - b * c
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    return out


class _PairSet:
    """Critical pairs with the Gebauer–Möller update."""

    def __init__(self, order: MonomialOrder):
        self.order = order
        self.pairs: dict[tuple[int, int], Monomial] = {}
        self.pruned = 0

    def update(self, basis: list[_Element], f: _Element) -> None:
        new = len(basis)
        lmf = f.lm
        keep = {}
        for (i, j), L in self.pairs.items():
            if (
                monomial_divides(lmf, L)
                and L != monomial_lcm(basis[i].lm, lmf)
                and L != monomial_lcm(basis[j].lm, lmf)
            ):
                self.pruned += 1
                continue
            keep[(i, j)] = L
        self.pairs = keep
        classes: dict[Monomial, list[int]] = {}
        for i, e in enumerate(basis):
            classes.setdefault(monomial_lcm(e.lm, lmf), []).append(i)
        minimal: list[Monomial] = []
        for L in sorted(classes, key=self.order.key):
            if any(monomial_divides(other, L) for other in minimal):
                self.pruned += len(classes[L])
                continue
            minimal.append(L)
        for L in minimal:
            members = classes[L]
            if any(L == monomial_mul(basis[i].lm, lmf) for i in members):
                # product criterion: the whole class reduces to zero
                self.pruned += len(members)
                continue
            self.pruned += len(members) - 1
            self.pairs[(min(members), new)] = L

    def pop(self) -> tuple[int, int]:
        key = self.order.key
        pair = min(self.pairs, key=lambda p: (sum(self.pairs[p]), key(self.pairs[p]), p[1], p[0]))
        del self.pairs[pair]
        return pair

    def __len__(self) -> int:
        return len(self.pairs)


def _to_polynomial(e: _Element, context: RingContext) -> Polynomial:
    lc = Fraction(e.lc)
    return Polynomial(context, {m: Fraction(v) / lc for m, v in e.terms.items()})


def _interreduce(basis: list[_Element], order: MonomialOrder) -> list[_Element]:
    minimal: list[_Element] = []
    for e in sorted(basis, key=lambda e: order.key(e.lm)):
        if not any(monomial_divides(m.lm, e.lm) for m in minimal):
            minimal.append(e)
    reduced = []
    for i, e in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1 :]
        remainder, _ = _reduce(e.terms, others, order)
        reduced.append(_element(remainder, order))
    return sorted(reduced, key=lambda e: order.key(e.lm), reverse=True)


def _bits(e: _Element) -> int:
    return max(abs(v).bit_length() for v in e.terms.values())


def buchberger(I: Ideal, order: MonomialOrder, budget: Optional[Budget] = None) -> GroebnerBasis:
    """Reduced Gröbner basis of I, or a partial basis flagged ``BUDGET_EXHAUSTED``."""
    budget = budget or Budget()
    if order.context != I.context:
        raise ContextMismatchError("order and ideal live in different rings")
    context = I.context
    if not I.generators:
        return GroebnerBasis(order, ())
    unit = _Element(context.one_monomial(), {context.one_monomial(): 1})
    basis: list[_Element] = []
    pairs = _PairSet(order)
    for g in I.generators:
        e = _element(_primitive(g.terms)[0], order)
        if sum(e.lm) == 0:
            return GroebnerBasis(order, (_to_polynomial(unit, context),))
        pairs.update(basis, e)
        basis.append(e)

    processed = 0
    while len(pairs):
        if processed >= budget.max_pairs:
            return _exhausted(basis, order, context, processed, pairs.pruned, "pair budget")
        i, j = pairs.pop()
        processed += 1
        s = _spoly(basis[i], basis[j])
        if s:
            remainder, _ = _reduce(s, basis, order)
            if remainder:
                e = _element(remainder, order)
                if sum(e.lm) == 0:
                    logger.info("unit ideal detected after %d pairs", processed)
                    return GroebnerBasis(order, (_to_polynomial(unit, context),), True, Outcome.COMPLETE, processed, pairs.pruned)
                if _bits(e) > budget.max_coeff_bits:
                    basis.append(e)
                    return _exhausted(basis, order, context, processed, pairs.pruned, "coefficient budget")
                pairs.update(basis, e)
                basis.append(e)
        if processed % PROGRESS_EVERY == 0:
            logger.debug(
                "processed %d pairs: basis %d, pending %d, pruned %d", processed, len(basis), len(pairs), pairs.pruned
            )
    reduced = _interreduce(basis, order)
    logger.info("Groebner basis with %d elements after %d pairs (%d pruned)", len(reduced), processed, pairs.pruned)
    return GroebnerBasis(
        order, tuple(_to_polynomial(e, context) for e in reduced), True, Outcome.COMPLETE, processed, pairs.pruned
    )


def _exhausted(basis, order, context, processed, pruned, reason) -> GroebnerBasis:
    logger.warning("Buchberger stopped: %s exhausted after %d pairs", reason, processed)
    return GroebnerBasis(
        order,
        tuple(_to_polynomial(e, context) for e in basis),
        reduced=False,
        outcome=Outcome.BUDGET_EXHAUSTED,
        pairs_processed=processed,
        pairs_pruned=pruned,
    )


def is_infeasible(G: GroebnerBasis) -> bool:
    """True iff G is a completed basis equal to {1}: the equations have no common zero."""
    return G.outcome is Outcome.COMPLETE and G.is_unit()

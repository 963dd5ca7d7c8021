"""Two-stage certificate that a form is not a sum of t squares.

Stage 1 finds a PSD moment matrix whose kernel is exactly span{p_1..p_s}; every
summand of any SOS decomposition then lies in that span. Stage 2 writes a
hypothetical t-square decomposition in triangular shape over p_1..p_s and asks
Buchberger whether the resulting quadratic equations are consistent.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from modules.exactla import KernelBasis, RationalMatrix, kernel, ldlt_psd, rank, same_span, solve
from modules.gram import (
    MatrixSpace,
    MomentMatrix,
    dual_obstruction_space,
    gram_point,
    monomial_basis,
    pick_psd_element,
    sign_patterns,
)
from modules.groebner import Budget, GroebnerBasis, Ideal, Outcome, buchberger, is_infeasible
from modules.instances import EXAMPLE_2_1
from modules.parser import InstanceText, parse_instance, parse_polynomial
from modules.polyring import (
    Monomial,
    MonomialOrder,
    OrderKind,
    Polynomial,
    RingContext,
    expand_sos,
    is_homogeneous,
    poly_mul,
)

logger = logging.getLogger(__name__)

WITNESS_BUDGET = 64


class InstanceError(ValueError):
    pass


class SpanError(ValueError):
    pass


class MissingSeedError(ValueError):
    pass


class Verdict(str, Enum):
    PINNED = "pinned"
    INFEASIBLE = "infeasible"
    FEASIBLE_COMPLEX = "feasible-complex"
    WITNESS_FOUND = "witness-found"
    INCONCLUSIVE = "inconclusive"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class SosInstance:
    name: str
    context: RingContext
    g: Polynomial
    generators: tuple[Polynomial, ...]

    def __post_init__(self):
        if not self.generators:
            raise InstanceError("an instance needs at least one generator")
        if any(p.context != self.context for p in (self.g, *self.generators)):
            raise InstanceError("g and the generators must share the instance's ring")
        degrees = {is_homogeneous(p) for p in self.generators}
        if len(degrees) != 1 or not isinstance(next(iter(degrees)), int):
            raise InstanceError("generators must be nonzero forms of one common degree")
        d = next(iter(degrees))
        if is_homogeneous(self.g) not in (2 * d, "zero"):
            raise InstanceError(f"g must be a form of degree {2 * d}")

    @property
    def s(self) -> int:
        return len(self.generators)

    @property
    def degree(self) -> int:
        """Degree d of the generators; g has degree 2d."""
        return is_homogeneous(self.generators[0])

    @classmethod
    def from_text(cls, name: str, parsed: Union[str, InstanceText]) -> "SosInstance":
        if isinstance(parsed, str):
            parsed = parse_instance(parsed)
        generators = tuple(parsed.generators.values())
        g = parsed.target if parsed.target is not None else expand_sos(generators)
        return cls(name, parsed.context, g, generators)


def coefficient_matrix(inst: SosInstance, order: Optional[MonomialOrder] = None) -> RationalMatrix:
    basis = monomial_basis(inst.context, inst.degree, order)
    return RationalMatrix([basis.coordinates(p) for p in inst.generators], basis.size)


def first_mismatch(inst: SosInstance, order: Optional[MonomialOrder] = None) -> Optional[tuple[Monomial, Fraction, Fraction]]:
    """The largest monomial where g and Σ p_i² differ, as (monomial, in g, in the sum)."""
    order = order or MonomialOrder(OrderKind.DEGREVLEX, inst.context)
    total = expand_sos(inst.generators)
    for m in order.descending(set(total.terms) | set(inst.g.terms)):
        if total.coefficient(m) != inst.g.coefficient(m):
            return m, inst.g.coefficient(m), total.coefficient(m)
    return None


def verify_instance(inst: SosInstance) -> bool:
    """True iff g = Σ p_i² exactly and the p_i are linearly independent."""
    if expand_sos(inst.generators) != inst.g:
        return False
    return rank(coefficient_matrix(inst)) == inst.s


@dataclass
class Stage1Result:
    space: MatrixSpace
    psd_element: Optional[MomentMatrix]
    kernel: Optional[KernelBasis]
    span_matches: bool
    annihilates_products: bool
    vanishes_on_g: bool
    verdict: Verdict
    gram_rank: int
    elapsed: float = 0.0


def stage1_pin_summands(inst: SosInstance, order: Optional[MonomialOrder] = None) -> Stage1Result:
    started = time.perf_counter()
    order = order or MonomialOrder(OrderKind.DEGREVLEX, inst.context)
    d = inst.degree
    basis = monomial_basis(inst.context, d, order)
    space = dual_obstruction_space(inst.generators, inst.context, d, order, basis)

    # re-check by direct expansion rather than through the constraint matrix
    products = [poly_mul(p, Polynomial(inst.context, {m: 1})) for p in inst.generators for m in basis.monomials]
    annihilates = all(ell(q) == 0 for ell in space.functionals for q in products)
    vanishes = all(ell(inst.g) == 0 for ell in space.functionals)
    gram_rank = ldlt_psd(gram_point(inst.generators, basis)).rank

    psd = pick_psd_element(space)
    null = None
    span = False
    if psd is not None:
        null = kernel(psd.matrix)
        span = same_span(null.vectors, [basis.coordinates(p) for p in inst.generators])
        logger.info("kernel of the chosen moment matrix has dimension %d", null.dimension)
    # pinning only transfers to g when g itself is the verified sum Σ p_i²
    verified = verify_instance(inst)
    verdict = Verdict.PINNED if span and annihilates and vanishes and verified else Verdict.INCONCLUSIVE
    logger.info("stage 1 for %s: dim E = %d, verdict %s", inst.name, space.dimension, verdict.value)
    return Stage1Result(space, psd, null, span, annihilates, vanishes, verdict, gram_rank, time.perf_counter() - started)


def _unknown_name(i: int, j: int, s: int) -> str:
    return f"u{i}{j}" if s < 10 else f"u{i}_{j}"


@dataclass(frozen=True)
class TriangularAnsatz:
    """f_i = Σ_{j ≥ i} u_ij p_j for i = 1..t; rows beyond s are zero."""

    s: int
    t: int
    ring: RingContext
    unknowns: tuple[tuple[int, int], ...]

    @property
    def unknown_count(self) -> int:
        return len(self.unknowns)

    def coefficient(self, i: int, j: int) -> Polynomial:
        """u_ij as a polynomial in the unknowns' ring, zero outside the triangle."""
        if i > min(self.t, self.s) or j < i or j > self.s:
            return self.ring.zero()
        return self.ring.variable(_unknown_name(i, j, self.s))

    def name(self, i: int, j: int) -> str:
        return _unknown_name(i, j, self.s)

    def symbolic(self, generators: Sequence[Polynomial]) -> list[Polynomial]:
        """f_1..f_t in the joint ring (unknowns first, then the generators' variables)."""
        if len(generators) != self.s:
            raise InstanceError(f"ansatz over {self.s} generators, got {len(generators)}")
        base = generators[0].context
        joint = RingContext(self.ring.variables + base.variables)
        offset = self.ring.n
        lifted = [p.embed(joint, range(offset, offset + base.n)) for p in generators]
        rows = []
        for i in range(1, self.t + 1):
            f = joint.zero()
            for j in range(i, self.s + 1):
                f = f + joint.variable(self.name(i, j)) * lifted[j - 1]
            rows.append(f)
        return rows


def build_ansatz(s: int, t: int) -> TriangularAnsatz:
    if s < 1 or t < 1:
        raise ValueError(f"need s >= 1 and t >= 1, got s={s}, t={t}")
    unknowns = tuple((i, j) for i in range(1, min(s, t) + 1) for j in range(i, s + 1))
    ring = RingContext(tuple(_unknown_name(i, j, s) for i, j in unknowns))
    return TriangularAnsatz(s, t, ring, unknowns)


def ansatz_system(inst: SosInstance, ansatz: TriangularAnsatz, order: Optional[MonomialOrder] = None) -> list[tuple[Monomial, Polynomial]]:
    """Pairs (x-monomial, coefficient of Σ f_i² − g there), nonzero ones only, by decreasing monomial."""
    if ansatz.s != inst.s:
        raise InstanceError(f"ansatz built for s={ansatz.s}, instance has s={inst.s}")
    order = order or MonomialOrder(OrderKind.DEGREVLEX, inst.context)
    ring = ansatz.ring
    s, t = inst.s, min(ansatz.t, inst.s)
    coefficients: dict[Monomial, Polynomial] = {}
    for j in range(1, s + 1):
        for k in range(j, s + 1):
            gram = ring.zero()
            for i in range(1, min(j, t) + 1):
                gram = gram + ansatz.coefficient(i, j) * ansatz.coefficient(i, k)
            if gram.is_zero():
                continue
            weight = 1 if j == k else 2
            for m, c in poly_mul(inst.generators[j - 1], inst.generators[k - 1]).terms.items():
                coefficients[m] = coefficients.get(m, ring.zero()) + gram.scale(weight * c)
    for m, c in inst.g.terms.items():
        coefficients[m] = coefficients.get(m, ring.zero()) - c
    return [(m, coefficients[m]) for m in order.descending(coefficients) if not coefficients[m].is_zero()]


def ansatz_equations(inst: SosInstance, ansatz: TriangularAnsatz) -> Ideal:
    return Ideal(ansatz.ring, tuple(p for _, p in ansatz_system(inst, ansatz)))


def find_witness(ideal: Ideal, ansatz: TriangularAnsatz, budget: int = WITNESS_BUDGET) -> Optional[dict[str, Fraction]]:
    """Try u_ii = ±1 on the diagonal, zero elsewhere; return the first exact common zero."""
    diagonal = [ansatz.name(i, i) for i in range(1, min(ansatz.t, ansatz.s) + 1)]
    for signs in sign_patterns(len(diagonal), budget):
        point = dict(zip(diagonal, signs))
        if all(g.evaluate(point) == 0 for g in ideal.generators):
            return {name: point.get(name, Fraction(0)) for name in ansatz.ring.variables}
    return None


@dataclass
class Stage2Result:
    t: int
    unknowns: int
    generators: int
    verdict: Verdict
    order: MonomialOrder
    basis: Optional[GroebnerBasis] = None
    witness: Optional[dict[str, Fraction]] = None
    rows: tuple[Polynomial, ...] = ()
    note: str = ""
    elapsed: float = 0.0

    @property
    def variable_order(self) -> tuple[str, ...]:
        return self.order.context.variables


def decide_t_squares(
    inst: SosInstance,
    t: int,
    stage1: Optional[Stage1Result] = None,
    order_kind: Union[str, OrderKind] = OrderKind.DEGREVLEX,
    budget: Optional[Budget] = None,
    witness_budget: int = WITNESS_BUDGET,
) -> Stage2Result:
    """Decide whether g is a sum of t squares, as far as the certificate machinery allows."""
    started = time.perf_counter()
    ansatz = build_ansatz(inst.s, t)
    ideal = ansatz_equations(inst, ansatz)
    order = MonomialOrder(OrderKind(order_kind), ansatz.ring)
    result = Stage2Result(t, ansatz.unknown_count, len(ideal.generators), Verdict.INCONCLUSIVE, order)
    result.rows = tuple(ansatz.symbolic(inst.generators))
    logger.info("t=%d: %d unknowns, %d equations", t, result.unknowns, result.generators)

    witness = find_witness(ideal, ansatz, witness_budget)
    if witness is not None:
        result.verdict = Verdict.WITNESS_FOUND
        result.witness = witness
        result.note = "explicit rational decomposition verified by substitution"
    elif not verify_instance(inst):
        result.note = "g is not the verified sum of squares of independent p_i; no infeasibility claim is made"
    else:
        stage1 = stage1 or stage1_pin_summands(inst)
        if stage1.verdict is not Verdict.PINNED:
            result.note = "stage 1 did not pin the summands; an infeasibility claim would be unsound"
        else:
            basis = buchberger(ideal, order, budget)
            result.basis = basis
            if basis.outcome is Outcome.BUDGET_EXHAUSTED:
                result.verdict = Verdict.BUDGET_EXHAUSTED
                result.note = f"budget exhausted after {basis.pairs_processed} pairs"
            elif is_infeasible(basis):
                result.verdict = Verdict.INFEASIBLE
                result.note = f"g is not a sum of {t} squares: reduced Groebner basis is {{1}}"
            else:
                result.verdict = Verdict.FEASIBLE_COMPLEX
                result.note = "equations have complex solutions; real solvability undetermined"
    result.elapsed = time.perf_counter() - started
    logger.info("t=%d: %s", t, result.verdict.value)
    return result


@dataclass(frozen=True)
class TriangularDecomposition:
    weights: tuple[Fraction, ...]
    polys: tuple[Polynomial, ...]
    rank: int
    coefficients: RationalMatrix = field(repr=False)


def triangular_reduce(q: Sequence[Polynomial], p: Sequence[Polynomial]) -> TriangularDecomposition:
    """Rewrite Σ q_i² as Σ d_k q̃_k² with q̃_k ∈ span{p_k..p_s} and d_k > 0."""
    if not p:
        raise SpanError("need at least one basis polynomial")
    d = is_homogeneous(p[0])
    if not isinstance(d, int):
        raise SpanError("basis polynomials must be nonzero forms")
    basis = monomial_basis(p[0].context, d)
    P = RationalMatrix([basis.coordinates(x) for x in p], basis.size)
    if rank(P) != len(p):
        raise SpanError("basis polynomials are linearly dependent")
    Pt = P.transpose()
    rows = []
    for i, qi in enumerate(q):
        try:
            coordinates = basis.coordinates(qi)
        except ValueError as e:
            raise SpanError(f"q{i + 1} is not a form of degree {d}") from e
        a = solve(Pt, coordinates)
        if a is None:
            raise SpanError(f"q{i + 1} is not in the span of the basis polynomials")
        rows.append(a)
    A = RationalMatrix(rows, len(p))
    M = A.transpose() @ A
    factor = ldlt_psd(M, pivot=False)
    weights, polys = [], []
    for k, dk in enumerate(factor.D):
        if dk:
            weights.append(dk)
            polys.append(sum((x * factor.L[j, k] for j, x in enumerate(p) if factor.L[j, k]), p[0].context.zero()))
    return TriangularDecomposition(tuple(weights), tuple(polys), len(weights), A)


def generate_family_instance(n: int, seed: Optional[Sequence[Union[Polynomial, str]]] = None) -> SosInstance:
    """Seed forms in n−1 variables plus x_i·x_n for i < n: 2(n−1) generators."""
    if n < 2:
        raise ValueError(f"need at least two variables, got {n}")
    small = RingContext.standard(n - 1)
    if seed is None:
        if n != 5:
            raise MissingSeedError(
                f"no builtin seed for n={n}: supply {n - 1} quadratic forms in {n - 1} variables"
                " (the boundary form they come from is problem input)"
            )
        seed = list(parse_instance(EXAMPLE_2_1).generators.values())
    seed = [parse_polynomial(x, small) if isinstance(x, str) else x for x in seed]
    if len(seed) != n - 1:
        raise MissingSeedError(f"expected {n - 1} seed forms, got {len(seed)}")
    ctx = RingContext.standard(n)
    generators = [x.embed(ctx) for x in seed]
    last = ctx.variable(n - 1)
    generators += [ctx.variable(i) * last for i in range(n - 1)]
    return SosInstance(f"family-{n}", ctx, expand_sos(generators), tuple(generators))


def substitute_ansatz(ansatz: TriangularAnsatz, point: Mapping[str, Fraction], generators: Sequence[Polynomial]) -> list[Polynomial]:
    """The concrete f_1..f_t for given unknown values."""
    rows = []
    ctx = generators[0].context
    for i in range(1, ansatz.t + 1):
        f = ctx.zero()
        for j in range(i, ansatz.s + 1):
            c = ansatz.coefficient(i, j).evaluate(point)
            if c:
                f = f + generators[j - 1] * c
        rows.append(f)
    return rows

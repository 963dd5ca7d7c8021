"""Gram matrices, moment matrices and the space of dual certificates.

A linear functional ℓ on forms of degree 2d is stored by its values on the
degree-2d monomials. Its moment matrix on a degree-d basis m has entries
ℓ(m_a·m_b). The dual obstruction space collects the moment matrices of all ℓ
with ℓ(p·m_j) = 0 for every given p and every basis monomial m_j.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import comb, gcd, lcm
from typing import Optional, Sequence

from modules.exactla import RationalMatrix, Vector, kernel, ldlt_psd
from modules.polyring import (
    Monomial,
    MonomialOrder,
    OrderKind,
    Polynomial,
    RingContext,
    homogeneous_monomials,
    is_homogeneous,
    monomial_mul,
)

logger = logging.getLogger(__name__)

PSD_SEARCH_BUDGET = 64


class DegreeMismatchError(ValueError):
    pass


class InhomogeneousError(ValueError):
    pass


@dataclass(frozen=True)
class MonomialBasis:
    context: RingContext
    degree: int
    monomials: tuple[Monomial, ...]

    def __post_init__(self):
        expected = comb(self.context.n + self.degree - 1, self.degree)
        if len(self.monomials) != expected or len(set(self.monomials)) != expected:
            raise ValueError(f"a degree-{self.degree} basis in {self.context.n} variables has {expected} monomials")
        if any(len(m) != self.context.n or sum(m) != self.degree for m in self.monomials):
            raise DegreeMismatchError(f"basis contains a monomial not of degree {self.degree}")

    @property
    def size(self) -> int:
        return len(self.monomials)

    def index(self) -> dict[Monomial, int]:
        return {m: i for i, m in enumerate(self.monomials)}

    def names(self) -> list[str]:
        return [self.context.monomial_name(m) for m in self.monomials]

    def coordinates(self, p: Polynomial) -> Vector:
        """Coefficient vector of a degree-d form in this basis."""
        if p.context != self.context:
            raise DegreeMismatchError("polynomial lives in another ring")
        position = self.index()
        v = [Fraction(0)] * self.size
        for m, c in p.terms.items():
            if m not in position:
                raise DegreeMismatchError(f"monomial {self.context.monomial_name(m)} is not of degree {self.degree}")
            v[position[m]] = c
        return tuple(v)

    def polynomial(self, coordinates: Sequence) -> Polynomial:
        return Polynomial(self.context, {m: c for m, c in zip(self.monomials, coordinates) if c})

    def reordered(self, monomials: Sequence[Monomial]) -> "MonomialBasis":
        if set(monomials) != set(self.monomials):
            raise ValueError("a reordering must list the same monomials")
        return MonomialBasis(self.context, self.degree, tuple(monomials))


def monomial_basis(ctx: RingContext, d: int, order: Optional[MonomialOrder] = None) -> MonomialBasis:
    if d < 0:
        raise ValueError(f"degree must be nonnegative, got {d}")
    order = order or MonomialOrder(OrderKind.DEGREVLEX, ctx)
    return MonomialBasis(ctx, d, tuple(order.descending(homogeneous_monomials(ctx.n, d))))


def split_basis(ctx: RingContext, d: int) -> MonomialBasis:
    """Monomials free of the last variable first, then the rest; each block lexicographically descending."""
    monomials = sorted(homogeneous_monomials(ctx.n, d), key=lambda m: (m[-1], tuple(-e for e in m)))
    return MonomialBasis(ctx, d, tuple(monomials))


def gram_evaluate(A: RationalMatrix, basis: MonomialBasis) -> Polynomial:
    """The form mᵀ A m."""
    if A.shape != (basis.size, basis.size):
        raise DegreeMismatchError(f"Gram matrix of shape {A.shape} for a basis of {basis.size} monomials")
    terms: dict[Monomial, Fraction] = {}
    for a, ma in enumerate(basis.monomials):
        for b, mb in enumerate(basis.monomials):
            c = A[a, b]
            if c:
                m = monomial_mul(ma, mb)
                terms[m] = terms.get(m, 0) + c
    return Polynomial(basis.context, terms)


def gram_point(polys: Sequence[Polynomial], basis: MonomialBasis) -> RationalMatrix:
    """Σ c_i c_iᵀ over the coefficient vectors c_i of ``polys``: a Gram matrix of Σ p_i²."""
    vectors = [basis.coordinates(p) for p in polys]
    N = basis.size
    return RationalMatrix(
        [[sum((v[a] * v[b] for v in vectors), Fraction(0)) for b in range(N)] for a in range(N)], N
    )


@dataclass(frozen=True)
class LinearFunctional:
    basis: MonomialBasis  # degree 2d
    values: Vector

    def __post_init__(self):
        if len(self.values) != self.basis.size:
            raise DegreeMismatchError(f"{len(self.values)} values for {self.basis.size} monomials")

    def __call__(self, p: Polynomial) -> Fraction:
        position = self.basis.index()
        total = Fraction(0)
        for m, c in p.terms.items():
            if m not in position:
                raise DegreeMismatchError(f"functional is defined on degree {self.basis.degree} only")
            total += c * self.values[position[m]]
        return total


@dataclass(frozen=True)
class MomentMatrix:
    basis: MonomialBasis
    matrix: RationalMatrix
    parameters: Optional[tuple[Fraction, ...]] = None

    def entry(self, a: Monomial, b: Monomial) -> Fraction:
        position = self.basis.index()
        return self.matrix[position[a], position[b]]

    def in_basis(self, basis: MonomialBasis) -> "MomentMatrix":
        """Same bilinear form written in a reordering of the basis."""
        position = self.basis.index()
        perm = [position[m] for m in basis.monomials]
        return MomentMatrix(basis, self.matrix.permuted(perm), self.parameters)

    def to_json(self) -> dict:
        return {"basis": self.basis.names(), "entries": self.matrix.to_strings()}


def functional_to_moment(ell: LinearFunctional, basis: MonomialBasis) -> MomentMatrix:
    if ell.basis.degree != 2 * basis.degree or ell.basis.context != basis.context:
        raise DegreeMismatchError(
            f"functional of degree {ell.basis.degree} does not pair forms of degree {basis.degree}"
        )
    position = ell.basis.index()
    rows = [[ell.values[position[monomial_mul(ma, mb)]] for mb in basis.monomials] for ma in basis.monomials]
    return MomentMatrix(basis, RationalMatrix(rows, basis.size))


def _primitive(values: Sequence[Fraction]) -> Vector:
    """Scale to integers with gcd 1 and a positive first nonzero entry."""
    nonzero = [v for v in values if v]
    if not nonzero:
        return tuple(values)
    denominator = reduce(lcm, (v.denominator for v in nonzero), 1)
    integers = [int(v * denominator) for v in values]
    g = reduce(gcd, (abs(v) for v in integers if v), 0)
    sign = 1 if nonzero[0] > 0 else -1
    return tuple(Fraction(sign * v // g) for v in integers)


@dataclass(frozen=True)
class MatrixSpace:
    basis: MonomialBasis
    functionals: tuple[LinearFunctional, ...]
    matrices: tuple[MomentMatrix, ...]

    @property
    def dimension(self) -> int:
        return len(self.matrices)

    def combine(self, coefficients: Sequence) -> MomentMatrix:
        if len(coefficients) != self.dimension:
            raise ValueError(f"{len(coefficients)} coefficients for a space of dimension {self.dimension}")
        total = RationalMatrix.zeros(self.basis.size, self.basis.size)
        for c, Q in zip(coefficients, self.matrices):
            if c:
                total = total + Q.matrix.scale(c)
        return MomentMatrix(self.basis, total, tuple(Fraction(c) for c in coefficients))

    def functional(self, coefficients: Sequence) -> LinearFunctional:
        higher = self.functionals[0].basis
        values = [Fraction(0)] * higher.size
        for c, ell in zip(coefficients, self.functionals):
            values = [v + Fraction(c) * w for v, w in zip(values, ell.values)]
        return LinearFunctional(higher, tuple(values))

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "basis": [Q.to_json() for Q in self.matrices]}


def constraint_matrix(polys: Sequence[Polynomial], basis: MonomialBasis, higher: MonomialBasis) -> RationalMatrix:
    """One row per pair (p_i, m_j): the coefficients of p_i·m_j on the degree-2d monomials."""
    position = higher.index()
    rows = []
    for p in polys:
        for mj in basis.monomials:
            row = [Fraction(0)] * higher.size
            for m, c in p.terms.items():
                row[position[monomial_mul(m, mj)]] = c
            rows.append(row)
    return RationalMatrix(rows, higher.size)


def dual_obstruction_space(
    polys: Sequence[Polynomial],
    ctx: RingContext,
    d: int,
    order: Optional[MonomialOrder] = None,
    basis: Optional[MonomialBasis] = None,
) -> MatrixSpace:
    """All moment matrices Q_ℓ with ℓ(p_i·q) = 0 for every p_i and every degree-d form q."""
    for p in polys:
        degree = is_homogeneous(p)
        if p.context != ctx:
            raise DegreeMismatchError("polynomials must share the given ring")
        if degree is None or (degree != d and not p.is_zero()):
            raise InhomogeneousError(f"expected homogeneous forms of degree {d}")
    order = order or MonomialOrder(OrderKind.DEGREVLEX, ctx)
    basis = basis or monomial_basis(ctx, d, order)
    higher = monomial_basis(ctx, 2 * d, order)
    M = constraint_matrix(polys, basis, higher)
    null = kernel(M)
    logger.info(
        "constraint matrix %dx%d, dual space of dimension %d", M.rows, M.cols, null.dimension
    )
    functionals = tuple(LinearFunctional(higher, _primitive(v)) for v in null.vectors)
    matrices = tuple(functional_to_moment(ell, basis) for ell in functionals)
    return MatrixSpace(basis, functionals, matrices)


def sign_patterns(k: int, budget: int):
    """All-ones first, then the other ±1 vectors of length k in binary order, at most ``budget``."""
    for bits in itertools.islice(itertools.product((1, -1), repeat=k), budget):
        yield tuple(Fraction(b) for b in bits)


def pick_psd_element(space: MatrixSpace, budget: int = PSD_SEARCH_BUDGET) -> Optional[MomentMatrix]:
    """A nonzero positive semidefinite member, searched over ±1 combinations of the basis."""
    if space.dimension == 0:
        return None
    for coefficients in sign_patterns(space.dimension, budget):
        candidate = space.combine(coefficients)
        if candidate.matrix.is_zero():
            continue
        if ldlt_psd(candidate.matrix).psd:
            logger.info("PSD element found at parameters %s", [str(c) for c in coefficients])
            return candidate
    logger.info("no PSD element among %d sign patterns", min(budget, 2 ** space.dimension))
    return None

"""Dense linear algebra over the rationals: echelon forms, kernels and an exact PSD test."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

logger = logging.getLogger(__name__)

Vector = tuple[Fraction, ...]


class DimensionError(ValueError):
    pass


class NotSymmetricError(ValueError):
    pass


def as_vector(values: Iterable) -> Vector:
    return tuple(Fraction(v) for v in values)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise DimensionError(f"vector lengths differ: {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v) if a and b), Fraction(0))


class RationalMatrix:
    """Immutable rectangular matrix of Fractions."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: Iterable[Iterable], cols: Optional[int] = None):
        entries = tuple(as_vector(r) for r in rows)
        if cols is None:
            cols = len(entries[0]) if entries else 0
        if any(len(r) != cols for r in entries):
            raise DimensionError("matrix rows have different lengths")
        self.rows = len(entries)
        self.cols = cols
        self.entries = entries

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def diagonal(cls, values: Sequence) -> "RationalMatrix":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i][j]

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix([self.column(j) for j in range(self.cols)], self.rows)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        columns = [other.column(j) for j in range(other.cols)]
        return RationalMatrix([[dot(r, c) for c in columns] for r in self.entries], other.cols)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise DimensionError(f"vector of length {len(v)} for a matrix with {self.cols} columns")
        v = as_vector(v)
        return tuple(dot(r, v) for r in self.entries)

    def quadratic_form(self, v: Sequence) -> Fraction:
        return dot(as_vector(v), self.apply(v))

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return RationalMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.cols)

    def scale(self, c) -> "RationalMatrix":
        c = Fraction(c)
        return RationalMatrix([[a * c for a in r] for r in self.entries], self.cols)

    def permuted(self, perm: Sequence[int]) -> "RationalMatrix":
        """Symmetric permutation: entry (i, j) of the result is entry (perm[i], perm[j])."""
        return RationalMatrix([[self.entries[a][b] for b in perm] for a in perm], len(perm))

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self.entries[i][j] == self.entries[j][i] for i in range(self.rows) for j in range(i)
        )

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.entries)

    def to_strings(self) -> list[list[str]]:
        return [[str(a) for a in r] for r in self.entries]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return f"RationalMatrix({self.to_strings()})"


def rref(M: RationalMatrix) -> tuple[RationalMatrix, int, tuple[int, ...]]:
    """Reduced row echelon form, rank and pivot columns."""
    rows = [list(r) for r in M.entries]
    pivots: list[int] = []
    r = 0
    for c in range(M.cols):
        if r == M.rows:
            break
        p = next((i for i in range(r, M.rows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        lead = rows[r][c]
        if lead != 1:
            rows[r] = [a / lead for a in rows[r]]
        pivot_row = rows[r]
        for i in range(M.rows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b if b else a for a, b in zip(rows[i], pivot_row)]
        pivots.append(c)
        r += 1
    return RationalMatrix(rows, M.cols), r, tuple(pivots)


def rank(M: RationalMatrix) -> int:
    return rref(M)[1]


@dataclass(frozen=True)
class KernelBasis:
    vectors: tuple[Vector, ...]
    length: int

    @property
    def dimension(self) -> int:
        return len(self.vectors)


def kernel(M: RationalMatrix) -> KernelBasis:
    """Basis of the right null space, one vector per free column (that entry set to 1)."""
    R, r, pivots = rref(M)
    pivot_set = set(pivots)
    free = [c for c in range(M.cols) if c not in pivot_set]
    vectors = []
    for f in free:
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -R[i, f]
        vectors.append(tuple(v))
    return KernelBasis(tuple(vectors), M.cols)


def solve(M: RationalMatrix, b: Sequence) -> Optional[Vector]:
    """One solution x of M x = b, or None when the system is inconsistent."""
    if len(b) != M.rows:
        raise DimensionError(f"right-hand side of length {len(b)} for {M.rows} equations")
    augmented = RationalMatrix([list(r) + [Fraction(v)] for r, v in zip(M.entries, b)], M.cols + 1)
    R, r, pivots = rref(augmented)
    if pivots and pivots[-1] == M.cols:
        return None
    x = [Fraction(0)] * M.cols
    for i, c in enumerate(pivots):
        x[c] = R[i, M.cols]
    return tuple(x)


def same_span(U: Sequence[Sequence], V: Sequence[Sequence]) -> bool:
    """True iff the row spaces of U and V coincide."""
    lengths = {len(u) for u in U} | {len(v) for v in V}
    if len(lengths) > 1:
        raise DimensionError(f"vectors of different lengths: {sorted(lengths)}")
    if not lengths:
        return True
    n = lengths.pop()

    def reduced(vectors):
        if not vectors:
            return ()
        R, r, _ = rref(RationalMatrix(vectors, n))
        return R.entries[:r]

    return reduced(U) == reduced(V)


@dataclass(frozen=True)
class LdltResult:
    """P M Pᵀ = L diag(D) Lᵀ, with ``permutation[k]`` the original index at position k."""

    permutation: tuple[int, ...]
    L: RationalMatrix
    D: tuple[Fraction, ...]
    psd: bool
    witness: Optional[Vector] = None
    completed: bool = True

    @property
    def rank(self) -> int:
        return sum(1 for d in self.D if d)


def _back_substitute_transpose(L: list[list[Fraction]], y: list[Fraction]) -> list[Fraction]:
    # solve Lᵀ x = y for unit lower triangular L
    n = len(y)
    x = list(y)
    for i in range(n - 1, -1, -1):
        x[i] = y[i] - sum((L[j][i] * x[j] for j in range(i + 1, n) if L[j][i]), Fraction(0))
    return x


def ldlt_psd(M: RationalMatrix, pivot: bool = True) -> LdltResult:
    """Exact LDLᵀ with symmetric pivoting on the largest remaining diagonal entry.

    A zero pivot is accepted only if its residual row vanishes; otherwise, or on a
    negative pivot, the factorisation stops and returns a vector v with vᵀMv < 0.
    With ``pivot=False`` positions keep their order, which preserves triangular
    structure for callers that need it.
    """
    if not M.is_symmetric():
        raise NotSymmetricError(f"matrix of shape {M.shape} is not symmetric")
    n = M.rows
    S = [list(r) for r in M.entries]
    L = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    perm = list(range(n))
    D: list[Fraction] = []

    def swap(a: int, b: int) -> None:
        if a == b:
            return
        S[a], S[b] = S[b], S[a]
        for r in S:
            r[a], r[b] = r[b], r[a]
        perm[a], perm[b] = perm[b], perm[a]
        for j in range(len(D)):
            L[a][j], L[b][j] = L[b][j], L[a][j]

    def failure(k: int, local: dict[int, Fraction]) -> LdltResult:
        y = [Fraction(0)] * n
        for i, v in local.items():
            y[i] = v
        x = _back_substitute_transpose(L, y)
        witness = [Fraction(0)] * n
        for pos, original in enumerate(perm):
            witness[original] = x[pos]
        logger.debug("matrix is not PSD: stopped at position %d", k)
        return LdltResult(tuple(perm), RationalMatrix(L, n), tuple(D), False, tuple(witness), completed=False)

    for k in range(n):
        if pivot:
            best = max(range(k, n), key=lambda i: (S[i][i], -i))
            swap(k, best)
        d = S[k][k]
        if d < 0:
            return failure(k, {k: Fraction(1)})
        if d == 0:
            j = next((j for j in range(k + 1, n) if S[k][j]), None)
            if j is not None:
                b, c = S[k][j], S[j][j]
                if c < 0:
                    return failure(k, {j: Fraction(1)})
                # [[0, b], [b, c]] at (1, -b) has value b²(c - 2) < 0 when c <= 0;
                # for c > 0 the point (c, -b) gives -b²c < 0
                if c <= 0:
                    return failure(k, {k: Fraction(1), j: -b})
                return failure(k, {k: c, j: -b})
            D.append(Fraction(0))
            continue
        D.append(d)
        column = [S[i][k] / d for i in range(k + 1, n)]
        for offset, i in enumerate(range(k + 1, n)):
            L[i][k] = column[offset]
        for a, i in enumerate(range(k + 1, n)):
            li = column[a]
            if not li:
                continue
            row = S[i]
            for j in range(k + 1, n):
                if S[k][j]:
                    row[j] -= li * S[k][j]
        for i in range(k + 1, n):
            S[i][k] = S[k][i] = Fraction(0)
    return LdltResult(tuple(perm), RationalMatrix(L, n), tuple(D), True)


def reconstruct(result: LdltResult) -> RationalMatrix:
    """L diag(D) Lᵀ, i.e. the permuted matrix P M Pᵀ."""
    L = result.L
    n = L.rows
    D = list(result.D) + [Fraction(0)] * (n - len(result.D))
    return RationalMatrix(
        [[sum((L[i, k] * D[k] * L[j, k] for k in range(n) if D[k]), Fraction(0)) for j in range(n)] for i in range(n)],
        n,
    )

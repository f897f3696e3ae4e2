"""Exact moment matrices and positive-semidefiniteness verdicts.

The moment matrix indexes rows and columns by bidegree pairs in lexicographic
order; the entry is the grid moment at the componentwise sum.  The verdict
comes from a symmetrically pivoted congruence elimination over the rationals:
a negative pivot or an all-zero diagonal with a surviving off-diagonal entry
yields an explicit rational vector with negative quadratic form, otherwise
the accumulated transform and pivot diagonal certify the factorization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .distributions import GridDistribution, RationalLike, as_fraction
from .errors import InvalidInputError


@dataclass(frozen=True)
class RationalMatrix:
    """Square matrix of exact rationals, optionally tagged with bidegree labels."""

    entries: tuple[tuple[Fraction, ...], ...]
    labels: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self) -> None:
        n = len(self.entries)
        if n == 0 or any(len(row) != n for row in self.entries):
            raise InvalidInputError("matrix must be square and nonempty")
        if self.labels is not None and len(self.labels) != n:
            raise InvalidInputError("label count must match the dimension")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[RationalLike]]) -> "RationalMatrix":
        return cls(tuple(tuple(as_fraction(x) for x in row) for row in rows))

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def is_symmetric(self) -> bool:
        n = self.dim
        return all(
            self.entries[i][j] == self.entries[j][i]
            for i in range(n)
            for j in range(i + 1, n)
        )


def pair_index(n: int) -> tuple[tuple[int, int], ...]:
    """Bidegree pairs (i1, i2), 0 <= i1, i2 <= n, in lexicographic order."""
    return tuple((i1, i2) for i1 in range(n + 1) for i2 in range(n + 1))


def moment_matrix(g: GridDistribution, n: int) -> RationalMatrix:
    """Matrix of mixed moments indexed by bidegree pairs up to n."""
    if n < 0:
        raise InvalidInputError("matrix degree must be nonnegative")
    if g.order < 2 * n:
        raise InvalidInputError(
            f"grid order {g.order} cannot fill a degree-{n} moment matrix"
        )
    pairs = pair_index(n)
    rows = tuple(
        tuple(g.moment(i1 + j1, i2 + j2) for (j1, j2) in pairs)
        for (i1, i2) in pairs
    )
    return RationalMatrix(rows, pairs)


def det_exact(m: RationalMatrix) -> Fraction:
    """Exact determinant by fraction-free elimination on a cleared integer matrix."""
    n = m.dim
    denom = lcm(*(x.denominator for row in m.entries for x in row), 1)
    a = [[int(x * denom) for x in row] for row in m.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], denom**n)


@dataclass(frozen=True)
class PsdVerdict:
    """Outcome of the exact positivity check.

    For a failure, `witness` is a rational vector with strictly negative
    quadratic form `witness_value`.  For a success, `transform` (columns
    operations accumulated, invertible) and `diagonal` satisfy
    transform^T X transform = diag(diagonal).
    """

    is_psd: bool
    witness: tuple[Fraction, ...] | None
    witness_value: Fraction | None
    diagonal: tuple[Fraction, ...] | None
    transform: tuple[tuple[Fraction, ...], ...] | None


def quadratic_form(m: RationalMatrix, vec: Sequence[Fraction]) -> Fraction:
    n = m.dim
    if len(vec) != n:
        raise InvalidInputError("vector length must match the matrix")
    return sum(
        (vec[i] * m.entries[i][j] * vec[j] for i in range(n) for j in range(n)),
        Fraction(0),
    )


def psd_check(m: RationalMatrix) -> PsdVerdict:
    """Exact verdict via congruence elimination with symmetric pivoting.

    Maintains a = t^T X t; a negative diagonal entry of any Schur complement
    is itself a certificate once pulled back through t, and so is the 2x2
    block of a zero diagonal with a nonzero off-diagonal entry.
    """
    if not m.is_symmetric:
        raise InvalidInputError("positivity check needs a symmetric matrix")
    n = m.dim
    a = [list(row) for row in m.entries]
    t = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    remaining = list(range(n))
    diagonal = [Fraction(0)] * n

    def pull_back(coords: dict[int, Fraction]) -> tuple[Fraction, ...]:
        return tuple(
            sum((t[i][j] * c for j, c in coords.items()), Fraction(0))
            for i in range(n)
        )

    while remaining:
        neg = next((p for p in remaining if a[p][p] < 0), None)
        if neg is not None:
            witness = pull_back({neg: Fraction(1)})
            return PsdVerdict(False, witness, a[neg][neg], None, None)
        pivot = next((p for p in remaining if a[p][p] > 0), None)
        if pivot is None:
            # all remaining diagonal entries vanish
            off = next(
                (
                    (p, q)
                    for p in remaining
                    for q in remaining
                    if p != q and a[p][q] != 0
                ),
                None,
            )
            if off is None:
                break
            p, q = off
            sgn = 1 if a[p][q] > 0 else -1
            witness = pull_back({p: Fraction(1), q: Fraction(-sgn)})
            return PsdVerdict(False, witness, -2 * sgn * a[p][q], None, None)
        d = a[pivot][pivot]
        diagonal[pivot] = d
        remaining.remove(pivot)
        for j in remaining:
            factor = a[pivot][j] / d
            if factor == 0:
                continue
            for i in range(n):
                a[i][j] -= factor * a[i][pivot]
                t[i][j] -= factor * t[i][pivot]
            for i in range(n):
                a[j][i] -= factor * a[pivot][i]
    return PsdVerdict(
        True,
        None,
        None,
        tuple(diagonal),
        tuple(tuple(row) for row in t),
    )

"""Finite-dimensional simulator of the second (product-space) construction.

Each family carries a pointed rational vector space; the product space is
spanned by the vacuum and tensor words with strictly decreasing family
labels.  Left operators act by the three-case rule at the head of a word,
right operators by the mirrored rule at the tail, and a moment is the vacuum
coefficient after applying the word right to left.  Since every action grows
a word by at most one factor, a word-length budget equal to the query length
makes the vacuum coefficient exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .distributions import RationalLike, as_fraction
from .errors import InvalidInputError, ResourceLimitError

# a basis word: ((family, basis index), ...) with families strictly decreasing
# and basis indices >= 1 (index 0 is the marked vector of each space)
BasisWord = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class PointedSpace:
    """A space of the given dimension with basis vector 0 marked."""

    dim: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InvalidInputError("space dimension must be at least 1")


@dataclass(frozen=True)
class LocalOperator:
    """A rational matrix acting on the space of one family.

    Column j is the image of basis vector j; entry [0][0] is the expectation
    against the marked vector.
    """

    family: int
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.matrix)
        if n == 0 or any(len(row) != n for row in self.matrix):
            raise InvalidInputError("operator matrix must be square")

    @classmethod
    def from_rows(
        cls, family: int, rows: Iterable[Iterable[RationalLike]]
    ) -> "LocalOperator":
        return cls(family, tuple(tuple(as_fraction(x) for x in row) for row in rows))

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def expectation(self) -> Fraction:
        return self.matrix[0][0]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self.matrix)

    def __matmul__(self, other: "LocalOperator") -> "LocalOperator":
        if self.family != other.family or self.dim != other.dim:
            raise InvalidInputError("operator product needs matching families")
        n = self.dim
        rows = tuple(
            tuple(
                sum((self.matrix[i][k] * other.matrix[k][j] for k in range(n)), Fraction(0))
                for j in range(n)
            )
            for i in range(n)
        )
        return LocalOperator(self.family, rows)


@dataclass(frozen=True)
class ProductVector:
    """A rational linear combination of vacuum and decreasing tensor words."""

    components: Mapping[BasisWord, Fraction]
    max_len: int

    def __post_init__(self) -> None:
        for word in self.components:
            if len(word) > self.max_len:
                raise ResourceLimitError(
                    f"word of length {len(word)} exceeds the budget {self.max_len}"
                )
            labels = [k for k, _ in word]
            if labels != sorted(labels, reverse=True) or len(set(labels)) != len(labels):
                raise InvalidInputError("word labels must strictly decrease")
            if any(idx < 1 for _, idx in word):
                raise InvalidInputError("word factors must avoid the marked vector")

    def vacuum_coefficient(self) -> Fraction:
        return self.components.get((), Fraction(0))


def vacuum(max_len: int) -> ProductVector:
    return ProductVector({(): Fraction(1)}, max_len)


def _validate_operator(
    spaces: Sequence[PointedSpace], op: LocalOperator
) -> None:
    if not (1 <= op.family <= len(spaces)):
        raise InvalidInputError(f"family {op.family} outside 1..{len(spaces)}")
    if op.dim != spaces[op.family - 1].dim:
        raise InvalidInputError(
            f"operator dimension {op.dim} does not match space "
            f"{spaces[op.family - 1].dim}"
        )


def lambda_action(
    spaces: Sequence[PointedSpace], op: LocalOperator, vec: ProductVector
) -> ProductVector:
    """Left action: annihilate below the head label, act on the head at equal
    labels, scalar-split and prepend above."""
    _validate_operator(spaces, op)
    k = op.family
    out: dict[BasisWord, Fraction] = {}

    def add(word: BasisWord, value: Fraction) -> None:
        if value:
            if len(word) > vec.max_len:
                raise ResourceLimitError(
                    f"action would exceed the word-length budget {vec.max_len}"
                )
            out[word] = out.get(word, Fraction(0)) + value

    for word, coeff in vec.components.items():
        if coeff == 0:
            continue
        if not word:
            col = op.column(0)
            add((), coeff * col[0])
            for idx in range(1, op.dim):
                add(((k, idx),), coeff * col[idx])
            continue
        head_family, head_idx = word[0]
        if k < head_family:
            continue
        if k == head_family:
            col = op.column(head_idx)
            add(word[1:], coeff * col[0])
            for idx in range(1, op.dim):
                add(((k, idx),) + word[1:], coeff * col[idx])
        else:
            col = op.column(0)
            add(word, coeff * col[0])
            for idx in range(1, op.dim):
                add(((k, idx),) + word, coeff * col[idx])
    return ProductVector({w: c for w, c in out.items() if c != 0}, vec.max_len)


def rho_action(
    spaces: Sequence[PointedSpace], op: LocalOperator, vec: ProductVector
) -> ProductVector:
    """Right action: the mirror of the left action at the tail of a word."""
    _validate_operator(spaces, op)
    k = op.family
    out: dict[BasisWord, Fraction] = {}

    def add(word: BasisWord, value: Fraction) -> None:
        if value:
            if len(word) > vec.max_len:
                raise ResourceLimitError(
                    f"action would exceed the word-length budget {vec.max_len}"
                )
            out[word] = out.get(word, Fraction(0)) + value

    for word, coeff in vec.components.items():
        if coeff == 0:
            continue
        if not word:
            col = op.column(0)
            add((), coeff * col[0])
            for idx in range(1, op.dim):
                add(((k, idx),), coeff * col[idx])
            continue
        tail_family, tail_idx = word[-1]
        if k > tail_family:
            continue
        if k == tail_family:
            col = op.column(tail_idx)
            add(word[:-1], coeff * col[0])
            for idx in range(1, op.dim):
                add(word[:-1] + ((k, idx),), coeff * col[idx])
        else:
            col = op.column(0)
            add(word, coeff * col[0])
            for idx in range(1, op.dim):
                add(word + ((k, idx),), coeff * col[idx])
    return ProductVector({w: c for w, c in out.items() if c != 0}, vec.max_len)


def type2_moment(
    spaces: Sequence[PointedSpace],
    word: Sequence[tuple[int, str, LocalOperator]],
) -> Fraction:
    """Vacuum expectation of a word of represented operators.

    Each letter is (family, side, operator) with side "L" or "R"; the product
    acts right to left on the vacuum and the result is the vacuum coefficient.
    A budget equal to the word length suffices for exactness because nothing
    longer can contract back to the vacuum in the remaining steps.
    """
    vec = vacuum(len(word))
    for family, side, op in reversed(list(word)):
        if op.family != family:
            raise InvalidInputError("letter family does not match its operator")
        side = side.upper()
        if side == "L":
            vec = lambda_action(spaces, op, vec)
        elif side == "R":
            vec = rho_action(spaces, op, vec)
        else:
            raise InvalidInputError(f"side must be L or R, got {side!r}")
    return vec.vacuum_coefficient()

"""Moment functionals for a single two-faced pair, all values exact rationals.

Three containers: a general word-moment functional (one value per L/R word),
the commuting-pair grid specialization M[m][n], and atomic planar measures
used as limit-theorem inputs.  No floating point anywhere; determinant-level
fixtures must come out exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InvalidInputError, ResourceLimitError
from .partitions import restrict_chi, validate_chi

RationalLike = Fraction | int | str


def as_fraction(x: RationalLike) -> Fraction:
    """Coerce ints, "p/q" strings and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InvalidInputError(f"not a rational value: {x!r}")
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise InvalidInputError(f"not a rational value: {x!r}")


def all_words(max_len: int) -> list[str]:
    """Every L/R word of length 0..max_len, sorted by (length, lexicographic)."""
    out = [""]
    layer = [""]
    for _ in range(max_len):
        layer = [w + c for w in layer for c in ("L", "R")]
        out.extend(sorted(layer))
    return out


@dataclass(frozen=True)
class AtomicPlanarMeasure:
    """Finitely many weighted atoms on the rational plane.

    Weights are nonzero but otherwise unconstrained; total mass need not be 1
    (the compound-Poisson fixture has mass 45).
    """

    atoms: tuple[tuple[Fraction, Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        seen = set()
        for s, t, w in self.atoms:
            if w == 0:
                raise InvalidInputError(f"atom ({s},{t}) has zero weight")
            if (s, t) in seen:
                raise InvalidInputError(f"duplicate atom at ({s},{t})")
            seen.add((s, t))

    @classmethod
    def from_atoms(
        cls, atoms: Iterable[tuple[RationalLike, RationalLike, RationalLike]]
    ) -> "AtomicPlanarMeasure":
        return cls(
            tuple(
                (as_fraction(s), as_fraction(t), as_fraction(w)) for s, t, w in atoms
            )
        )

    @classmethod
    def point(cls, s: RationalLike, t: RationalLike) -> "AtomicPlanarMeasure":
        return cls.from_atoms([(s, t, 1)])

    @property
    def total_mass(self) -> Fraction:
        return sum((w for _, _, w in self.atoms), Fraction(0))

    def moment(self, m: int, n: int) -> Fraction:
        return sum((w * s**m * t**n for s, t, w in self.atoms), Fraction(0))


@dataclass(frozen=True)
class GridDistribution:
    """Moment table M[m][n] of a commuting pair, 0 <= m, n <= order.

    M[0][0] is 1 for (normalized) distributions; raw measure grids may carry
    any total mass, so normalization is checked by the operations that
    actually require it.
    """

    m: tuple[tuple[Fraction, ...], ...]
    order: int = field(init=False)

    def __post_init__(self) -> None:
        rows = len(self.m)
        if rows == 0 or any(len(row) != rows for row in self.m):
            raise InvalidInputError("grid must be square and nonempty")
        object.__setattr__(self, "order", rows - 1)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[RationalLike]]) -> "GridDistribution":
        return cls(tuple(tuple(as_fraction(x) for x in row) for row in rows))

    def moment(self, m_count: int, n_count: int) -> Fraction:
        if not (0 <= m_count <= self.order and 0 <= n_count <= self.order):
            raise ResourceLimitError(
                f"grid of order {self.order} has no entry ({m_count},{n_count})"
            )
        return self.m[m_count][n_count]

    @property
    def is_normalized(self) -> bool:
        return self.m[0][0] == 1


@dataclass(frozen=True)
class WordDistribution:
    """Moment functional on L/R words up to a fixed length.

    The empty word maps to 1 and every word up to max_len is present, so
    lookups never fall through to a default.
    """

    moments: Mapping[str, Fraction]
    max_len: int

    def __post_init__(self) -> None:
        expected = all_words(self.max_len)
        missing = [w for w in expected if w not in self.moments]
        if missing:
            raise InvalidInputError(f"missing moments for words: {missing[:4]}...")
        if self.moments[""] != 1:
            raise InvalidInputError("the empty word must have moment 1")

    @classmethod
    def from_moments(
        cls, moments: Mapping[str, RationalLike], max_len: int | None = None
    ) -> "WordDistribution":
        table = {validate_chi(w) if w else "": as_fraction(v) for w, v in moments.items()}
        table.setdefault("", Fraction(1))
        if max_len is None:
            max_len = max((len(w) for w in table), default=0)
        return cls(table, max_len)

    def moment(self, word: str) -> Fraction:
        if len(word) > self.max_len:
            raise ResourceLimitError(
                f"word {word!r} longer than max_len {self.max_len}"
            )
        return self.moments[word]


def grid_from_measure(mu: AtomicPlanarMeasure, order: int) -> GridDistribution:
    """Moment grid of an atomic measure: M[m][n] = sum of weight * s^m t^n."""
    if order < 0:
        raise InvalidInputError("order must be nonnegative")
    rows = tuple(
        tuple(mu.moment(m, n) for n in range(order + 1)) for m in range(order + 1)
    )
    return GridDistribution(rows)


def word_from_grid(g: GridDistribution) -> WordDistribution:
    """Word functional of a commuting pair: a word maps to M[#L][#R]."""
    if not g.is_normalized:
        raise InvalidInputError("word functional needs a normalized grid (M[0][0] = 1)")
    table = {w: g.moment(w.count("L"), w.count("R")) for w in all_words(g.order)}
    return WordDistribution(table, g.order)


def moment_of(d: WordDistribution, chi: str, positions: Iterable[int]) -> Fraction:
    """Moment of the sub-word of `chi` at `positions`, read in natural order."""
    word = validate_chi(chi)
    n = len(word)
    pos = sorted(set(positions))
    if pos and not (1 <= pos[0] and pos[-1] <= n):
        raise InvalidInputError(f"positions {pos} outside 1..{n}")
    if len(pos) > d.max_len:
        raise ResourceLimitError(
            f"sub-word of length {len(pos)} exceeds max_len {d.max_len}"
        )
    return d.moment(restrict_chi(word, pos))

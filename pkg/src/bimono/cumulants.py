"""The bi-monotonic moment/cumulant engine.

Moments expand over bi-monotonic ordered partitions; grouping by the
underlying bi-non-crossing partition turns the 1/m! ordering weight into the
reciprocal hook product of the nesting forest, which is how the forward map
is evaluated.  The inverse solves the same identity bottom-up by word length.
The time-parameter moments come from the interval recursion and are exact
polynomials with zero constant term.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import prod
from typing import Iterable, Mapping, Sequence

from .convolution import convolve
from .distributions import RationalLike, WordDistribution, as_fraction
from .errors import (
    IncompleteTableError,
    InvalidInputError,
    ResourceLimitError,
    SingularSeriesError,
)
from .partitions import (
    chi_intervals,
    enumerate_bnc,
    nesting_parents,
    restrict_chi,
    subtree_sizes,
    validate_chi,
)


class TimePolynomial:
    """Polynomial in the time parameter t over exact rationals.

    Mixes freely with ints and Fractions in arithmetic so series code can
    stay agnostic about its coefficient ring.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike] = ()) -> None:
        vals = [as_fraction(c) for c in coeffs]
        while vals and vals[-1] == 0:
            vals.pop()
        object.__setattr__(self, "coeffs", tuple(vals))

    @classmethod
    def constant(cls, c: RationalLike) -> "TimePolynomial":
        return cls((c,))

    @classmethod
    def t(cls) -> "TimePolynomial":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    @staticmethod
    def _coerce(other) -> "TimePolynomial | None":
        if isinstance(other, TimePolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return TimePolynomial((other,))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return TimePolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return TimePolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.coeffs or not o.coeffs:
            return TimePolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    out[i + j] += a * b
        return TimePolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"TimePolynomial({list(self.coeffs)!r})"

    def __call__(self, t: RationalLike) -> Fraction:
        tv = as_fraction(t)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * tv + c
        return acc

    def integrate(self) -> "TimePolynomial":
        """Antiderivative vanishing at t = 0, term by term."""
        return TimePolynomial(
            (0, *(c / (k + 1) for k, c in enumerate(self.coeffs)))
        )

    def inverse(self) -> "TimePolynomial":
        if self.degree != 0:
            raise SingularSeriesError(
                "only nonzero constants are invertible in the polynomial ring"
            )
        return TimePolynomial((Fraction(1) / self.coeffs[0],))


@dataclass(frozen=True)
class CumulantTable:
    """Cumulant values keyed by chi pattern strings such as "LRL".

    A grid table only carries the sorted patterns L^m R^n; that is closed
    under sub-words of grid words, which is all the commuting-pair pipelines
    ever look up.
    """

    entries: Mapping[str, Fraction]

    def value(self, pattern: str) -> Fraction:
        try:
            return self.entries[pattern]
        except KeyError:
            raise IncompleteTableError(
                f"cumulant table has no entry for pattern {pattern!r}"
            ) from None

    @classmethod
    def from_entries(cls, entries: Mapping[str, RationalLike]) -> "CumulantTable":
        table = {}
        for pattern, v in entries.items():
            table[validate_chi(pattern)] = as_fraction(v)
        return cls(table)

    @classmethod
    def from_grid(cls, rows: Sequence[Sequence[RationalLike]]) -> "CumulantTable":
        """Build the grid view: rows[m][n] becomes the value at L^m R^n."""
        table = {}
        for m, row in enumerate(rows):
            for n, v in enumerate(row):
                if m + n >= 1:
                    table["L" * m + "R" * n] = as_fraction(v)
        return cls(table)

    def grid(self, order: int) -> tuple[tuple[Fraction, ...], ...]:
        """K[m][n] for 0 <= m, n <= order, with K[0][0] = 0 by convention."""
        return tuple(
            tuple(
                Fraction(0) if m == n == 0 else self.value("L" * m + "R" * n)
                for n in range(order + 1)
            )
            for m in range(order + 1)
        )


@lru_cache(maxsize=None)
def bm_terms(chi: str) -> tuple[tuple[Fraction, tuple[str, ...]], ...]:
    """The bi-monotonic partition sum for `chi`, grouped and weighted.

    Each bi-non-crossing partition contributes its block sub-patterns with
    weight 1 over the product of nesting-subtree sizes (the count of
    admissible block orders divided by m!).  Terms with identical pattern
    multisets are merged.
    """
    word = validate_chi(chi)
    grouped: dict[tuple[str, ...], Fraction] = {}
    for blocks in enumerate_bnc(word):
        parents = nesting_parents(word, blocks)
        weight = Fraction(1, prod(subtree_sizes(parents)))
        patterns = tuple(sorted(restrict_chi(word, blk) for blk in blocks))
        grouped[patterns] = grouped.get(patterns, Fraction(0)) + weight
    return tuple(sorted(grouped.items(), key=lambda kv: kv[0]))


def moment_from_cumulants(table: CumulantTable, chi: str) -> Fraction:
    """Moment as the weighted bi-monotonic partition sum over cumulants."""
    word = validate_chi(chi)
    total = Fraction(0)
    for patterns, weight in bm_terms(word):
        total += weight * prod(table.value(p) for p in patterns)
    return total


def _k(d: WordDistribution, pattern: str, memo: dict[str, Fraction]) -> Fraction:
    got = memo.get(pattern)
    if got is not None:
        return got
    value = d.moment(pattern)
    if len(pattern) > 1:
        for patterns, weight in bm_terms(pattern):
            if len(patterns) > 1:
                value -= weight * prod(_k(d, p, memo) for p in patterns)
    memo[pattern] = value
    return value


def cumulant_from_moments(d: WordDistribution, chi: str) -> Fraction:
    """Single cumulant, solving the partition sum bottom-up by word length."""
    word = validate_chi(chi)
    if len(word) > d.max_len:
        raise ResourceLimitError(
            f"pattern {word!r} longer than the distribution's max_len {d.max_len}"
        )
    return _k(d, word, {})


def cumulant_table_from_moments(
    d: WordDistribution, max_len: int | None = None
) -> CumulantTable:
    """All cumulants of a word distribution up to max_len (default: all of it)."""
    length = d.max_len if max_len is None else max_len
    memo: dict[str, Fraction] = {}
    patterns = [""]
    entries: dict[str, Fraction] = {}
    for _ in range(length):
        patterns = [p + c for p in patterns for c in ("L", "R")]
        for pattern in patterns:
            entries[pattern] = _k(d, pattern, memo)
    return CumulantTable(entries)


def grid_cumulant_table(d: WordDistribution, order: int) -> CumulantTable:
    """Cumulants of the sorted grid patterns L^m R^n only, m + n <= order."""
    memo: dict[str, Fraction] = {}
    entries: dict[str, Fraction] = {}
    for m in range(order + 1):
        for n in range(order + 1 - m):
            if m + n >= 1:
                pattern = "L" * m + "R" * n
                entries[pattern] = _k(d, pattern, memo)
    return CumulantTable(entries)


def phi_t(
    table: CumulantTable,
    chi: str,
    memo: dict[str, TimePolynomial] | None = None,
) -> TimePolynomial:
    """Time-parameter moment from the interval recursion.

    The unique polynomial vanishing at t = 0 whose derivative sums, over all
    chi-intervals V, the time moment of the complement times the cumulant of
    V.  The linear coefficient is the cumulant of the full word and the value
    at t = 1 is the plain moment.  A caller evaluating many patterns against
    one table may pass a shared memo dict.
    """
    word = validate_chi(chi)
    if memo is None:
        memo = {}
    memo.setdefault("", TimePolynomial.constant(1))

    def phi(pattern: str) -> TimePolynomial:
        got = memo.get(pattern)
        if got is not None:
            return got
        n = len(pattern)
        rhs = TimePolynomial()
        for interval in chi_intervals(pattern):
            rest = [j for j in range(1, n + 1) if j not in set(interval)]
            rhs = rhs + phi(restrict_chi(pattern, rest)) * table.value(
                restrict_chi(pattern, interval)
            )
        result = rhs.integrate()
        memo[pattern] = result
        return result

    return phi(word)


def dot_moment(d: WordDistribution, chi: str, n_copies: int) -> Fraction:
    """Moment of the sum of n_copies independent copies, by repeated convolution."""
    word = validate_chi(chi)
    if n_copies < 1:
        raise InvalidInputError("the dot operation needs at least one copy")
    acc = d
    for _ in range(n_copies - 1):
        acc = convolve(acc, d)
    return acc.moment(word)

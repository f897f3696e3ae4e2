"""Mixed moments of bi-monotonically independent families and their convolution.

The two-family rule: the lower family's sub-word survives whole, the upper
family factors over the blocks of the run partition along the chi-order.
Sums of independent pairs expand over position subsets, the complement carved
into chi-interval gaps.  Everything stays at the moment level; the transform
side lives in the series module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .distributions import GridDistribution, WordDistribution, all_words
from .errors import InvalidInputError, ResourceLimitError
from .partitions import chi_order, pi_chi_omega, restrict_chi, validate_chi


@dataclass(frozen=True)
class OrderedFamily:
    """Distributions of a linearly ordered family of two-faced pairs."""

    members: tuple[WordDistribution, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise InvalidInputError("family must be nonempty")


def two_family_moment(
    d1: WordDistribution,
    d2: WordDistribution,
    chi: str,
    omega: Sequence[int],
) -> Fraction:
    """Mixed moment of two bi-monotonically independent pairs (d1 first, d2 second).

    With W the omega=1 positions, the value is d1's moment of the sub-word at
    W times the product of d2's moments over the omega=2 blocks of the run
    partition along the chi-order.
    """
    word = validate_chi(chi)
    if len(omega) != len(word):
        raise InvalidInputError("omega length must match chi length")
    if any(x not in (1, 2) for x in omega):
        raise InvalidInputError("two-family omega labels must lie in {1, 2}")
    w_positions = [j for j in range(1, len(word) + 1) if omega[j - 1] == 1]
    value = d1.moment(restrict_chi(word, w_positions))
    for block in pi_chi_omega(word, omega):
        if omega[block[0] - 1] == 2:
            value *= d2.moment(restrict_chi(word, block))
    return value


def multi_family_moment(
    family: OrderedFamily | Sequence[WordDistribution],
    chi: str,
    omega: Sequence[int],
) -> Fraction:
    """Mixed moment of a linearly ordered family, peeling the top label.

    The family with the largest omega label plays the upper role against all
    lower families merged; associativity makes the fold order irrelevant.
    Only the relative order of the omega labels matters.
    """
    members = family.members if isinstance(family, OrderedFamily) else tuple(family)
    if not members:
        raise InvalidInputError("family must be nonempty")
    word = validate_chi(chi) if chi else ""
    if len(omega) != len(word):
        raise InvalidInputError("omega length must match chi length")
    if not omega:
        return Fraction(1)
    if any(not (1 <= x <= len(members)) for x in omega):
        raise InvalidInputError("omega labels must index the family")

    def rec(sub_chi: str, sub_omega: tuple[int, ...]) -> Fraction:
        if not sub_omega:
            return Fraction(1)
        top = max(sub_omega)
        if min(sub_omega) == top:
            return members[top - 1].moment(sub_chi)
        merged = tuple(1 if x < top else 2 for x in sub_omega)
        value = Fraction(1)
        for block in pi_chi_omega(sub_chi, merged):
            if merged[block[0] - 1] == 2:
                value *= members[top - 1].moment(restrict_chi(sub_chi, block))
        rest = [j for j in range(1, len(sub_chi) + 1) if sub_omega[j - 1] != top]
        return value * rec(
            restrict_chi(sub_chi, rest), tuple(sub_omega[j - 1] for j in rest)
        )

    return rec(word, tuple(omega))


def _mask_patterns(chi: str) -> list[str]:
    """Natural-order sub-word pattern for every position bitmask of `chi`."""
    n = len(chi)
    pats = [""] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        pats[mask] = chi[low.bit_length() - 1] + pats[mask ^ low]
    return pats


def _convolve_word(
    m1: dict[str, Fraction], m2: dict[str, Fraction], chi: str
) -> Fraction:
    n = len(chi)
    if n == 0:
        return Fraction(1)
    pats = _mask_patterns(chi)
    bits = tuple(1 << (p - 1) for p in chi_order(chi))
    total = Fraction(0)
    for mask in range(1 << n):
        value = m1[pats[mask]]
        if value:
            gap = 0
            for bit in bits:
                if mask & bit:
                    if gap:
                        value *= m2[pats[gap]]
                        gap = 0
                else:
                    gap |= bit
            if gap:
                value *= m2[pats[gap]]
            total += value
    return total


def convolve_moment(d1: WordDistribution, d2: WordDistribution, word: str) -> Fraction:
    """Moment of the sum pair (d1 first, d2 second) on one word.

    Expands over all position subsets V: d1's moment of the sub-word at V
    times d2's moments over the chi-interval gaps of V.
    """
    chi = validate_chi(word) if word else ""
    if len(chi) > min(d1.max_len, d2.max_len):
        raise ResourceLimitError(f"word {word!r} exceeds the distributions' length")
    return _convolve_word(dict(d1.moments), dict(d2.moments), chi)


def convolve(d1: WordDistribution, d2: WordDistribution) -> WordDistribution:
    """Bi-monotonic convolution at the moment level (d1 first, d2 second)."""
    if d1.max_len != d2.max_len:
        raise InvalidInputError("convolution needs equal max_len")
    m1 = dict(d1.moments)
    m2 = dict(d2.moments)
    table = {w: _convolve_word(m1, m2, w) for w in all_words(d1.max_len)}
    return WordDistribution(table, d1.max_len)


def _left_line_sums(g2: GridDistribution, m: int) -> dict[tuple[int, int], Fraction]:
    """DP over the left run: (picked count, trailing open gap) -> weight sum.

    Closed gaps lie inside the left run and contribute pure-left moments of
    the second grid; the trailing gap stays open to merge across the corner.
    """
    states = {(0, 0): Fraction(1)}
    for _ in range(m):
        nxt: dict[tuple[int, int], Fraction] = {}
        for (p, gap), val in states.items():
            key = (p, gap + 1)
            nxt[key] = nxt.get(key, Fraction(0)) + val
            key = (p + 1, 0)
            closed = val * g2.moment(gap, 0)
            nxt[key] = nxt.get(key, Fraction(0)) + closed
        states = nxt
    return states


def _right_line_sums(g2: GridDistribution, n: int) -> dict[tuple[int, int], Fraction]:
    """DP over the right run: (picked count, leading open gap) -> weight sum.

    The leading gap merges with the left trailing gap; gaps after the first
    pick close inside the right run, including the final one.
    """
    # (picked?, count, leading gap, current gap) -> weight
    states = {(False, 0, 0, 0): Fraction(1)}
    for _ in range(n):
        nxt: dict[tuple[bool, int, int, int], Fraction] = {}
        for (picked, p, lead, cur), val in states.items():
            if picked:
                key = (True, p, lead, cur + 1)
                nxt[key] = nxt.get(key, Fraction(0)) + val
                key = (True, p + 1, lead, 0)
                nxt[key] = nxt.get(key, Fraction(0)) + val * g2.moment(0, cur)
            else:
                key = (False, 0, lead + 1, 0)
                nxt[key] = nxt.get(key, Fraction(0)) + val
                key = (True, 1, lead, 0)
                nxt[key] = nxt.get(key, Fraction(0)) + val
        states = nxt
    out: dict[tuple[int, int], Fraction] = {}
    for (picked, p, lead, cur), val in states.items():
        if picked:
            val *= g2.moment(0, cur)
        key = (p, lead)
        out[key] = out.get(key, Fraction(0)) + val
    return out


def grid_convolve(g1: GridDistribution, g2: GridDistribution) -> GridDistribution:
    """Bi-monotonic convolution of commuting-pair grids.

    Same subset expansion as `convolve` specialized to the words L^m R^n,
    resummed as two line DPs joined across the corner gap; only moment counts
    enter because the inputs commute.
    """
    if g1.order != g2.order:
        raise InvalidInputError("grid convolution needs equal orders")
    if not (g1.is_normalized and g2.is_normalized):
        raise InvalidInputError("grid convolution needs normalized grids")
    order = g1.order
    rows = []
    for m in range(order + 1):
        left = _left_line_sums(g2, m)
        row = []
        for n in range(order + 1):
            right = _right_line_sums(g2, n)
            total = Fraction(0)
            for (p, g_left), lv in left.items():
                for (q, g_right), rv in right.items():
                    total += lv * rv * g2.moment(g_left, g_right) * g1.moment(p, q)
            row.append(total)
        rows.append(tuple(row))
    return GridDistribution(tuple(rows))

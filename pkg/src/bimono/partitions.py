"""Combinatorics indexed by a left/right word chi.

A chi word assigns the tag L or R to each position 1..n of a product and
induces the total order: left positions ascending, then right positions
descending.  Everything here (intervals, run partitions, bi-non-crossing
partitions, bi-monotonic ordered partitions) reduces to contiguity and
crossing tests in that one explicit order, so positions are kept 1-based
throughout to match the usual combinatorial conventions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import factorial, prod
from typing import Iterable, Iterator, Sequence

from .errors import InvalidInputError, ResourceLimitError

SIDES = ("L", "R")

#: Largest word length accepted by the enumeration routines by default.
#: Catalan growth makes bigger values useless for exact cross-checks.
DEFAULT_ENUMERATION_BOUND = 12

Block = tuple[int, ...]
Blocks = tuple[Block, ...]


def validate_chi(chi: str) -> str:
    """Normalize a chi word to upper case and check it is over {L, R}."""
    if not chi:
        raise InvalidInputError("chi word must be nonempty")
    word = chi.upper()
    for c in word:
        if c not in SIDES:
            raise InvalidInputError(f"chi word may contain only L and R, got {chi!r}")
    return word


def restrict_chi(chi: str, positions: Iterable[int]) -> str:
    """Sub-word of `chi` at the given 1-based positions, read in natural order."""
    return "".join(chi[v - 1] for v in sorted(positions))


def chi_order(chi: str) -> tuple[int, ...]:
    """Positions 1..n listed in increasing chi-order.

    Left-tagged positions come first in ascending index order, then the
    right-tagged positions in descending index order.
    """
    word = validate_chi(chi)
    lefts = [i for i, c in enumerate(word, 1) if c == "L"]
    rights = [i for i, c in enumerate(word, 1) if c == "R"]
    return tuple(lefts + rights[::-1])


def chi_ranks(chi: str) -> dict[int, int]:
    """Map position -> 0-based rank in the chi-order."""
    return {p: i for i, p in enumerate(chi_order(chi))}


def chi_intervals(chi: str) -> list[Block]:
    """All nonempty chi-intervals, i.e. contiguous runs of the chi-order.

    There are n(n+1)/2 of them.  Each is returned as an ascending tuple of
    positions; the list is ordered by (start rank, length).
    """
    order = chi_order(chi)
    n = len(order)
    out = []
    for start in range(n):
        for stop in range(start + 1, n + 1):
            out.append(tuple(sorted(order[start:stop])))
    return out


def pi_chi_omega(chi: str, omega: Sequence[int]) -> list[Block]:
    """Ordered blocks of the run partition of `omega` along the chi-order.

    Blocks are the maximal chi-order runs on which omega is constant; they
    come back in chi-order, each as an ascending tuple of positions.
    """
    word = validate_chi(chi)
    if len(omega) != len(word):
        raise InvalidInputError(
            f"omega length {len(omega)} does not match chi length {len(word)}"
        )
    blocks: list[Block] = []
    run: list[int] = []
    current = None
    for p in chi_order(word):
        label = omega[p - 1]
        if run and label != current:
            blocks.append(tuple(sorted(run)))
            run = []
        run.append(p)
        current = label
    blocks.append(tuple(sorted(run)))
    return blocks


def complement_intervals(chi: str, positions: Iterable[int]) -> list[Block]:
    """The chi-interval gaps carved out of 1..n by `positions`.

    Walking the chi-order, the complement of `positions` splits into maximal
    runs (prefix, between consecutive elements, suffix).  Empty gaps are
    omitted; the paper-level product over gaps treats them as the constant 1.
    """
    word = validate_chi(chi)
    n = len(word)
    vset = set(positions)
    for v in vset:
        if not (isinstance(v, int) and 1 <= v <= n):
            raise InvalidInputError(f"position {v!r} outside 1..{n}")
    gaps: list[Block] = []
    run: list[int] = []
    for p in chi_order(word):
        if p in vset:
            if run:
                gaps.append(tuple(sorted(run)))
                run = []
        else:
            run.append(p)
    if run:
        gaps.append(tuple(sorted(run)))
    return gaps


def is_interior(chi: str, inner: Iterable[int], outer: Iterable[int]) -> bool:
    """Whether some element of `inner` sits strictly between two elements of `outer`.

    For blocks of a bi-non-crossing partition "some" is equivalent to "all";
    the existential form is taken as the definition.
    """
    v = set(inner)
    w = set(outer)
    if not v or not w:
        raise InvalidInputError("interior test requires nonempty sets")
    if v & w:
        raise InvalidInputError("interior test requires disjoint sets")
    ranks = chi_ranks(chi)
    lo = min(ranks[x] for x in w)
    hi = max(ranks[x] for x in w)
    return any(lo < ranks[x] < hi for x in v)


# ---------------------------------------------------------------------------
# bi-non-crossing partitions


@lru_cache(maxsize=None)
def _nc_line(n: int) -> tuple[Blocks, ...]:
    """Non-crossing partitions of the line 0..n-1, canonically sorted.

    Recursion: the block of element 0 is chosen as an increasing sequence;
    the stretches between consecutive chosen elements are independent
    sub-lines, so the total work is proportional to the Catalan-sized output.
    """
    if n == 0:
        return ((),)
    result: list[Blocks] = []
    for extra, gaps in _first_block_choices(1, n):
        block0 = (0,) + extra
        gap_parts = [
            tuple(
                tuple(tuple(x + lo for x in blk) for blk in part)
                for part in _nc_line(hi - lo)
            )
            for lo, hi in gaps
            if hi > lo
        ]
        for combo in itertools.product(*gap_parts):
            blocks = [block0]
            for part in combo:
                blocks.extend(part)
            result.append(tuple(sorted(blocks)))
    result.sort()
    return tuple(result)


def _first_block_choices(
    start: int, n: int
) -> Iterator[tuple[Block, tuple[tuple[int, int], ...]]]:
    """Yield (chosen elements >= start, complement stretches as half-open ranges)."""
    yield (), ((start, n),)
    for nxt in range(start, n):
        for elems, gaps in _first_block_choices(nxt + 1, n):
            yield (nxt, *elems), ((start, nxt), *gaps)


def _check_bound(n: int, bound: int) -> None:
    if n > bound:
        raise ResourceLimitError(
            f"word length {n} exceeds the enumeration bound {bound}"
        )


def enumerate_bnc(chi: str, bound: int = DEFAULT_ENUMERATION_BOUND) -> list[Blocks]:
    """All partitions of 1..n that are non-crossing with respect to the chi-order.

    Obtained by relabelling the classical non-crossing partitions of the
    chi-order line; the count is the n-th Catalan number for every chi.
    Blocks are ascending tuples, partitions sorted canonically.
    """
    word = validate_chi(chi)
    n = len(word)
    _check_bound(n, bound)
    order = chi_order(word)
    out = []
    for part in _nc_line(n):
        blocks = tuple(
            sorted(tuple(sorted(order[i] for i in blk)) for blk in part)
        )
        out.append(blocks)
    out.sort()
    return out


def nesting_parents(chi: str, blocks: Blocks) -> tuple[int, ...]:
    """Parent index per block in the nesting forest of a bi-non-crossing partition.

    Block V is a child of the innermost block W with V interior to W; roots
    get -1.  Spans are laminar for a bi-non-crossing partition, so the
    innermost strictly-containing span is well defined.
    """
    ranks = chi_ranks(chi)
    spans = [
        (min(ranks[x] for x in blk), max(ranks[x] for x in blk)) for blk in blocks
    ]
    parents = []
    for i, (lo, hi) in enumerate(spans):
        best = -1
        best_width = None
        for j, (jlo, jhi) in enumerate(spans):
            if i == j:
                continue
            if jlo < lo and hi < jhi:
                width = jhi - jlo
                if best_width is None or width < best_width:
                    best, best_width = j, width
        parents.append(best)
    return tuple(parents)


def subtree_sizes(parents: Sequence[int]) -> tuple[int, ...]:
    """Size of the subtree rooted at each node of a parent-array forest."""
    m = len(parents)
    sizes = [1] * m
    # children have strictly smaller spans, but parent indices are arbitrary,
    # so accumulate along parent chains per node
    order = sorted(range(m), key=lambda i: _depth(parents, i), reverse=True)
    for i in order:
        if parents[i] >= 0:
            sizes[parents[i]] += sizes[i]
    return tuple(sizes)


def _depth(parents: Sequence[int], i: int) -> int:
    d = 0
    while parents[i] >= 0:
        i = parents[i]
        d += 1
    return d


def extension_count(parents: Sequence[int]) -> int:
    """Number of linear orders of a forest placing every node after its parent.

    Hook-length product formula: m! divided by the product of subtree sizes.
    """
    m = len(parents)
    return factorial(m) // prod(subtree_sizes(parents))


def linear_extensions(parents: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Yield every order of 0..m-1 in which each node follows its parent."""
    m = len(parents)
    children: list[list[int]] = [[] for _ in range(m)]
    roots = []
    for i, p in enumerate(parents):
        if p < 0:
            roots.append(i)
        else:
            children[p].append(i)

    def backtrack(avail: list[int], acc: list[int]) -> Iterator[tuple[int, ...]]:
        if not avail:
            yield tuple(acc)
            return
        for k, node in enumerate(avail):
            nxt = avail[:k] + avail[k + 1 :] + children[node]
            acc.append(node)
            yield from backtrack(nxt, acc)
            acc.pop()

    yield from backtrack(sorted(roots), [])


@dataclass(frozen=True)
class OrderedPartition:
    """A set partition with a linear ordering (rank 1..m) of its blocks."""

    blocks: Blocks
    rank: tuple[int, ...]

    def __post_init__(self) -> None:
        m = len(self.blocks)
        if sorted(self.rank) != list(range(1, m + 1)):
            raise InvalidInputError("rank must be a bijection onto 1..m")

    def blocks_in_rank_order(self) -> Blocks:
        pairs = sorted(zip(self.rank, self.blocks))
        return tuple(blk for _, blk in pairs)


def enumerate_bm(
    chi: str, bound: int = DEFAULT_ENUMERATION_BOUND
) -> list[OrderedPartition]:
    """All bi-monotonic ordered partitions for `chi`.

    These are the bi-non-crossing partitions equipped with a block order in
    which every interior (nested) block ranks strictly above the block it
    nests in; per partition the admissible orders are exactly the linear
    extensions of the nesting forest.
    """
    word = validate_chi(chi)
    _check_bound(len(word), bound)
    out = []
    for blocks in enumerate_bnc(word, bound):
        parents = nesting_parents(word, blocks)
        for ext in linear_extensions(parents):
            rank = [0] * len(blocks)
            for pos, node in enumerate(ext, 1):
                rank[node] = pos
            out.append(OrderedPartition(blocks, tuple(rank)))
    return out

"""Shared test fixtures: random exact-rational inputs and brute-force oracles.

The oracles here deliberately avoid the library's own enumeration and
evaluation paths: crossing and nesting are tested pairwise from the raw
order, set partitions come from a textbook recursion, and the monotone
moment-cumulant data is built from scratch on the natural order.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial

from bimono.distributions import (
    AtomicPlanarMeasure,
    GridDistribution,
    WordDistribution,
    all_words,
)
from bimono.cumulants import CumulantTable


def rand_fraction(rng, lo=-4, hi=4, denominators=(1, 2, 3)):
    return Fraction(rng.randint(lo, hi), rng.choice(denominators))


def random_word_distribution(rng, max_len):
    table = {w: rand_fraction(rng) for w in all_words(max_len)}
    table[""] = Fraction(1)
    return WordDistribution(table, max_len)


def random_grid(rng, order):
    rows = [
        [rand_fraction(rng) for _ in range(order + 1)] for _ in range(order + 1)
    ]
    rows[0][0] = Fraction(1)
    return GridDistribution(tuple(tuple(r) for r in rows))


def random_cumulant_table(rng, max_len, denominator=2):
    entries = {}
    layer = [""]
    for _ in range(max_len):
        layer = [p + c for p in layer for c in ("L", "R")]
        for p in layer:
            entries[p] = Fraction(rng.randint(-4, 4), denominator)
    return CumulantTable(entries)


def random_grid_cumulant_table(rng, order, denominator=2):
    """Grid entries for the full rectangle m, n <= order."""
    entries = {}
    for m in range(order + 1):
        for n in range(order + 1):
            if m + n >= 1:
                entries["L" * m + "R" * n] = Fraction(rng.randint(-4, 4), denominator)
    return CumulantTable(entries)


def random_probability_measure(rng, n_atoms):
    points = set()
    while len(points) < n_atoms:
        points.add((rand_fraction(rng, -3, 3, (1, 2)), rand_fraction(rng, -3, 3, (1, 2))))
    weights = [Fraction(rng.randint(1, 5)) for _ in range(n_atoms)]
    total = sum(weights)
    return AtomicPlanarMeasure(
        tuple((s, t, w / total) for (s, t), w in zip(sorted(points), weights))
    )


# ---------------------------------------------------------------------------
# brute-force oracles


def set_partitions(elements):
    """All set partitions of a list, by the usual insert-into-block recursion."""
    elements = list(elements)
    if not elements:
        yield []
        return
    first, rest = elements[0], elements[1:]
    for sub in set_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [[first] + sub[i]] + sub[i + 1 :]
        yield [[first]] + sub


def crosses_in_order(blocks, order):
    """Pairwise crossing test: positions a < b < c < d in `order` rank with
    a, c in one block and b, d in another."""
    rank = {p: i for i, p in enumerate(order)}
    blocks = [sorted(b, key=lambda p: rank[p]) for b in blocks]
    for b1, b2 in itertools.combinations(blocks, 2):
        for a, c in itertools.combinations(b1, 2):
            for b, d in itertools.combinations(b2, 2):
                ra, rc = rank[a], rank[c]
                rb, rd = rank[b], rank[d]
                if ra < rb < rc < rd or rb < ra < rd < rc:
                    return True
    return False


def interior_in_order(inner, outer, order):
    rank = {p: i for i, p in enumerate(order)}
    lo = min(rank[w] for w in outer)
    hi = max(rank[w] for w in outer)
    return any(lo < rank[v] < hi for v in inner)


def ordered_partitions_filtered(n, order):
    """All (partition, rank) pairs where nested blocks rank above their nest,
    built by filtering every ordering of every non-crossing partition."""
    out = []
    for blocks in set_partitions(range(1, n + 1)):
        if crosses_in_order(blocks, order):
            continue
        m = len(blocks)
        for perm in itertools.permutations(range(1, m + 1)):
            ok = True
            for i, j in itertools.permutations(range(m), 2):
                if interior_in_order(blocks[i], blocks[j], order):
                    if not perm[j] < perm[i]:
                        ok = False
                        break
            if ok:
                out.append((blocks, perm))
    return out


def monotone_cumulants_univariate(moments):
    """Univariate monotone cumulants on the natural order, from scratch.

    moments[j] is the j-th moment for j >= 1; returns cumulants indexed the
    same way, inverting the ordered-partition sum order by order.
    """
    n = len(moments)
    natural = list(range(1, n + 1))
    cumulants = {}
    for length in range(1, n + 1):
        total = Fraction(0)
        for blocks, _perm in ordered_partitions_filtered(length, natural[:length]):
            if len(blocks) == 1:
                continue
            term = Fraction(1, factorial(len(blocks)))
            for b in blocks:
                term *= cumulants[len(b)]
            total += term
        cumulants[length] = moments[length - 1] - total
    return [cumulants[j] for j in range(1, n + 1)]

"""Limit-theorem cumulant tables and end-to-end positivity pipelines.

The three limiting families are fixed by their grid cumulants: the central
limit has only the two variances and the covariance; the Poisson family has
the geometric grid lam * alpha^m beta^n; the compound family integrates
monomials against an atomic measure.  Finite-size checks stay in the
rationals: the dot operation is exact at integer sizes and cumulant
homogeneity turns the root-N normalization into an exact statement about
even totals and squares for odd ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .cumulants import CumulantTable, grid_cumulant_table
from .distributions import (
    AtomicPlanarMeasure,
    GridDistribution,
    RationalLike,
    as_fraction,
    grid_from_measure,
    word_from_grid,
)
from .errors import InvalidInputError
from .positivity import det_exact, moment_matrix, psd_check
from .series import evolve_joint, generating_functions, grid_from_cauchy, series_eval_t

KINDS = ("clt", "poisson", "compound")


@dataclass(frozen=True)
class LimitSpec:
    """Parameters of one limiting family.

    kind "clt" uses (alpha, beta, gamma); "poisson" uses (lam, alpha, beta);
    "compound" uses (lam, measure).  `gamma_bounded` records whether the
    covariance obeys gamma^2 <= alpha * beta; nothing is rejected either way.
    """

    kind: str
    alpha: Fraction | None = None
    beta: Fraction | None = None
    gamma: Fraction | None = None
    lam: Fraction | None = None
    measure: AtomicPlanarMeasure | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InvalidInputError(f"kind must be one of {KINDS}")

    @classmethod
    def clt(
        cls, alpha: RationalLike, beta: RationalLike, gamma: RationalLike
    ) -> "LimitSpec":
        a, b, g = as_fraction(alpha), as_fraction(beta), as_fraction(gamma)
        if a <= 0 or b <= 0:
            raise InvalidInputError("central limit variances must be positive")
        return cls("clt", alpha=a, beta=b, gamma=g)

    @classmethod
    def poisson(
        cls, lam: RationalLike, alpha: RationalLike, beta: RationalLike
    ) -> "LimitSpec":
        lv, a, b = as_fraction(lam), as_fraction(alpha), as_fraction(beta)
        if lv <= 0:
            raise InvalidInputError("rate must be positive")
        if a == 0 and b == 0:
            raise InvalidInputError("jump location must be nonzero")
        return cls("poisson", alpha=a, beta=b, lam=lv)

    @classmethod
    def compound(
        cls, lam: RationalLike, measure: AtomicPlanarMeasure
    ) -> "LimitSpec":
        lv = as_fraction(lam)
        if lv <= 0:
            raise InvalidInputError("rate must be positive")
        return cls("compound", lam=lv, measure=measure)

    @property
    def gamma_bounded(self) -> bool | None:
        if self.kind != "clt":
            return None
        return self.gamma * self.gamma <= self.alpha * self.beta


def limit_cumulants(spec: LimitSpec, order: int) -> CumulantTable:
    """Grid cumulant table of the limiting pair, up to the given order."""
    if order < 1:
        raise InvalidInputError("order must be at least 1")
    rows = [[Fraction(0)] * (order + 1) for _ in range(order + 1)]
    if spec.kind == "clt":
        rows[2][0] = spec.alpha
        rows[0][2] = spec.beta
        rows[1][1] = spec.gamma
    elif spec.kind == "poisson":
        for m in range(order + 1):
            for n in range(order + 1):
                if m + n >= 1:
                    rows[m][n] = spec.lam * spec.alpha**m * spec.beta**n
    else:
        for m in range(order + 1):
            for n in range(order + 1):
                if m + n >= 1:
                    rows[m][n] = spec.lam * spec.measure.moment(m, n)
    return CumulantTable.from_grid(rows)


def limit_moment_grid(spec: LimitSpec, order: int) -> GridDistribution:
    """Moment grid of the limiting pair: evolve the flow to time one."""
    table = limit_cumulants(spec, order)
    gf = generating_functions(table, order)
    g_poly = evolve_joint(gf.atilde, gf.a1, gf.a2, order + 1)
    return grid_from_cauchy(series_eval_t(g_poly, 1), order)


def limit_pipeline(spec: LimitSpec, order: int, matrix_degree: int = 1) -> dict[str, Any]:
    """Cumulants to moments to moment matrix, with determinant and verdict."""
    if order < 2 * matrix_degree:
        raise InvalidInputError("order too small for the requested matrix degree")
    grid = limit_moment_grid(spec, order)
    matrix = moment_matrix(grid, matrix_degree)
    verdict = psd_check(matrix)
    return {
        "cumulants": limit_cumulants(spec, order),
        "moments": grid,
        "matrix": matrix,
        "determinant": det_exact(matrix),
        "verdict": verdict,
    }


def clt_generating_pair(gamma: RationalLike, order: int) -> GridDistribution:
    """A mean-zero, variance-one commuting pair with covariance gamma.

    Four symmetric atoms at (+-1, +-1) weighted to produce the requested
    covariance; needs |gamma| <= 1 for a genuine probability measure.
    """
    g = as_fraction(gamma)
    plus = (1 + g) / 4
    minus = (1 - g) / 4
    atoms = []
    for s, t in ((1, 1), (-1, -1)):
        if plus != 0:
            atoms.append((Fraction(s), Fraction(t), plus))
    for s, t in ((1, -1), (-1, 1)):
        if minus != 0:
            atoms.append((Fraction(s), Fraction(t), minus))
    return grid_from_measure(AtomicPlanarMeasure(tuple(atoms)), order)


def poisson_mixture_pair(spec: LimitSpec, n: int, order: int) -> GridDistribution:
    """The size-n triangular-array entry: (1 - lam/n) at the origin plus
    (lam/n) times the jump measure."""
    if spec.kind == "poisson":
        jump = AtomicPlanarMeasure.point(spec.alpha, spec.beta)
        lam = spec.lam
    elif spec.kind == "compound":
        jump = spec.measure
        lam = spec.lam
    else:
        raise InvalidInputError("mixture pair applies to the Poisson-type kinds")
    weight = lam / n
    atoms = [(s, t, w * weight) for s, t, w in jump.atoms]
    # origin mass completes the probability: 1 - lam/n * total jump mass
    origin_weight = 1 - weight * jump.total_mass
    if origin_weight != 0:
        atoms.append((Fraction(0), Fraction(0), origin_weight))
    return grid_from_measure(AtomicPlanarMeasure.from_atoms(atoms), order)


def limit_convergence_check(spec: LimitSpec, n: int, order: int) -> dict[str, Any]:
    """Exact finite-size comparison against the limiting cumulant table.

    For the central limit the dot operation and cumulant homogeneity give an
    identity at every finite size: the normalized cumulant of total degree
    m + n equals n^(1-(m+n)/2) times the base cumulant, reported exactly for
    even totals and as squares for odd ones.  For the Poisson kinds the
    size-n mixture's scaled cumulants approach the limit at rate 1/n and the
    exact deviations are reported.
    """
    if n < 1:
        raise InvalidInputError("size must be at least 1")
    limit_table = limit_cumulants(spec, order)
    report: dict[str, Any] = {"kind": spec.kind, "n": n, "order": order, "entries": {}}
    if spec.kind == "clt":
        base = clt_generating_pair(spec.gamma, order)
        base_table = grid_cumulant_table(word_from_grid(base), order)
        for m in range(order + 1):
            for k in range(order + 1 - m):
                if m + k < 1:
                    continue
                pattern = "L" * m + "R" * k
                kb = base_table.value(pattern)
                dotted = n * kb
                total = m + k
                entry: dict[str, Any] = {
                    "base": kb,
                    "dotted": dotted,
                    "limit": limit_table.value(pattern),
                }
                if total % 2 == 0:
                    scaled = dotted / Fraction(n) ** (total // 2)
                    entry["scaled"] = scaled
                    entry["deviation"] = scaled - limit_table.value(pattern)
                else:
                    entry["scaled_squared"] = dotted * dotted / Fraction(n) ** total
                    entry["limit_squared"] = limit_table.value(pattern) ** 2
                report["entries"][pattern] = entry
        return report
    mixture = poisson_mixture_pair(spec, n, order)
    mix_table = grid_cumulant_table(word_from_grid(mixture), order)
    for m in range(order + 1):
        for k in range(order + 1 - m):
            if m + k < 1:
                continue
            pattern = "L" * m + "R" * k
            scaled = n * mix_table.value(pattern)
            limit_value = limit_table.value(pattern)
            report["entries"][pattern] = {
                "scaled": scaled,
                "limit": limit_value,
                "deviation": scaled - limit_value,
            }
    return report

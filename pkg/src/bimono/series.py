"""Truncated formal power series engine for the transform layer.

All series live in the coordinates u = 1/z, v = 1/w, so a Cauchy transform
becomes a series of valuation 1 per variable and an F-transform is stored
through its reciprocal-substitution form f(u) = 1/F(1/u), which equals the
marginal Cauchy series itself.  Composition of F-transforms is then plain
substitution of valuation-1 series and no expansion at infinity is ever
needed.

Coefficients are exact rationals or polynomials in the time parameter t;
the two mix freely, so the same arithmetic drives both the static transforms
and the semigroup evolution.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Iterable

from .cumulants import CumulantTable, TimePolynomial
from .distributions import (
    AtomicPlanarMeasure,
    GridDistribution,
    RationalLike,
    as_fraction,
)
from .errors import (
    InvalidInputError,
    SingularSeriesError,
    UnsupportedParametersError,
)

Coeff = Fraction | TimePolynomial

_ZERO = Fraction(0)


def _norm(c) -> Coeff:
    if isinstance(c, (Fraction, TimePolynomial)):
        return c
    return as_fraction(c)


def _inv(c: Coeff) -> Coeff:
    if isinstance(c, TimePolynomial):
        return c.inverse()
    if c == 0:
        raise SingularSeriesError("leading coefficient is zero")
    return Fraction(1) / c


def _lift_poly(c: Coeff) -> TimePolynomial:
    if isinstance(c, TimePolynomial):
        return c
    return TimePolynomial.constant(c)


def binomial_coefficient(exponent: Fraction, k: int) -> Fraction:
    """Generalized binomial coefficient with a rational exponent."""
    num = Fraction(1)
    for i in range(k):
        num *= exponent - i
    return num / factorial(k)


class TruncatedSeries1:
    """Series in one variable, coefficients kept exactly up to a fixed order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable) -> None:
        vals = tuple(_norm(c) for c in coeffs)
        if not vals:
            raise InvalidInputError("series needs at least the constant coefficient")
        self.coeffs = vals

    @classmethod
    def zeros(cls, order: int) -> "TruncatedSeries1":
        return cls((_ZERO,) * (order + 1))

    @classmethod
    def constant(cls, c, order: int) -> "TruncatedSeries1":
        return cls((_norm(c),) + (_ZERO,) * order)

    @classmethod
    def identity(cls, order: int) -> "TruncatedSeries1":
        if order < 1:
            raise InvalidInputError("identity needs order >= 1")
        return cls((_ZERO, Fraction(1)) + (_ZERO,) * (order - 1))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Coeff:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else _ZERO

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries1):
            return NotImplemented
        if self.order != other.order:
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"TruncatedSeries1({list(self.coeffs)!r})"

    def truncate(self, order: int) -> "TruncatedSeries1":
        if order >= self.order:
            return self
        return TruncatedSeries1(self.coeffs[: order + 1])

    def map_coefficients(self, fn: Callable[[Coeff], Coeff]) -> "TruncatedSeries1":
        return TruncatedSeries1(tuple(fn(c) for c in self.coeffs))

    def valuation(self) -> int:
        for k, c in enumerate(self.coeffs):
            if c != 0:
                return k
        return len(self.coeffs)

    def __add__(self, other: "TruncatedSeries1") -> "TruncatedSeries1":
        n = min(self.order, other.order)
        return TruncatedSeries1(
            tuple(self.coeffs[k] + other.coeffs[k] for k in range(n + 1))
        )

    def __sub__(self, other: "TruncatedSeries1") -> "TruncatedSeries1":
        n = min(self.order, other.order)
        return TruncatedSeries1(
            tuple(self.coeffs[k] - other.coeffs[k] for k in range(n + 1))
        )

    def __neg__(self) -> "TruncatedSeries1":
        return TruncatedSeries1(tuple(-c for c in self.coeffs))

    def scale(self, c) -> "TruncatedSeries1":
        cv = _norm(c)
        return TruncatedSeries1(tuple(cv * x for x in self.coeffs))

    def __mul__(self, other: "TruncatedSeries1") -> "TruncatedSeries1":
        n = min(self.order, other.order)
        out = [_ZERO] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a == 0:
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if b != 0:
                    out[i + j] = out[i + j] + a * b
        return TruncatedSeries1(out)

    def shift_up(self, k: int = 1) -> "TruncatedSeries1":
        """Multiply by u^k, keeping the order (top coefficients fall off)."""
        return TruncatedSeries1(((_ZERO,) * k + self.coeffs)[: self.order + 1])

    def shift_down(self, k: int = 1) -> "TruncatedSeries1":
        """Divide by u^k; the dropped low coefficients must vanish."""
        if any(c != 0 for c in self.coeffs[:k]):
            raise SingularSeriesError(f"series is not divisible by u^{k}")
        return TruncatedSeries1(self.coeffs[k:])

    def reciprocal(self) -> "TruncatedSeries1":
        """Multiplicative inverse; needs an invertible constant coefficient."""
        inv0 = _inv(self.coeffs[0])
        out = [inv0] + [_ZERO] * self.order
        for k in range(1, self.order + 1):
            acc = _ZERO
            for i in range(1, k + 1):
                if self.coeffs[i] != 0:
                    acc = acc + self.coeffs[i] * out[k - i]
            out[k] = -inv0 * acc
        return TruncatedSeries1(out)

    def compose(self, inner: "TruncatedSeries1") -> "TruncatedSeries1":
        """Substitute a series of valuation >= 1 for the variable."""
        if inner[0] != 0:
            raise InvalidInputError("composition needs an inner constant term 0")
        n = min(self.order, inner.order)
        result = TruncatedSeries1.constant(self.coeffs[n], n)
        for k in range(n - 1, -1, -1):
            result = result * inner
            result = TruncatedSeries1(
                (result.coeffs[0] + self.coeffs[k],) + result.coeffs[1:]
            )
        return result

    def reverse(self) -> "TruncatedSeries1":
        """Compositional inverse of a series of valuation exactly 1."""
        if self.coeffs[0] != 0:
            raise InvalidInputError("reversion needs valuation exactly 1")
        inv1 = _inv(self.coeffs[1])
        n = self.order
        out = [_ZERO] * (n + 1)
        out[1] = inv1
        for k in range(2, n + 1):
            err = self.compose(TruncatedSeries1(out))[k]
            out[k] = -inv1 * err
        return TruncatedSeries1(out)


class TruncatedSeries2:
    """Series in u and v, truncated to a rectangle and optionally a total degree.

    Cells beyond the total-degree cap are untracked and read as zero; the cap
    exists so that grid pipelines bounded by m + n can skip the top corner.
    """

    __slots__ = ("coeffs", "total")

    def __init__(self, coeffs: Iterable[Iterable], total: int | None = None) -> None:
        rows = tuple(tuple(_norm(c) for c in row) for row in coeffs)
        if not rows or any(len(row) != len(rows[0]) for row in rows):
            raise InvalidInputError("coefficient rows must be rectangular")
        if total is not None:
            rows = tuple(
                tuple(c if i + j <= total else _ZERO for j, c in enumerate(row))
                for i, row in enumerate(rows)
            )
        self.coeffs = rows
        self.total = total

    @classmethod
    def zeros(cls, nu: int, nv: int, total: int | None = None) -> "TruncatedSeries2":
        return cls(((_ZERO,) * (nv + 1),) * (nu + 1), total)

    @classmethod
    def constant(cls, c, nu: int, nv: int, total: int | None = None) -> "TruncatedSeries2":
        rows = [[_norm(c)] + [_ZERO] * nv]
        rows.extend([_ZERO] * (nv + 1) for _ in range(nu))
        return cls(rows, total)

    @property
    def nu(self) -> int:
        return len(self.coeffs) - 1

    @property
    def nv(self) -> int:
        return len(self.coeffs[0]) - 1

    def __getitem__(self, key: tuple[int, int]) -> Coeff:
        i, j = key
        if 0 <= i <= self.nu and 0 <= j <= self.nv:
            return self.coeffs[i][j]
        return _ZERO

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries2):
            return NotImplemented
        if self.nu != other.nu or self.nv != other.nv:
            return False
        return all(
            a == b for ra, rb in zip(self.coeffs, other.coeffs) for a, b in zip(ra, rb)
        )

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        cells = {
            f"{i},{j}": c
            for i, row in enumerate(self.coeffs)
            for j, c in enumerate(row)
            if c != 0
        }
        return f"TruncatedSeries2(nu={self.nu}, nv={self.nv}, {cells!r})"

    @staticmethod
    def _merge_total(a: int | None, b: int | None) -> int | None:
        if a is None:
            return b
        if b is None:
            return a
        return min(a, b)

    def truncate(
        self, nu: int, nv: int, total: int | None = None
    ) -> "TruncatedSeries2":
        nu = min(nu, self.nu)
        nv = min(nv, self.nv)
        return TruncatedSeries2(
            tuple(row[: nv + 1] for row in self.coeffs[: nu + 1]),
            self._merge_total(self.total, total),
        )

    def map_coefficients(self, fn: Callable[[Coeff], Coeff]) -> "TruncatedSeries2":
        return TruncatedSeries2(
            tuple(tuple(fn(c) for c in row) for row in self.coeffs), self.total
        )

    def __add__(self, other: "TruncatedSeries2") -> "TruncatedSeries2":
        nu = min(self.nu, other.nu)
        nv = min(self.nv, other.nv)
        return TruncatedSeries2(
            tuple(
                tuple(self.coeffs[i][j] + other.coeffs[i][j] for j in range(nv + 1))
                for i in range(nu + 1)
            ),
            self._merge_total(self.total, other.total),
        )

    def __sub__(self, other: "TruncatedSeries2") -> "TruncatedSeries2":
        return self + other.scale(-1)

    def scale(self, c) -> "TruncatedSeries2":
        cv = _norm(c)
        return TruncatedSeries2(
            tuple(tuple(cv * x for x in row) for row in self.coeffs), self.total
        )

    def __mul__(self, other: "TruncatedSeries2") -> "TruncatedSeries2":
        nu = min(self.nu, other.nu)
        nv = min(self.nv, other.nv)
        total = self._merge_total(self.total, other.total)
        out = [[_ZERO] * (nv + 1) for _ in range(nu + 1)]
        for i in range(nu + 1):
            for j in range(nv + 1):
                a = self.coeffs[i][j]
                if a == 0:
                    continue
                imax = nu - i
                jmax = nv - j
                for p in range(imax + 1):
                    row = other.coeffs[p]
                    for q in range(jmax + 1):
                        b = row[q]
                        if b != 0:
                            if total is not None and i + j + p + q > total:
                                continue
                            out[i + p][j + q] = out[i + p][j + q] + a * b
        return TruncatedSeries2(out, total)

    def bicompose(
        self, f1: TruncatedSeries1, f2: TruncatedSeries1
    ) -> "TruncatedSeries2":
        """Substitute valuation-1 series for u and for v."""
        if f1[0] != 0 or f2[0] != 0:
            raise InvalidInputError("bicompose needs inner constant terms 0")
        nu = min(self.nu, f1.order)
        nv = min(self.nv, f2.order)
        upow = _powers(f1.truncate(nu), nu)
        vpow = _powers(f2.truncate(nv), nv)
        out = [[_ZERO] * (nv + 1) for _ in range(nu + 1)]
        for i in range(nu + 1):
            for j in range(nv + 1):
                c = self.coeffs[i][j]
                if c == 0:
                    continue
                for a in range(i, nu + 1):
                    ua = upow[i][a]
                    if ua == 0:
                        continue
                    ca = c * ua
                    for b in range(j, nv + 1):
                        vb = vpow[j][b]
                        if vb != 0:
                            if self.total is not None and a + b > self.total:
                                continue
                            out[a][b] = out[a][b] + ca * vb
        return TruncatedSeries2(out, self.total)

    def shift_down_uv(self) -> "TruncatedSeries2":
        """Divide by uv; the first row and column must vanish."""
        if any(c != 0 for c in self.coeffs[0]) or any(
            row[0] != 0 for row in self.coeffs
        ):
            raise SingularSeriesError("series is not divisible by uv")
        total = None if self.total is None else self.total - 2
        return TruncatedSeries2(
            tuple(row[1:] for row in self.coeffs[1:]), total
        )

    def shift_up_uv(self) -> "TruncatedSeries2":
        """Multiply by uv, growing the rectangle by one in each direction."""
        nv = self.nv
        rows = [(_ZERO,) * (nv + 2)]
        for row in self.coeffs:
            rows.append((_ZERO,) + row)
        total = None if self.total is None else self.total + 2
        return TruncatedSeries2(rows, total)

    def mul_u_series(self, s: TruncatedSeries1) -> "TruncatedSeries2":
        """Multiply by a series in u alone."""
        nu = min(self.nu, s.order)
        out = [[_ZERO] * (self.nv + 1) for _ in range(nu + 1)]
        for p, c in enumerate(s.coeffs[: nu + 1]):
            if c == 0:
                continue
            for i in range(nu + 1 - p):
                row = self.coeffs[i]
                for j in range(self.nv + 1):
                    if row[j] != 0:
                        out[i + p][j] = out[i + p][j] + c * row[j]
        return TruncatedSeries2(out, self.total)

    def mul_v_series(self, s: TruncatedSeries1) -> "TruncatedSeries2":
        """Multiply by a series in v alone."""
        nv = min(self.nv, s.order)
        out = [[_ZERO] * (nv + 1) for _ in range(self.nu + 1)]
        for q, c in enumerate(s.coeffs[: nv + 1]):
            if c == 0:
                continue
            for i in range(self.nu + 1):
                row = self.coeffs[i]
                for j in range(nv + 1 - q):
                    if row[j] != 0:
                        out[i][j + q] = out[i][j + q] + c * row[j]
        return TruncatedSeries2(out, self.total)

    def u_marginal(self) -> TruncatedSeries1:
        """Coefficient slice of v^1: the left marginal Cauchy series."""
        if self.nv < 1 or self.nu < 1:
            raise InvalidInputError("marginal slice needs orders >= 1")
        return TruncatedSeries1(tuple(row[1] for row in self.coeffs))

    def v_marginal(self) -> TruncatedSeries1:
        """Coefficient slice of u^1: the right marginal Cauchy series."""
        if self.nv < 1 or self.nu < 1:
            raise InvalidInputError("marginal slice needs orders >= 1")
        return TruncatedSeries1(tuple(self.coeffs[1]))


def _powers(f: TruncatedSeries1, top: int) -> list[TruncatedSeries1]:
    powers = [TruncatedSeries1.constant(1, f.order)]
    for _ in range(top):
        powers.append(powers[-1] * f)
    return powers


def outer_product(fu: TruncatedSeries1, fv: TruncatedSeries1) -> TruncatedSeries2:
    """The series fu(u) * fv(v) as a bivariate series."""
    return TruncatedSeries2(
        tuple(tuple(a * b for b in fv.coeffs) for a in fu.coeffs)
    )


def product_against_cauchy(x: TruncatedSeries2, y: TruncatedSeries2) -> TruncatedSeries2:
    """Product x*y where y has valuation >= 1 in each variable.

    The valuation gives one extra exact order in each direction compared to
    the generic truncated product, which is what the convolution identity
    needs to come out at full grid order.
    """
    if any(c != 0 for c in y.coeffs[0]) or any(row[0] != 0 for row in y.coeffs):
        raise InvalidInputError("second factor must vanish on the axes")
    nu = min(x.nu + 1, y.nu)
    nv = min(x.nv + 1, y.nv)
    if x.total is None:
        total = y.total
    else:
        total = TruncatedSeries2._merge_total(x.total + 2, y.total)
    out = [[_ZERO] * (nv + 1) for _ in range(nu + 1)]
    for i in range(x.nu + 1):
        for j in range(x.nv + 1):
            a = x.coeffs[i][j]
            if a == 0:
                continue
            for p in range(1, nu - i + 1):
                row = y.coeffs[p]
                for q in range(1, nv - j + 1):
                    b = row[q]
                    if b != 0:
                        if total is not None and i + j + p + q > total:
                            continue
                        out[i + p][j + q] = out[i + p][j + q] + a * b
    return TruncatedSeries2(out, total)


# ---------------------------------------------------------------------------
# transforms of grids


def cauchy_from_grid(g: GridDistribution, total: int | None = None) -> TruncatedSeries2:
    """Two-variable Cauchy transform: moment (m, n) sits at cell (m+1, n+1)."""
    if not g.is_normalized:
        raise InvalidInputError("Cauchy transform needs a normalized grid")
    n = g.order + 1
    rows = [[_ZERO] * (n + 1) for _ in range(n + 1)]
    for m in range(g.order + 1):
        for k in range(g.order + 1):
            rows[m + 1][k + 1] = g.moment(m, k)
    return TruncatedSeries2(rows, total)


def grid_from_cauchy(G: TruncatedSeries2, order: int | None = None) -> GridDistribution:
    """Read the moment grid back out of a Cauchy series."""
    if order is None:
        order = min(G.nu, G.nv) - 1
    if G.total is not None and 2 * order + 2 > G.total:
        raise InvalidInputError("total-degree cap is too small for this grid order")
    rows = tuple(
        tuple(as_fraction(G[m + 1, k + 1]) for k in range(order + 1))
        for m in range(order + 1)
    )
    return GridDistribution(rows)


def cauchy_moment(G: TruncatedSeries2, m: int, n: int) -> Coeff:
    """Moment (m, n) of a Cauchy series, honoring the total-degree cap."""
    if m + 1 > G.nu or n + 1 > G.nv:
        raise InvalidInputError(f"series too short for moment ({m},{n})")
    if G.total is not None and m + n + 2 > G.total:
        raise InvalidInputError(f"total-degree cap hides moment ({m},{n})")
    return G[m + 1, n + 1]


def marginal_cauchy(g: GridDistribution, left: bool = True) -> TruncatedSeries1:
    """Univariate Cauchy series of one marginal: moment m at coefficient m+1."""
    if not g.is_normalized:
        raise InvalidInputError("Cauchy transform needs a normalized grid")
    coeffs = [_ZERO]
    for m in range(g.order + 1):
        coeffs.append(g.moment(m, 0) if left else g.moment(0, m))
    return TruncatedSeries1(coeffs)


def f_transform(marginal: TruncatedSeries1) -> TruncatedSeries1:
    """Composition-ready form of the reciprocal transform F = 1/G.

    Stored as f(u) = 1/F(1/u), which is exactly the Cauchy series again, so
    this validates the shape (valuation 1, leading coefficient 1) and fixes
    the representation; F itself is recovered by `f_z_coefficients`.
    """
    if marginal[0] != 0 or marginal[1] != 1:
        raise InvalidInputError(
            "marginal Cauchy series must start u + (mean) u^2 + ..."
        )
    return marginal


def f_z_coefficients(f: TruncatedSeries1) -> tuple[Fraction, ...]:
    """Expansion of F at infinity: entry k is the coefficient of z^(1-k).

    For f(u) = 1/F(1/u) of valuation 1, u/f(u) is a unit series e(u) and
    F(z) = e0 z + e1 + e2/z + ...
    """
    unit = f.shift_down(1).reciprocal()
    return tuple(as_fraction(c) for c in unit.coeffs)


def convolve_transform(
    G1: TruncatedSeries2,
    G2: TruncatedSeries2,
    f2a: TruncatedSeries1,
    f2b: TruncatedSeries1,
) -> TruncatedSeries2:
    """Transform-level convolution: compose the first Cauchy transform with the
    second pair's reciprocal transforms and multiply by the second Cauchy
    transform and those reciprocals.

    In u-coordinates the right-hand side collapses to the moment series of
    the first pair evaluated at (f2a, f2b) times the second Cauchy series.
    """
    if G1.nu != G2.nu or G1.nv != G2.nv:
        raise InvalidInputError("convolution needs equal truncation rectangles")
    if f2a.order < G2.nu - 1 or f2b.order < G2.nv - 1:
        raise InvalidInputError("marginal transforms are truncated too low")
    mu = min(f2a.order, G2.nu)
    mv = min(f2b.order, G2.nv)
    if f2a.truncate(mu) != G2.u_marginal().truncate(mu):
        raise InvalidInputError("f2a is not the transform of G2's left marginal")
    if f2b.truncate(mv) != G2.v_marginal().truncate(mv):
        raise InvalidInputError("f2b is not the transform of G2's right marginal")
    hat = G1.shift_down_uv()
    composed = hat.bicompose(f2a.truncate(G1.nu - 1), f2b.truncate(G1.nv - 1))
    return product_against_cauchy(composed, G2)


# ---------------------------------------------------------------------------
# cumulant generating functions and the evolution equations


@dataclass(frozen=True)
class GeneratingFunctions:
    """Marginal series a1, a2, correlation part a, and their combination atilde.

    a1[m-1] holds the (m, 0) cumulant, a2[n-1] the (0, n) one; `a` holds the
    mixed cumulants at cell (m, n) and atilde = u*a1 + v*a2 + a.
    """

    a1: TruncatedSeries1
    a2: TruncatedSeries1
    a: TruncatedSeries2
    atilde: TruncatedSeries2


def generating_functions(
    table: CumulantTable, order: int, total: int | None = None
) -> GeneratingFunctions:
    """Cumulant generating data from a grid table, up to the given order.

    A total-degree cap restricts lookups to cells with m + n <= total, which
    is what a table built from a length-bounded word distribution can supply;
    the capped series stay exact wherever the downstream flow reads them.
    """
    if total is not None and total < order:
        raise InvalidInputError("total-degree cap below the marginal order")

    def k(m: int, n: int) -> Coeff:
        if m == n == 0 or (total is not None and m + n > total):
            return _ZERO
        return table.value("L" * m + "R" * n)

    a1 = TruncatedSeries1(tuple(k(m, 0) for m in range(1, order + 1)))
    a2 = TruncatedSeries1(tuple(k(0, n) for n in range(1, order + 1)))
    mixed = [[_ZERO] * (order + 1) for _ in range(order + 1)]
    full = [[_ZERO] * (order + 1) for _ in range(order + 1)]
    for m in range(order + 1):
        for n in range(order + 1):
            if m + n >= 1 and (total is None or m + n <= total):
                full[m][n] = k(m, n)
                if m >= 1 and n >= 1:
                    mixed[m][n] = full[m][n]
    return GeneratingFunctions(
        a1, a2, TruncatedSeries2(mixed, total), TruncatedSeries2(full, total)
    )


def evolve_marginal(a: TruncatedSeries1, order: int) -> TruncatedSeries1:
    """Time-dependent reciprocal transform of one marginal.

    Solves df/dt = f^2 * a(f) with f(0) = u degree by degree; the u^d
    coefficient only involves lower degrees, so each one is an exact
    polynomial integration.
    """
    if order < 1:
        raise InvalidInputError("marginal evolution needs order >= 1")
    if a.order < order - 2:
        raise InvalidInputError("cumulant series truncated below the target order")
    coeffs: list[Coeff] = [_ZERO] * (order + 1)
    coeffs[1] = TimePolynomial.constant(1)
    for d in range(2, order + 1):
        f = TruncatedSeries1(tuple(coeffs[: d + 1]))
        ff = f * f
        # f^2 has valuation 2, so a(f) is only needed through degree d - 2
        composed = a.truncate(d - 2).compose(f.truncate(max(d - 2, 1)))
        rhs = _ZERO
        for j in range(min(d - 2, composed.order) + 1):
            cj = composed[j]
            if cj != 0:
                rhs = rhs + cj * ff[d - j]
        coeffs[d] = _lift_poly(rhs).integrate()
    return TruncatedSeries1(coeffs)


def evolve_joint(
    atilde: TruncatedSeries2,
    a1: TruncatedSeries1,
    a2: TruncatedSeries1,
    nu: int,
    nv: int | None = None,
    total: int | None = None,
) -> TruncatedSeries2:
    """Time-dependent Cauchy transform of the pair.

    Solves dG/dt = G * atilde(f1, f2) with G(0) = uv, graded by total degree:
    the right side pairs a G cell with an atilde substitution cell of total
    degree >= 1, so every output cell integrates a polynomial built from
    strictly lower cells.
    """
    if nv is None:
        nv = nu
    if nu < 1 or nv < 1:
        raise InvalidInputError("joint evolution needs orders >= 1")
    if atilde.nu < nu - 1 or atilde.nv < nv - 1:
        raise InvalidInputError("atilde truncated below the target order")
    f1 = evolve_marginal(a1, nu - 1) if nu >= 2 else TruncatedSeries1.identity(1)
    f2 = evolve_marginal(a2, nv - 1) if nv >= 2 else TruncatedSeries1.identity(1)
    btotal = None if total is None else total - 2
    b = atilde.truncate(nu - 1, nv - 1, btotal).bicompose(f1, f2)
    cells: list[list[Coeff]] = [[_ZERO] * (nv + 1) for _ in range(nu + 1)]
    cells[1][1] = TimePolynomial.constant(1)
    top = nu + nv if total is None else min(nu + nv, total)
    for degree in range(3, top + 1):
        for i in range(1, nu + 1):
            j = degree - i
            if not 1 <= j <= nv:
                continue
            rhs = TimePolynomial()
            for p in range(1, i + 1):
                row = cells[p]
                brow = b.coeffs[i - p]
                for q in range(1, j + 1):
                    if (p, q) == (i, j):
                        continue
                    gc = row[q]
                    if gc == 0:
                        continue
                    bc = brow[j - q]
                    if bc != 0:
                        rhs = rhs + gc * bc
            cells[i][j] = rhs.integrate()
    return TruncatedSeries2(cells, total)


def series_eval_t(series, t: RationalLike):
    """Evaluate every polynomial-in-t coefficient at a rational time."""
    tv = as_fraction(t)

    def ev(c: Coeff) -> Coeff:
        return c(tv) if isinstance(c, TimePolynomial) else c

    return series.map_coefficients(ev)


def series_ddt0(series):
    """Coefficient of t in each cell: the derivative at time zero."""

    def d(c: Coeff) -> Coeff:
        return c.coefficient(1) if isinstance(c, TimePolynomial) else Fraction(0)

    return series.map_coefficients(d)


def h_series(
    g: TruncatedSeries2, f1: TruncatedSeries1, f2: TruncatedSeries1
) -> TruncatedSeries2:
    """The product of the Cauchy transform with both reciprocal transforms.

    In u-coordinates: (g / uv) divided by the unit parts of f1 and f2; starts
    at the constant 1 at time zero.
    """
    hat = g.shift_down_uv()
    r1 = f1.shift_down(1).reciprocal()
    r2 = f2.shift_down(1).reciprocal()
    return hat.mul_u_series(r1).mul_v_series(r2)


def semigroup_check(
    table: CumulantTable,
    s: RationalLike,
    t: RationalLike,
    order: int,
    total: int | None = None,
) -> bool:
    """Verify the joint and marginal flow identities at rational times.

    Checks that the time-(s+t) Cauchy transform equals the time-s transform
    composed with the time-t reciprocal transforms, times the time-t Cauchy
    transform and those reciprocals; and that each marginal composes.  Pass a
    total-degree cap when the table only covers patterns up to that length.
    """
    sv = as_fraction(s)
    tv = as_fraction(t)
    gf = generating_functions(table, order, total)
    nu = order + 1
    f_poly = evolve_marginal(gf.a1, nu)
    g_poly = evolve_joint(
        gf.atilde, gf.a1, gf.a2, nu, total=None if total is None else total + 2
    )
    f2_poly = evolve_marginal(gf.a2, nu)

    f1_s, f1_t, f1_st = (series_eval_t(f_poly, x) for x in (sv, tv, sv + tv))
    f2_s, f2_t, f2_st = (series_eval_t(f2_poly, x) for x in (sv, tv, sv + tv))
    g_s, g_t, g_st = (series_eval_t(g_poly, x) for x in (sv, tv, sv + tv))

    composed = g_s.shift_down_uv().bicompose(
        f1_t.truncate(nu - 1), f2_t.truncate(nu - 1)
    )
    joint_ok = product_against_cauchy(composed, g_t) == g_st
    marg_ok = f1_st == f1_s.compose(f1_t) and f2_st == f2_s.compose(f2_t)
    return joint_ok and marg_ok


# ---------------------------------------------------------------------------
# closed forms


def clt_closed_form(
    alpha: RationalLike,
    beta: RationalLike,
    gamma: RationalLike,
    order: int,
    total: int | None = None,
) -> TruncatedSeries2:
    """Central-limit Cauchy transform in closed form, expanded exactly.

    Requires equal marginal variances so the exponent of the correlation
    factor is rational; the general case is covered by `evolve_joint`.
    """
    av = as_fraction(alpha)
    bv = as_fraction(beta)
    gv = as_fraction(gamma)
    if av != bv:
        raise UnsupportedParametersError(
            "closed form needs equal marginal variances (irrational exponent otherwise)"
        )
    if av <= 0:
        raise InvalidInputError("variance must be positive")
    exponent = gv / av

    # square root factor (1 - 2 alpha t u^2)^(1/2), one power of t per u^2
    half = Fraction(1, 2)
    p = [TimePolynomial()] * (order + 1)
    p[0] = TimePolynomial.constant(1)
    for k in range(1, order // 2 + 1):
        c = binomial_coefficient(half, k) * (-2 * av) ** k
        p[2 * k] = TimePolynomial([0] * k + [c])
    sqrt_factor = TruncatedSeries1(p)
    u_over_sqrt = sqrt_factor.reciprocal().shift_up(1)

    # correlation ratio 1 - uv * sum_k p_k * (complete homogeneous of degree 2k-2)
    ratio = [[TimePolynomial() for _ in range(order + 1)] for _ in range(order + 1)]
    ratio[0][0] = TimePolynomial.constant(1)
    for k in range(1, order + 1):
        pk = binomial_coefficient(half, k) * (-2 * av) ** k
        poly = TimePolynomial([0] * k + [pk])
        for i in range(2 * k - 1):
            j = 2 * k - 2 - i
            if i + 1 <= order and j + 1 <= order:
                ratio[i + 1][j + 1] = ratio[i + 1][j + 1] - poly
    ratio_series = TruncatedSeries2(ratio, total)

    one = TruncatedSeries2.constant(1, order, order, total)
    w = ratio_series - one
    result = one
    k = 1
    wk = w
    while any(c != 0 for row in wk.coeffs for c in row):
        result = result + wk.scale(binomial_coefficient(exponent, k))
        k += 1
        wk = wk * w

    marginal_part = outer_product(u_over_sqrt, u_over_sqrt)
    if total is not None:
        marginal_part = marginal_part.truncate(order, order, total)
    return marginal_part * result


def compound_poisson_generating(
    lam: RationalLike, nu_measure: AtomicPlanarMeasure, order: int
) -> TruncatedSeries2:
    """Cumulant generating series of a compound Poisson spec, via geometric series.

    Each atom (s, t, w) contributes lam * w * (s^m t^n) at cell (m, n) for
    m + n >= 1; the grid cumulants are recovered as the cell values.
    """
    lv = as_fraction(lam)
    cells = [[_ZERO] * (order + 1) for _ in range(order + 1)]
    for s, t, w in nu_measure.atoms:
        spow = [Fraction(1)]
        tpow = [Fraction(1)]
        for _ in range(order):
            spow.append(spow[-1] * s)
            tpow.append(tpow[-1] * t)
        for m in range(order + 1):
            for n in range(order + 1):
                if m + n >= 1:
                    cells[m][n] += lv * w * spow[m] * tpow[n]
    return TruncatedSeries2(cells)

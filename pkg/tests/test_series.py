import random
from fractions import Fraction
from math import comb

import pytest

from bimono.cumulants import TimePolynomial, cumulant_table_from_moments
from bimono.distributions import (
    AtomicPlanarMeasure,
    grid_from_measure,
    word_from_grid,
)
from bimono.convolution import grid_convolve
from bimono.cumulants import CumulantTable, moment_from_cumulants
from bimono.errors import (
    InvalidInputError,
    SingularSeriesError,
    UnsupportedParametersError,
)
from bimono.limits import LimitSpec, limit_cumulants
from bimono.series import (
    GeneratingFunctions,
    TruncatedSeries1,
    TruncatedSeries2,
    binomial_coefficient,
    cauchy_from_grid,
    cauchy_moment,
    clt_closed_form,
    compound_poisson_generating,
    convolve_transform,
    evolve_joint,
    evolve_marginal,
    f_transform,
    f_z_coefficients,
    generating_functions,
    grid_from_cauchy,
    h_series,
    marginal_cauchy,
    outer_product,
    product_against_cauchy,
    semigroup_check,
    series_ddt0,
    series_eval_t,
)
from helpers import random_cumulant_table, random_grid, random_grid_cumulant_table

HALF = Fraction(1, 2)
TWO_POINT = AtomicPlanarMeasure.from_atoms([(0, 1, HALF), (1, 0, HALF)])
TAU = AtomicPlanarMeasure.from_atoms([(1, 1, 15), (-1, 1, 15), (1, -1, 15)])


def geometric(ratio, order):
    """1 / (1 - ratio*u) as a truncated series."""
    coeffs = [Fraction(1)]
    for _ in range(order):
        coeffs.append(coeffs[-1] * ratio)
    return TruncatedSeries1(coeffs)


class TestSeries1Arithmetic:
    def test_reciprocal_of_geometric(self):
        assert geometric(1, 6).reciprocal() == TruncatedSeries1([1, -1, 0, 0, 0, 0, 0])

    def test_reciprocal_round_trip(self):
        rng = random.Random(1)
        s = TruncatedSeries1([Fraction(2)] + [Fraction(rng.randint(-3, 3)) for _ in range(6)])
        assert s.reciprocal().reciprocal() == s

    def test_reciprocal_needs_unit(self):
        with pytest.raises(SingularSeriesError):
            TruncatedSeries1([0, 1]).reciprocal()

    def test_mul_and_valuation(self):
        u = TruncatedSeries1.identity(5)
        sq = u * u
        assert sq[2] == 1 and sq.valuation() == 2

    def test_compose_geometric(self):
        # 1/(1-u) composed with u^2 is 1/(1-u^2)
        outer = geometric(1, 6)
        inner = TruncatedSeries1.identity(6)
        inner = inner * inner
        got = outer.compose(inner)
        assert got == TruncatedSeries1([1, 0, 1, 0, 1, 0, 1])

    def test_compose_needs_valuation(self):
        with pytest.raises(InvalidInputError):
            geometric(1, 3).compose(TruncatedSeries1([1, 1, 0, 0]))

    def test_reverse_of_cubic_perturbation(self):
        f = TruncatedSeries1([0, 1, 0, 1, 0, 0, 0, 0, 0])
        g = f.reverse()
        assert f.compose(g) == TruncatedSeries1.identity(8)
        assert g.compose(f) == TruncatedSeries1.identity(8)

    def test_reverse_needs_valuation_one(self):
        with pytest.raises(InvalidInputError):
            TruncatedSeries1([1, 1]).reverse()
        with pytest.raises(SingularSeriesError):
            TruncatedSeries1([0, 0, 1]).reverse()

    def test_shifts(self):
        s = TruncatedSeries1([0, 1, 2])
        assert s.shift_down(1) == TruncatedSeries1([1, 2])
        assert s.shift_up(1) == TruncatedSeries1([0, 0, 1])
        with pytest.raises(SingularSeriesError):
            TruncatedSeries1([1, 0]).shift_down(1)


class TestSeries2Arithmetic:
    def test_bicompose_identity(self):
        uv = TruncatedSeries2.zeros(3, 3)
        cells = [list(r) for r in uv.coeffs]
        cells[1][1] = Fraction(1)
        uv = TruncatedSeries2(cells)
        ident = TruncatedSeries1.identity(3)
        assert uv.bicompose(ident, ident) == uv

    def test_mul_matches_hand_expansion(self):
        a = TruncatedSeries2([[1, 1], [1, 0]])
        b = TruncatedSeries2([[1, 2], [3, 0]])
        got = a * b
        # (1 + v + u)(1 + 2v + 3u) truncated to degree 1 in each variable
        assert got[0, 0] == 1 and got[0, 1] == 3 and got[1, 0] == 4 and got[1, 1] == 5

    def test_total_degree_cap_drops_corner(self):
        a = TruncatedSeries2([[1, 1], [1, 1]], total=1)
        assert a[1, 1] == 0

    def test_product_against_cauchy_gains_an_order(self):
        rng = random.Random(2)
        g = random_grid(rng, 3)
        G = cauchy_from_grid(g)
        one = TruncatedSeries2.constant(1, G.nu - 1, G.nv - 1)
        assert product_against_cauchy(one, G) == G

    def test_marginal_slices(self):
        g = grid_from_measure(AtomicPlanarMeasure.point(2, 3), 3)
        G = cauchy_from_grid(g)
        left = G.u_marginal()
        assert left == marginal_cauchy(g)

    def test_outer_product(self):
        a = TruncatedSeries1([1, 2])
        b = TruncatedSeries1([1, 3])
        got = outer_product(a, b)
        assert got[1, 1] == 6 and got[0, 1] == 3 and got[1, 0] == 2


class TestCauchyTransforms:
    def test_point_mass_is_bi_geometric(self):
        s, t = Fraction(3), Fraction(-2)
        g = grid_from_measure(AtomicPlanarMeasure.point(s, t), 5)
        G = cauchy_from_grid(g)
        expected = outer_product(geometric(s, 6).shift_up(1), geometric(t, 6).shift_up(1))
        assert G == expected

    def test_origin_gives_uv(self):
        g = grid_from_measure(AtomicPlanarMeasure.point(0, 0), 3)
        G = cauchy_from_grid(g)
        assert all(
            G[i, j] == (1 if (i, j) == (1, 1) else 0)
            for i in range(5)
            for j in range(5)
        )

    def test_round_trip_with_grid(self):
        rng = random.Random(3)
        g = random_grid(rng, 4)
        assert grid_from_cauchy(cauchy_from_grid(g)).m == g.m

    def test_requires_normalization(self):
        with pytest.raises(InvalidInputError):
            cauchy_from_grid(grid_from_measure(TAU, 2))


class TestFTransform:
    def test_point_mass_shift(self):
        g = grid_from_measure(AtomicPlanarMeasure.point(3, 0), 4)
        f = f_transform(marginal_cauchy(g))
        assert f_z_coefficients(f) == (1, -3, 0, 0, 0)

    def test_centered_second_moment(self):
        # mean zero: the 1/z coefficient is minus the variance
        mu = AtomicPlanarMeasure.from_atoms([(1, 0, HALF), (-1, 0, HALF)])
        g = grid_from_measure(mu, 4)
        e = f_z_coefficients(f_transform(marginal_cauchy(g)))
        assert e[0] == 1 and e[1] == 0 and e[2] == -1

    def test_origin_is_identity(self):
        g = grid_from_measure(AtomicPlanarMeasure.point(0, 0), 3)
        f = f_transform(marginal_cauchy(g))
        assert f == TruncatedSeries1.identity(4)
        assert f_z_coefficients(f) == (1, 0, 0, 0)

    def test_rejects_unnormalized(self):
        with pytest.raises(InvalidInputError):
            f_transform(TruncatedSeries1([0, 2, 0]))


class TestConvolveTransform:
    def test_origin_second_factor_is_neutral(self):
        rng = random.Random(4)
        g1 = random_grid(rng, 4)
        g2 = grid_from_measure(AtomicPlanarMeasure.point(0, 0), 4)
        out = convolve_transform(
            cauchy_from_grid(g1),
            cauchy_from_grid(g2),
            f_transform(marginal_cauchy(g2)),
            f_transform(marginal_cauchy(g2, left=False)),
        )
        assert out == cauchy_from_grid(g1)

    def test_matches_moment_level_on_two_point_fixture(self):
        g = grid_from_measure(TWO_POINT, 4)
        out = convolve_transform(
            cauchy_from_grid(g),
            cauchy_from_grid(g),
            f_transform(marginal_cauchy(g)),
            f_transform(marginal_cauchy(g, left=False)),
        )
        assert cauchy_moment(out, 2, 1) == Fraction(5, 8)
        assert cauchy_moment(out, 2, 2) == Fraction(3, 4)
        assert grid_from_cauchy(out).m == grid_convolve(g, g).m

    def test_matches_moment_level_on_random_grids(self):
        rng = random.Random(5)
        for _ in range(5):
            g1, g2 = random_grid(rng, 4), random_grid(rng, 4)
            out = convolve_transform(
                cauchy_from_grid(g1),
                cauchy_from_grid(g2),
                f_transform(marginal_cauchy(g2)),
                f_transform(marginal_cauchy(g2, left=False)),
            )
            assert grid_from_cauchy(out).m == grid_convolve(g1, g2).m

    def test_output_marginal_composes(self):
        rng = random.Random(6)
        g1, g2 = random_grid(rng, 4), random_grid(rng, 4)
        f2 = f_transform(marginal_cauchy(g2))
        out = convolve_transform(
            cauchy_from_grid(g1),
            cauchy_from_grid(g2),
            f2,
            f_transform(marginal_cauchy(g2, left=False)),
        )
        f1 = f_transform(marginal_cauchy(g1))
        assert out.u_marginal() == f1.compose(f2)

    def test_rejects_mismatched_truncation(self):
        rng = random.Random(7)
        g1, g2 = random_grid(rng, 3), random_grid(rng, 4)
        with pytest.raises(InvalidInputError):
            convolve_transform(
                cauchy_from_grid(g1),
                cauchy_from_grid(g2),
                f_transform(marginal_cauchy(g2)),
                f_transform(marginal_cauchy(g2, left=False)),
            )

    def test_rejects_wrong_marginal(self):
        rng = random.Random(8)
        g1, g2 = random_grid(rng, 3), random_grid(rng, 3)
        with pytest.raises(InvalidInputError):
            convolve_transform(
                cauchy_from_grid(g1),
                cauchy_from_grid(g2),
                f_transform(marginal_cauchy(g1)),
                f_transform(marginal_cauchy(g2, left=False)),
            )


class TestGeneratingFunctions:
    def test_central_limit_shape(self):
        table = limit_cumulants(LimitSpec.clt(2, 2, Fraction(1, 2)), 4)
        gf = generating_functions(table, 4)
        assert gf.a1 == TruncatedSeries1([0, 2, 0, 0])
        assert gf.a2 == TruncatedSeries1([0, 2, 0, 0])
        assert gf.a[1, 1] == Fraction(1, 2)
        assert sum(1 for row in gf.a.coeffs for c in row if c != 0) == 1

    def test_atilde_assembles(self):
        rng = random.Random(9)
        table = random_cumulant_table(rng, 4)
        gf = generating_functions(table, 4, total=4)
        for m in range(5):
            for n in range(5):
                if m + n == 0 or m + n > 4:
                    assert gf.atilde[m, n] == 0
                elif n == 0:
                    assert gf.atilde[m, n] == gf.a1[m - 1]
                elif m == 0:
                    assert gf.atilde[m, n] == gf.a2[n - 1]
                else:
                    assert gf.atilde[m, n] == gf.a[m, n]

    def test_poisson_is_geometric(self):
        lam, al, be = Fraction(2), Fraction(3), Fraction(-1)
        table = limit_cumulants(LimitSpec.poisson(lam, al, be), 5)
        gf = generating_functions(table, 5)
        point = compound_poisson_generating(lam, AtomicPlanarMeasure.point(al, be), 5)
        assert gf.atilde == point

    def test_zero_table_gives_zero(self):
        table = CumulantTable.from_grid([[0, 0], [0, 0]])
        gf = generating_functions(table, 1)
        assert all(c == 0 for c in gf.a1.coeffs)
        assert all(c == 0 for row in gf.atilde.coeffs for c in row)


class TestEvolveMarginal:
    def test_zero_cumulants_freeze_the_flow(self):
        a = TruncatedSeries1([0, 0, 0])
        f = evolve_marginal(a, 4)
        assert f == TruncatedSeries1.identity(4).map_coefficients(
            lambda c: TimePolynomial.constant(c) if c != 0 else c
        )

    def test_central_limit_square_root(self):
        # f_t = u (1 - 2 alpha t u^2)^(-1/2): binomial expansion oracle
        alpha = Fraction(3, 2)
        a = TruncatedSeries1([0, alpha, 0, 0, 0, 0, 0])
        f = evolve_marginal(a, 8)
        for d in range(9):
            expected = TimePolynomial()
            if d % 2 == 1:
                k = (d - 1) // 2
                c = binomial_coefficient(Fraction(-1, 2), k) * (-2 * alpha) ** k
                expected = TimePolynomial([0] * k + [c])
            assert f[d] == expected, d

    def test_compound_fixture_series(self):
        table = limit_cumulants(LimitSpec.compound(1, TAU), 3)
        gf = generating_functions(table, 3)
        f = evolve_marginal(gf.a1, 4)
        assert f[1] == TimePolynomial([1])
        assert f[2] == TimePolynomial([0, 15])
        assert f[3] == TimePolynomial([0, 45, 225])

    def test_truncation_guard(self):
        with pytest.raises(InvalidInputError):
            evolve_marginal(TruncatedSeries1([1]), 5)


class TestEvolveJoint:
    def test_zero_generator_stays_at_uv(self):
        zero = TruncatedSeries2.zeros(3, 3)
        a = TruncatedSeries1([0, 0, 0])
        g = evolve_joint(zero, a, a, 4)
        for i in range(5):
            for j in range(5):
                assert g[i, j] == (1 if (i, j) == (1, 1) else 0)

    def test_time_zero_is_uv(self):
        rng = random.Random(10)
        table = random_grid_cumulant_table(rng, 4)
        gf = generating_functions(table, 4)
        g0 = series_eval_t(evolve_joint(gf.atilde, gf.a1, gf.a2, 5), 0)
        for i in range(6):
            for j in range(6):
                assert g0[i, j] == (1 if (i, j) == (1, 1) else 0)

    def test_time_one_matches_partition_sum(self):
        rng = random.Random(11)
        table = random_grid_cumulant_table(rng, 4)
        gf = generating_functions(table, 4)
        g1 = series_eval_t(evolve_joint(gf.atilde, gf.a1, gf.a2, 5), 1)
        for m in range(5):
            for n in range(5):
                if 1 <= m + n <= 4:
                    assert cauchy_moment(g1, m, n) == moment_from_cumulants(
                        table, "L" * m + "R" * n
                    )

    def test_marginal_slice_matches_marginal_flow(self):
        rng = random.Random(12)
        table = random_grid_cumulant_table(rng, 4)
        gf = generating_functions(table, 4)
        g = evolve_joint(gf.atilde, gf.a1, gf.a2, 5)
        f = evolve_marginal(gf.a1, 4)
        left = g.u_marginal()
        for d in range(5):
            assert left[d] == f[d]

    def test_integer_times_match_convolution_powers(self):
        g = grid_from_measure(TWO_POINT, 4)
        table = cumulant_table_from_moments(word_from_grid(g))
        gf = generating_functions(table, 4, total=4)
        gt = evolve_joint(gf.atilde, gf.a1, gf.a2, 5, total=6)
        twice = grid_convolve(g, g)
        thrice = grid_convolve(twice, g)
        for m in range(5):
            for n in range(5):
                if m + n <= 4:
                    assert cauchy_moment(series_eval_t(gt, 2), m, n) == twice.moment(m, n)
                    assert cauchy_moment(series_eval_t(gt, 3), m, n) == thrice.moment(m, n)

    def test_derivative_at_zero_recovers_the_generator(self):
        rng = random.Random(13)
        table = random_grid_cumulant_table(rng, 4)
        gf = generating_functions(table, 4)
        g = evolve_joint(gf.atilde, gf.a1, gf.a2, 5)
        recovered = series_ddt0(g.shift_down_uv())
        assert recovered == gf.atilde

    def test_total_cap_matches_rectangle(self):
        rng = random.Random(14)
        table = random_grid_cumulant_table(rng, 5)
        gf = generating_functions(table, 5)
        full = evolve_joint(gf.atilde, gf.a1, gf.a2, 6)
        capped = evolve_joint(gf.atilde, gf.a1, gf.a2, 6, total=7)
        for i in range(7):
            for j in range(7):
                if i + j <= 7:
                    assert capped[i, j] == full[i, j]


class TestHSeriesAndSemigroup:
    def test_h_starts_at_one(self):
        rng = random.Random(15)
        table = random_grid_cumulant_table(rng, 3)
        gf = generating_functions(table, 3)
        g = evolve_joint(gf.atilde, gf.a1, gf.a2, 4)
        f1 = evolve_marginal(gf.a1, 4)
        f2 = evolve_marginal(gf.a2, 4)
        h0 = series_eval_t(
            h_series(series_eval_t(g, 0), series_eval_t(f1, 0), series_eval_t(f2, 0)),
            0,
        )
        assert h0[0, 0] == 1
        assert all(
            h0[i, j] == 0 for i in range(h0.nu + 1) for j in range(h0.nv + 1) if i + j
        )

    def test_h_cocycle_at_rational_times(self):
        table = limit_cumulants(LimitSpec.compound(1, TAU), 4)
        gf = generating_functions(table, 4)
        g = evolve_joint(gf.atilde, gf.a1, gf.a2, 5)
        f1 = evolve_marginal(gf.a1, 5)
        f2 = evolve_marginal(gf.a2, 5)
        for s, t in ((Fraction(1), Fraction(1)), (Fraction(1, 2), Fraction(1, 3))):
            hs = h_series(
                series_eval_t(g, s), series_eval_t(f1, s), series_eval_t(f2, s)
            )
            ht = h_series(
                series_eval_t(g, t), series_eval_t(f1, t), series_eval_t(f2, t)
            )
            hst = h_series(
                series_eval_t(g, s + t),
                series_eval_t(f1, s + t),
                series_eval_t(f2, s + t),
            )
            f1t = series_eval_t(f1, t)
            f2t = series_eval_t(f2, t)
            composed = hs.bicompose(f1t.truncate(4), f2t.truncate(4))
            assert composed * ht == hst.truncate(4, 4)

    def test_marginal_flow_composes(self):
        table = limit_cumulants(LimitSpec.poisson(1, 2, 1), 5)
        gf = generating_functions(table, 5)
        f = evolve_marginal(gf.a1, 6)
        for s, t in ((Fraction(1), Fraction(2)), (Fraction(1, 2), Fraction(1, 2))):
            fs = series_eval_t(f, s)
            ft = series_eval_t(f, t)
            fst = series_eval_t(f, s + t)
            assert fs.compose(ft) == fst

    def test_semigroup_check_passes(self):
        table = limit_cumulants(LimitSpec.compound(1, TAU), 4)
        assert semigroup_check(table, 0, Fraction(2, 3), 4)
        assert semigroup_check(table, 1, 1, 4)
        clt = limit_cumulants(LimitSpec.clt(1, 1, Fraction(1, 2)), 4)
        assert semigroup_check(clt, HALF, HALF, 4)

    def test_semigroup_double_convolution(self):
        g = grid_from_measure(TWO_POINT, 4)
        table = cumulant_table_from_moments(word_from_grid(g))
        gf = generating_functions(table, 4, total=4)
        gt = evolve_joint(gf.atilde, gf.a1, gf.a2, 5, total=6)
        g2 = series_eval_t(gt, 2)
        c = grid_convolve(g, g)
        for m in range(5):
            for n in range(5):
                if m + n <= 4:
                    assert cauchy_moment(g2, m, n) == c.moment(m, n)
        assert semigroup_check(table, 1, 1, 4, total=4)


class TestCltClosedForm:
    def test_uncorrelated_marginal_pattern(self):
        closed = clt_closed_form(1, 1, 0, 7)
        left = closed.u_marginal()
        for k in range(1, 4):
            expected = TimePolynomial([0] * k + [Fraction(comb(2 * k, k), 2**k)])
            assert left[2 * k + 1] == expected
        assert left[2] == 0 and left[4] == 0

    def test_time_zero_is_uv(self):
        closed = series_eval_t(clt_closed_form(1, 1, Fraction(1, 2), 5), 0)
        for i in range(6):
            for j in range(6):
                assert closed[i, j] == (1 if (i, j) == (1, 1) else 0)

    @pytest.mark.parametrize("gamma", [Fraction(0), Fraction(1), Fraction(1, 2)])
    def test_matches_the_flow(self, gamma):
        table = limit_cumulants(LimitSpec.clt(1, 1, gamma), 6)
        gf = generating_functions(table, 6)
        ode = evolve_joint(gf.atilde, gf.a1, gf.a2, 7)
        assert clt_closed_form(1, 1, gamma, 7) == ode

    def test_unequal_variances_rejected(self):
        with pytest.raises(UnsupportedParametersError):
            clt_closed_form(1, 2, 0, 4)

    def test_bad_variance_rejected(self):
        with pytest.raises(InvalidInputError):
            clt_closed_form(0, 0, 0, 4)


class TestCompoundGenerating:
    def test_point_measure_recovers_poisson(self):
        got = compound_poisson_generating(Fraction(3), AtomicPlanarMeasure.point(2, -1), 4)
        for m in range(5):
            for n in range(5):
                if m + n >= 1:
                    assert got[m, n] == 3 * Fraction(2) ** m * Fraction(-1) ** n
                else:
                    assert got[m, n] == 0

    def test_compound_fixture_grid(self):
        got = compound_poisson_generating(1, TAU, 4)
        for m in range(5):
            for n in range(5):
                if m + n >= 1:
                    assert got[m, n] == 15 * (-1) ** m + 15 * (-1) ** n + 15

    def test_empty_measure_vanishes(self):
        got = compound_poisson_generating(1, AtomicPlanarMeasure(()), 3)
        assert all(c == 0 for row in got.coeffs for c in row)

    def test_matches_limit_cumulants(self):
        table = limit_cumulants(LimitSpec.compound(Fraction(5, 2), TAU), 4)
        gf = generating_functions(table, 4)
        assert gf.atilde == compound_poisson_generating(Fraction(5, 2), TAU, 4)


class TestGeneratingFunctionsContainer:
    def test_fields(self):
        rng = random.Random(16)
        table = random_grid_cumulant_table(rng, 3)
        gf = generating_functions(table, 3)
        assert isinstance(gf, GeneratingFunctions)
        assert gf.a1.order == 2 and gf.atilde.nu == 3

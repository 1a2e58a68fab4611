"""Cochains, the differential, bounded solving, extension, blowup solving."""

import random
from fractions import Fraction

import pytest

from cechblow.poly import Poly, RatFunc, poly_from_string
from cechblow import cech
from cechblow import geometry as geo
from cechblow.realzero import Undecidable

XY = ["x", "y"]


def P(s):
    return poly_from_string(s, XY)


Q1 = P("x^2+y^2")
Q2 = P("x^2-2*x+1+y^2")
P11 = P("x^4-2*x^3+x^2+y^2")


@pytest.fixture(scope="module")
def cov2():
    return geo.make_covering([Q1, Q2])


@pytest.fixture(scope="module")
def cov3():
    return geo.make_covering([Q1, Q2, P("x^2+y^2+1")])


def rand_cochain(cov, degree, rng, denpool):
    values = {}
    for idx in cech.index_tuples(len(cov), degree):
        num = Poly(
            2,
            {(rng.randint(0, 2), rng.randint(0, 2)): Fraction(rng.randint(-3, 3)) for _ in range(3)},
        )
        values[idx] = RatFunc(num, denpool[rng.randrange(len(denpool))])
    return cech.Cochain(cov, degree, values, "rational")


class TestDifferential:
    def test_constant_cochain_has_zero_differential(self, cov2):
        c = cech.make_cochain(
            cov2, 0, {(1,): RatFunc.const(2, 5), (2,): RatFunc.const(2, 5)}
        )
        assert cech.differential(c).is_zero()

    def test_degree_zero_formula(self, cov2):
        h1, h2 = RatFunc(P("x")), RatFunc(P("y^2"))
        c = cech.make_cochain(cov2, 0, {(1,): h1, (2,): h2})
        d = cech.differential(c)
        assert d.values[(1, 2)] == h2 - h1
        assert d.values[(1, 1)].is_zero() and d.values[(2, 2)].is_zero()

    def test_dd_vanishes_on_random_cochains(self, cov2, cov3):
        rng = random.Random(3)
        pool = [Poly.const(2, 1), Q1, Q2]
        for cov in (cov2, cov3):
            for degree in (0, 1, 2):
                for _ in range(5):
                    f = rand_cochain(cov, degree, rng, pool)
                    assert cech.differential(cech.differential(f)).is_zero()


class TestBoundedSolver:
    def test_round_trip(self, cov2):
        rng = random.Random(9)
        small = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        for _ in range(3):
            values = {}
            for i, q in ((1, Q1), (2, Q2)):
                num = Poly(
                    2,
                    {small[rng.randrange(len(small))]: Fraction(rng.randint(-3, 3)) for _ in range(3)},
                )
                values[(i,)] = RatFunc(num, q)
            h = cech.make_cochain(cov2, 0, values)
            dh = cech.differential(h)
            found = cech.is_coboundary_bounded(dh, 3, 2)
            assert found is not None
            again = cech.differential(found.cochain)
            assert all(again.values[k] == dh.values[k] for k in dh.values)

    def test_zero_cocycle(self, cov2):
        zero = cech.make_cochain(cov2, 1, {})
        found = cech.is_coboundary_bounded(zero, 2, 1)
        assert found is not None
        assert all(v.is_zero() for v in cech.differential(found.cochain).values.values())

    def test_golden_negative_at_stated_bounds(self, cov2):
        # recorded outcome: no bounded preimage exists at D = N = 6
        g = cech.make_cochain(cov2, 1, {(1, 2): RatFunc(Poly.const(2, 1), P11)})
        assert cech.is_coboundary_bounded(g, 6, 6) is None


class TestChainMap:
    def test_pullback_commutes_with_differential(self, cov2):
        rng = random.Random(17)
        t = geo.blowup_at(geo.base_tower(), "base", (0, 0))
        pool = [Poly.const(2, 1), Q1]
        for _ in range(5):
            h = rand_cochain(cov2, 0, rng, pool)
            lhs = cech.pullback_cochain(t, cech.differential(h))
            rhs = {leaf: cech.differential(c) for leaf, c in cech.pullback_cochain(t, h).items()}
            for leaf in lhs:
                assert all(
                    lhs[leaf].values[k] == rhs[leaf].values[k] for k in lhs[leaf].values
                )

    def test_pullback_of_flagship_cocycle(self, cov2):
        g = cech.make_cochain(cov2, 1, {(1, 2): RatFunc(Poly.const(2, 1), P11)})
        t = geo.blowup_at(geo.base_tower(), "base", (0, 0))
        got = cech.pullback_cochain(t, g)
        expected_den = P("x^2") * (P("x^2-2*x+1") + P("y^2"))
        assert got["s1a"].values[(1, 2)] == RatFunc(Poly.const(2, 1), expected_den)


class TestExtendWithPower:
    def test_exact_cancellation(self):
        f = RatFunc(P("x^2+y^2+1"), Q1)
        res = cech.extend_with_power(f, Q1, 3)
        assert res.status == "extended" and res.power == 1
        assert res.global_fn.as_poly() == P("x^2+y^2+1")

    def test_polynomial_needs_no_power(self):
        res = cech.extend_with_power(RatFunc(P("x-3")), Q1, 2)
        assert res.status == "extended" and res.power == 0

    def test_unkillable_pole_reported(self):
        res = cech.extend_with_power(RatFunc(Poly.const(2, 1), P11), Q1, 4)
        assert res.status == "obstructed"
        assert res.blocking_points == ((Fraction(1), Fraction(0)),)
        assert res.center_candidates == ((Fraction(0), Fraction(0)),)


class TestSolveBlownup:
    def test_coboundary_of_globals_solves_without_blowups(self, cov2):
        h = cech.make_cochain(cov2, 0, {(1,): RatFunc(P("x")), (2,): RatFunc(P("y^2-1"))})
        f = cech.differential(cech.make_cochain(cov2, 0, h.values, "rational"))
        f = cech.Cochain(cov2, 1, f.values, "regular", cech.make_cochain(cov2, 1, f.values, "regular").certs)
        out = cech.solve_cocycle_blownup(f, nmax=4, max_depth=3)
        assert out.status == "solved" and out.depth == 0
        # dk equals f exactly on the base leaf
        k = out.preimages["base"]
        assert k[(2,)] - k[(1,)] == f.values[(1, 2)]

    def test_single_set_covering_trivial(self):
        cov1 = geo.make_covering([P("x^2+y^2+1")])
        f = cech.make_cochain(cov1, 1, {})
        out = cech.solve_cocycle_blownup(f, nmax=2, max_depth=1)
        assert out.status == "solved" and out.depth == 0

    def test_flagship_needs_depth_two(self, cov2):
        g = cech.make_cochain(cov2, 1, {(1, 2): RatFunc(Poly.const(2, 1), P11)}, "regular")
        out = cech.solve_cocycle_blownup(g, nmax=4, max_depth=6)
        assert out.status == "solved"
        assert out.depth == 2
        assert out.power % 2 == 0 and out.power <= 4
        steps = [(cid, center) for cid, center, _, _ in out.tower.steps]
        assert steps[0] == ("base", (Fraction(0), Fraction(0)))
        assert steps[1][1] == (Fraction(1), Fraction(0))
        for leaf in out.tower.leaf_ids():
            k = out.preimages[leaf]
            g_leaf = out.pulled_cocycle[leaf].values[(1, 2)]
            assert (k[(2,)] - k[(1,)] - g_leaf).is_zero()
            for cert in out.certs[leaf].values():
                cert.validate()

    def test_depth_limit_reports_failure(self, cov2):
        g = cech.make_cochain(cov2, 1, {(1, 2): RatFunc(Poly.const(2, 1), P11)}, "regular")
        out = cech.solve_cocycle_blownup(g, nmax=4, max_depth=1)
        assert out.status == "failed"
        assert out.obstructions


class TestSectionSpaces:
    def test_union_contains_low_power_solutions(self, cov2):
        # transition 1: solutions are pairs (h, h); constants appear at m = 0
        basis = cech.solution_space_union(cov2, RatFunc.const(2, 1), 2, 1)
        vectors = [(s1, s2) for s1, s2 in basis]
        assert any(s1 == s2 and s1.is_polynomial() for s1, s2 in vectors)

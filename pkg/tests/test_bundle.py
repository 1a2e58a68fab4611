"""Rank-1 transition bundles: the xi family, pullbacks, sections, searches."""

from fractions import Fraction

import pytest

from cechblow.poly import Poly, RatFunc, poly_from_string
from cechblow import bundle as bd
from cechblow import geometry as geo
from cechblow._linalg import in_span

XY = ["x", "y"]


def P(s):
    return poly_from_string(s, XY)


class TestMakeXi:
    def test_transition_and_zero_set(self):
        b = bd.make_xi(1, 1)
        assert b.transition.as_poly() == P("x^4-2*x^3+x^2+y^2")
        from cechblow.realzero import zero_points

        cert = zero_points(b.transition.as_poly())
        assert cert.points == ((Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)))
        b.transition_cert.validate()
        b.nonvanishing_cert.validate()

    def test_one_sided_zero(self):
        b = bd.make_xi(0, 2)
        from cechblow.realzero import zero_points

        cert = zero_points(b.transition.as_poly())
        assert cert.points == ((Fraction(1), Fraction(0)),)

    def test_degenerate_is_unit_transition(self):
        b = bd.make_xi(0, 0)
        assert b.transition.as_poly() == P("1+y^2")
        from cechblow.realzero import is_unit

        assert is_unit(b.transition.as_poly()).is_yes


class TestPullback:
    def test_first_chart_strips_to_lower_index(self):
        b = bd.make_xi(2, 1)
        t = geo.blowup_at(geo.base_tower(), "base", (0, 0))
        pulled = bd.pullback_bundle(t, b)
        one = pulled["s1a"]
        assert one.transition.as_poly() == bd.transition_poly(1, 1)
        # stripping log replay: raw = simplified * product of stripped factors
        raw = t.pull_ratfunc("s1a", b.transition)
        acc = one.transition
        for f, e, side in one.strip_log:
            factor = RatFunc(f**e) if side == "num" else RatFunc(Poly.const(2, 1), f**e)
            acc = acc * factor
        assert acc == raw

    def test_second_center_strips_to_lower_second_index(self):
        b = bd.make_xi(1, 2)
        t = geo.blowup_at(geo.base_tower(), "base", (1, 0))
        pulled = bd.pullback_bundle(t, b)
        assert pulled["s1a"].transition.as_poly() == bd.transition_poly(1, 1)

    def test_other_chart_becomes_unit(self):
        from cechblow.realzero import is_unit

        b = bd.make_xi(1, 1)
        t = geo.blowup_at(geo.base_tower(), "base", (0, 0))
        pulled = bd.pullback_bundle(t, b)
        assert is_unit(pulled["s1b"].transition.as_poly()).is_yes

    def test_unit_transition_stays_unit(self):
        b = bd.make_xi(0, 0)
        t = geo.blowup_at(geo.base_tower(), "base", (0, 0))
        pulled = bd.pullback_bundle(t, b)
        for leaf in ("s1a", "s1b"):
            from cechblow.realzero import is_unit

            assert is_unit(pulled[leaf].transition.num).is_yes


class TestSections:
    def test_bounded_space_forces_vanishing(self):
        b = bd.make_xi(1, 1)
        sections = bd.global_sections_bounded(b, 6, 2)
        assert sections
        for s in sections:
            assert s.s2.evaluate((0, 0)) == 0

    def test_canonical_section_of_k_one(self):
        b = bd.make_xi(1, 0)
        sections = bd.global_sections_bounded(b, 2, 1)
        want = (RatFunc(Poly.const(2, 1), P("x^2+y^2")), RatFunc.const(2, 1))
        assert any((s.s1, s.s2) == want for s in sections)

    def test_canonical_section_of_k_two_verifies(self):
        b = bd.make_xi(2, 0)
        sec = bd.make_section(b, RatFunc(Poly.const(2, 1), P("x^4+y^2")), RatFunc.const(2, 1))
        ans = bd.nowhere_vanishing(sec)
        assert ans.status == "yes"
        for cert in ans.certs:
            cert.validate()

    def test_unit_bundle_has_constant_sections(self):
        b = bd.make_xi(0, 0)
        sections = bd.global_sections_bounded(b, 2, 0)
        constants = [
            s
            for s in sections
            if s.s1.is_polynomial() and s.s1.as_poly().is_constant() and not s.s1.is_zero()
        ]
        assert constants
        for s in constants:
            assert s.s2 == s.s1 * b.transition

    def test_gluing_identity_enforced(self):
        b = bd.make_xi(1, 1)
        with pytest.raises(ValueError):
            bd.make_section(b, RatFunc.const(2, 1), RatFunc.const(2, 1))

    def test_section_pullback_still_verifies(self):
        b = bd.make_xi(1, 1)
        base_sec = bd.make_section(
            b, RatFunc.const(2, 1), RatFunc.from_poly(bd.transition_poly(1, 1))
        )
        t = geo.blowup_at(geo.base_tower(), "base", (0, 0))
        pulled = bd.pullback_bundle(t, b)
        for leaf in t.leaf_ids():
            g_raw = t.pull_ratfunc(leaf, b.transition)
            s1 = t.pull_ratfunc(leaf, base_sec.s1)
            s2 = t.pull_ratfunc(leaf, base_sec.s2)
            assert g_raw * s1 == s2

    def test_monotone_in_both_bounds(self):
        from cechblow.cech import _monomials_up_to, solution_space_union, _numerator_at_power

        b = bd.make_xi(1, 1)
        small = solution_space_union(b.covering, b.transition, 4, 1)
        large = solution_space_union(b.covering, b.transition, 5, 2)
        q1, q2 = b.covering.sets[0].q, b.covering.sets[1].q
        monos = _monomials_up_to(5 + 2 * 2)
        index = {e: t for t, e in enumerate(monos)}

        def vec(s1, s2):
            u1 = _numerator_at_power(s1, q1, 2)
            u2 = _numerator_at_power(s2, q2, 2)
            out = [Fraction(0)] * (2 * len(monos))
            for e, c in u1.terms.items():
                out[index[e]] = c
            for e, c in u2.terms.items():
                out[len(monos) + index[e]] = c
            return out

        big_vecs = [vec(s1, s2) for s1, s2 in large]
        for s1, s2 in small:
            assert in_span(big_vecs, vec(s1, s2))


class TestGeneratedAt:
    def test_away_from_base_points(self):
        b = bd.make_xi(1, 1)
        assert bd.generated_at(b, (2, 0), 6, 2)

    def test_at_forced_zero(self):
        b = bd.make_xi(1, 1)
        assert not bd.generated_at(b, (0, 0), 6, 2)

    def test_unit_bundle_generated_everywhere(self):
        b = bd.make_xi(0, 0)
        for pt in ((0, 0), (1, 0), (-2, 3)):
            assert bd.generated_at(b, pt, 2, 1)


class TestSearch:
    def test_one_one_found_at_depth_one(self):
        res = bd.search_trivializing_tower(1, 1, 2, 8, 2)
        assert res.status == "found" and res.depth == 1
        leaf_data = res.section.leaves
        for data in leaf_data.values():
            for cert in (data.cert1, data.cert2, *data.nv_certs):
                cert.validate()

    def test_trivial_family_found_at_depth_zero(self):
        assert bd.search_trivializing_tower(0, 5, 1, 6, 2).depth == 0
        assert bd.search_trivializing_tower(5, 0, 1, 6, 2).depth == 0

    def test_depth_zero_exhausts_for_one_one(self):
        res = bd.search_trivializing_tower(1, 1, 0, 8, 2)
        assert res.status == "not_found"
        assert all("forced to vanish" in verdict for _, verdict in res.audits)

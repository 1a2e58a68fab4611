"""Certified zero-set reasoning: positivity, finite zero lists, containment."""

from fractions import Fraction

import pytest

from cechblow.poly import Poly, RatFunc, poly_from_string
from cechblow import realzero as rz

XY = ["x", "y"]


def P(s):
    return poly_from_string(s, XY)


def pkl(k, l):
    return P("x") ** (2 * k) * P("x-1") ** (2 * l) + P("y") ** 2


Q1 = P("x^2+y^2")
Q2 = P("x^2-2*x+1+y^2")


class TestIsUnit:
    def test_forced_positivity(self):
        ans = rz.is_unit(P("x^2+y^2+1"))
        assert ans.is_yes
        ans.cert.validate()
        assert ans.cert.const > 0

    def test_zero_at_origin(self):
        ans = rz.is_unit(Q1)
        assert ans.status == "no"
        assert Q1.evaluate(ans.witness) == 0

    def test_stripped_unit_of_chart(self):
        ans = rz.is_unit(P("1+y^2"))
        assert ans.is_yes
        ans.cert.validate()

    def test_negative_definite(self):
        ans = rz.is_unit(P("-1") - P("x^2"))
        assert ans.is_yes


class TestZeroPoints:
    @pytest.mark.parametrize("k,l", [(1, 1), (2, 1), (1, 2), (3, 3)])
    def test_two_zeros_of_the_family(self, k, l):
        cert = rz.zero_points(pkl(k, l))
        assert cert is not None
        cert.validate()
        assert cert.points == ((Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)))

    def test_single_zero(self):
        cert = rz.zero_points(Q1)
        assert cert.points == ((Fraction(0), Fraction(0)),)
        cert2 = rz.zero_points(Q2)
        assert cert2.points == ((Fraction(1), Fraction(0)),)

    def test_declared_hint_is_replayed(self):
        dec = (P("x") * P("x-1"), P("y"))
        hint = rz.Declared(pkl(1, 1), decomposition=dec)
        cert = rz.zero_points(pkl(1, 1), hint)
        assert cert is not None and len(cert.points) == 2

    def test_bad_declared_hint_rejected(self):
        hint = rz.Declared(pkl(1, 1), decomposition=(P("x"), P("y")))
        with pytest.raises(rz.CertificateError):
            rz.zero_points(pkl(1, 1), hint)


class TestContains:
    def test_contained(self):
        inner = rz.zero_points(Q1)
        outer = rz.zero_points(pkl(1, 1))
        assert rz.contains(inner, outer).status == "yes"

    def test_not_contained_with_witness(self):
        inner = rz.zero_points(pkl(1, 1))
        outer = rz.zero_points(Q1)
        ans = rz.contains(inner, outer)
        assert ans.status == "no"
        assert ans.witness == (Fraction(1), Fraction(0))

    def test_empty_inside_anything(self):
        empty = rz.find_positivity(P("x^2+y^2+1"))
        assert rz.contains(empty, rz.zero_points(Q1)).status == "yes"

    def test_partial_order(self):
        a = rz.zero_points(Q1)
        b = rz.zero_points(pkl(1, 1))
        c = rz.zero_points(pkl(2, 2))
        assert rz.contains(a, a).status == "yes"
        assert rz.contains(a, b).status == "yes"
        assert rz.contains(b, c).status == "yes"
        assert rz.contains(a, c).status == "yes"  # transitivity endpoint
        # antisymmetry up to set equality
        assert rz.contains(b, c).status == "yes" and rz.contains(c, b).status == "yes"
        assert set(b.points) == set(c.points)


class TestCertifyRegular:
    def test_regular_on_own_complement(self):
        cert = rz.certify_regular(RatFunc(Poly.const(2, 1), Q1), Q1)
        cert.validate()

    def test_pole_inside_set(self):
        with pytest.raises(rz.NotRegular) as err:
            rz.certify_regular(RatFunc(Poly.const(2, 1), Q1), Q2)
        assert err.value.witness == (Fraction(0), Fraction(0))

    def test_two_point_containment(self):
        cert = rz.certify_regular(RatFunc(Poly.const(2, 1), pkl(1, 1)), Q1 * Q2)
        cert.validate()
        replayed = rz.RegularityCert.from_json(cert.to_json())
        replayed.validate()

    def test_line_zero_refuted(self):
        with pytest.raises(rz.NotRegular) as err:
            rz.certify_regular(RatFunc(Poly.const(2, 1), P("x")), P("y"))
        x0, y0 = err.value.witness
        assert x0 == 0 and y0 != 0


class TestCoverage:
    def test_standard_covering_positivity(self):
        cert = rz.coverage_certificate([Q1, Q2], 2)
        assert isinstance(cert, rz.EmptyByPositivity)
        cert.validate()
        assert cert.const == Fraction(1, 8)

    def test_power_four(self):
        cert = rz.sum_power_positivity([Q1, Q2], 4)
        cert.validate()
        assert cert.const == Fraction(1, 128)

    def test_unit_covering(self):
        cert = rz.coverage_certificate([Poly.const(2, 1)], 2)
        cert.validate()

    def test_non_covering_is_rejected(self):
        with pytest.raises(rz.CertificateError):
            rz.coverage_certificate([Q1, P("x^2+2*y^2")], 2)


class TestSampling:
    def test_certified_function_survives_grid(self):
        f = RatFunc(Poly.const(2, 1), pkl(1, 1))
        rz.certify_regular(f, Q1 * Q2)
        assert rz.sample_refute(f, Q1 * Q2) is None

    def test_pole_found_on_grid(self):
        w = rz.sample_refute(RatFunc(Poly.const(2, 1), P("x")), P("y"))
        assert w is not None and w[0] == 0 and w[1] != 0

    def test_uncovered_pole_found(self):
        w = rz.sample_refute(RatFunc(Poly.const(2, 1), pkl(1, 1)), Q1)
        assert w == (Fraction(1), Fraction(0))


def test_certificate_registry_collects():
    store = []
    with rz.collecting_certificates(store):
        rz.certify_regular(RatFunc(Poly.const(2, 1), Q1), Q1)
    assert len(store) >= 1 and isinstance(store[0], rz.RegularityCert)


def test_multiply_positivity():
    a = rz.find_positivity(P("1+y^2"))
    b = rz.find_positivity(P("x^2+1"))
    prod = rz.multiply_positivity(a, b)
    prod.validate()
    assert prod.subject == P("1+y^2") * P("x^2+1")

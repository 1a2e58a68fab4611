"""Rank-1 transition bundles on two-set coverings of the plane.

The family xi(k, l) has transition x^(2k) (x-1)^(2l) + y^2 on the covering by
the complements of (0,0) and (1,0).  Pullback along a blowup tower simplifies
the transition by stripping squared factors that cannot vanish on the overlap;
bounded section spaces are exact nullspaces; triviality is searched over
towers whose centers are the two bad points and their lifts on the first
blowup chart.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .poly import Poly, RatFunc, divide_exact, squarefree_decomposition, try_divide
from .realzero import (
    NotRegular,
    RegularityCert,
    Undecidable,
    certify_regular,
)
from .geometry import Covering, OpenSet, Tower, base_tower, blowup_at, make_covering, pullback_covering
from .cech import solution_space_union


def transition_poly(k: int, l: int) -> Poly:
    x = Poly.variable(2, 0)
    y = Poly.variable(2, 1)
    return x ** (2 * k) * (x - Poly.const(2, 1)) ** (2 * l) + y * y


def _point_complement_qs(k: int, l: int) -> tuple[Poly, Poly]:
    """Defining polynomials for the complements of the two bad points.

    The exponents are adapted to the bundle so that the canonical sections
    live in the bounded ansatz: V(x^(2k)+y^2) = {(0,0)} for every k >= 1.
    """
    x = Poly.variable(2, 0)
    y = Poly.variable(2, 1)
    q1 = x ** (2 * max(k, 1)) + y * y
    q2 = (x - Poly.const(2, 1)) ** (2 * max(l, 1)) + y * y
    return q1, q2


@dataclass(frozen=True)
class LineBundle:
    covering: Covering
    transition: RatFunc  # value of g_{21} on the overlap
    transition_cert: RegularityCert
    nonvanishing_cert: RegularityCert
    chart: str = "base"
    strip_log: tuple = ()

    @property
    def overlap_q(self) -> Poly:
        return self.covering.sets[0].q * self.covering.sets[1].q

    def to_json(self) -> dict:
        return {
            "covering": self.covering.to_json(),
            "transition": self.transition.to_json(),
            "transition_cert": self.transition_cert.to_json(),
            "nonvanishing_cert": self.nonvanishing_cert.to_json(),
            "chart": self.chart,
            "strip_log": [
                {"factor": f.to_json(), "exponent": e, "side": side} for f, e, side in self.strip_log
            ],
        }


def make_bundle(covering: Covering, transition: RatFunc, chart: str = "base", strip_log=()) -> LineBundle:
    if len(covering) != 2:
        raise ValueError("rank-1 bundles here live on two-set coverings")
    overlap = covering.sets[0].q * covering.sets[1].q
    t_cert = certify_regular(transition, overlap, chart)
    nv_cert = certify_regular(transition.invert(), overlap, chart)
    return LineBundle(covering, transition, t_cert, nv_cert, chart, tuple(strip_log))


def make_xi(k: int, l: int) -> LineBundle:
    """The bundle with transition x^(2k) (x-1)^(2l) + y^2 on the standard covering."""
    if k < 0 or l < 0:
        raise ValueError("need k, l >= 0")
    q1, q2 = _point_complement_qs(k, l)
    cov = make_covering([q1, q2])
    return make_bundle(cov, RatFunc.from_poly(transition_poly(k, l)))


@dataclass(frozen=True)
class BundleSection:
    bundle: LineBundle
    s1: RatFunc
    s2: RatFunc
    cert1: RegularityCert
    cert2: RegularityCert

    def to_json(self) -> dict:
        return {"s1": self.s1.to_json(), "s2": self.s2.to_json()}


def make_section(bundle: LineBundle, s1: RatFunc, s2: RatFunc) -> BundleSection:
    """Verify the gluing identity exactly and certify regularity of both sides."""
    if bundle.transition * s1 != s2:
        raise ValueError("gluing identity g*s1 = s2 fails")
    c1 = certify_regular(s1, bundle.covering.sets[0].q, bundle.chart)
    c2 = certify_regular(s2, bundle.covering.sets[1].q, bundle.chart)
    return BundleSection(bundle, s1, s2, c1, c2)


# ---------------------------------------------------------------------------
# Pullback with square stripping
# ---------------------------------------------------------------------------


def _strip_squares(g: RatFunc, overlap_q: Poly, chart: str):
    """Remove u^2 factors whose zeros avoid the overlap; returns (g', log).

    The log records (factor, exponent removed, side); the product of the
    removed factors squared times the simplified transition equals the raw
    transition exactly.
    """
    log = []
    num, den = g.num, g.den
    for side in ("num", "den"):
        poly = num if side == "num" else den
        if poly.is_constant():
            continue
        for part, mult in squarefree_decomposition(poly):
            if mult < 2 or part.is_constant():
                continue
            t = mult // 2
            try:
                certify_regular(RatFunc(Poly.const(2, 1), part), overlap_q, chart)
            except (NotRegular, Undecidable):
                continue
            strip = part ** (2 * t)
            poly = divide_exact(poly, strip)
            log.append((part, 2 * t, side))
        if side == "num":
            num = poly
        else:
            den = poly
    return RatFunc(num, den), log


def pullback_bundle(t: Tower, b: LineBundle) -> dict[str, LineBundle]:
    """Per-leaf pullback; transitions are simplified with a stripping log."""
    pulled_cov = pullback_covering(t, b.covering)
    out: dict[str, LineBundle] = {}
    for leaf, cov in pulled_cov.items():
        raw = t.pull_ratfunc(leaf, b.transition)
        overlap = cov.sets[0].q * cov.sets[1].q
        simplified, log = _strip_squares(raw, overlap, leaf)
        t_cert = certify_regular(simplified, overlap, leaf)
        nv_cert = certify_regular(simplified.invert(), overlap, leaf)
        out[leaf] = LineBundle(cov, simplified, t_cert, nv_cert, leaf, tuple(log))
    return out


def pullback_raw_transition(t: Tower, b: LineBundle, leaf: str) -> RatFunc:
    return t.pull_ratfunc(leaf, b.transition)


# ---------------------------------------------------------------------------
# Bounded global sections
# ---------------------------------------------------------------------------


def global_sections_bounded(b: LineBundle, deg_bound: int, power_bound: int) -> list[BundleSection]:
    """Exact basis of the bounded section space s_i = a_i / Q_i^N."""
    basis = solution_space_union(b.covering, b.transition, deg_bound, power_bound)
    out = []
    for s1, s2 in basis:
        out.append(make_section(b, s1, s2))
    return out


@dataclass(frozen=True)
class VanishingAnswer:
    status: str  # "yes" | "no"
    witness: Optional[tuple[Fraction, Fraction]] = None
    certs: tuple[RegularityCert, ...] = ()


def nowhere_vanishing(s: BundleSection) -> VanishingAnswer:
    """Certify that neither side's numerator vanishes inside its open set."""
    certs = []
    for value, open_q in (
        (s.s1, s.bundle.covering.sets[0].q),
        (s.s2, s.bundle.covering.sets[1].q),
    ):
        if value.is_zero():
            witness = _rational_point_in_complement(open_q)
            return VanishingAnswer("no", witness=witness)
        try:
            certs.append(certify_regular(value.invert(), open_q, s.bundle.chart))
        except NotRegular as e:
            return VanishingAnswer("no", witness=e.witness)
    return VanishingAnswer("yes", certs=tuple(certs))


def _rational_point_in_complement(open_q: Poly) -> Optional[tuple[Fraction, Fraction]]:
    for a in range(-3, 4):
        for bb in range(-3, 7):
            pt = (Fraction(a), Fraction(bb, 2))
            if open_q.evaluate(pt) != 0:
                return pt
    return None


def generated_at(b: LineBundle, point, deg_bound: int, power_bound: int) -> bool:
    """True when some bounded global section is nonzero at the point."""
    pt = (Fraction(point[0]), Fraction(point[1]))
    in_1 = b.covering.sets[0].q.evaluate(pt) != 0
    in_2 = b.covering.sets[1].q.evaluate(pt) != 0
    if not (in_1 or in_2):
        raise ValueError("point lies outside the covering's union")
    for section in global_sections_bounded(b, deg_bound, power_bound):
        value = section.s1 if in_1 else section.s2
        if value.evaluate(pt) != 0:
            return True
    return False


# ---------------------------------------------------------------------------
# Trivializing-tower search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TowerSectionLeaf:
    s1: RatFunc
    s2: RatFunc
    cert1: RegularityCert
    cert2: RegularityCert
    nv_certs: tuple[RegularityCert, ...]


@dataclass(frozen=True)
class TowerSection:
    tower: Tower
    leaves: dict[str, TowerSectionLeaf]


@dataclass(frozen=True)
class SearchResult:
    status: str  # "found" | "not_found"
    depth: int
    tower: Optional[Tower] = None
    section: Optional[TowerSection] = None
    audits: tuple = ()


def _chain_tower(centers: Sequence[tuple[int, int]]) -> Tower:
    """Blow up the newest first-chart leaf at each listed center in turn."""
    t = base_tower()
    leaf = "base"
    for c in centers:
        t = blowup_at(t, leaf, (Fraction(c[0]), Fraction(c[1])))
        leaf = t.steps[-1][2]  # continue on the new first chart
    return t


def _verify_tower_section(
    b: LineBundle, tower: Tower, s1: RatFunc, s2: RatFunc
) -> Optional[TowerSection]:
    """Pull a base pair through the tower; verify gluing, regularity and
    nonvanishing on every leaf.  Returns None when any check fails."""
    pulled_cov = pullback_covering(tower, b.covering)
    leaves: dict[str, TowerSectionLeaf] = {}
    for leaf in tower.leaf_ids():
        g = tower.pull_ratfunc(leaf, b.transition)
        v1 = tower.pull_ratfunc(leaf, s1)
        v2 = tower.pull_ratfunc(leaf, s2)
        if g * v1 != v2:
            return None
        cov = pulled_cov[leaf]
        try:
            c1 = certify_regular(v1, cov.sets[0].q, leaf)
            c2 = certify_regular(v2, cov.sets[1].q, leaf)
            nv = []
            for value, open_q in ((v1, cov.sets[0].q), (v2, cov.sets[1].q)):
                if value.is_zero():
                    return None
                nv.append(certify_regular(value.invert(), open_q, leaf))
        except (NotRegular, Undecidable):
            return None
        leaves[leaf] = TowerSectionLeaf(v1, v2, c1, c2, tuple(nv))
    return TowerSection(tower, leaves)


def _canonical_base_pair(k: int, l: int, side: str) -> tuple[RatFunc, RatFunc]:
    p = transition_poly(k, l)
    x = Poly.variable(2, 0)
    y = Poly.variable(2, 1)
    if side == "first":
        if k == 0:
            return RatFunc.const(2, 1), RatFunc.from_poly(p)
        den = x ** (2 * k) + y * y
        return RatFunc(Poly.const(2, 1), den), RatFunc(p, den)
    if l == 0:
        if k == 0:
            return RatFunc.const(2, 1), RatFunc.from_poly(p)
        den = x ** (2 * k) + y * y
        return RatFunc(Poly.const(2, 1), den), RatFunc(p, den)
    den = (x - Poly.const(2, 1)) ** (2 * l) + y * y
    return RatFunc(den, p), RatFunc.from_poly(den)


def _forced_zero_on_leaf(
    b: LineBundle, tower: Tower, leaf: str, deg_bound: int, power_bound: int
) -> Optional[tuple[Fraction, Fraction]]:
    """A point of the leaf where every bounded section of the pulled bundle
    vanishes, if the exact nullspace forces one."""
    pulled_cov = pullback_covering(tower, b.covering)[leaf]
    g = tower.pull_ratfunc(leaf, b.transition)
    basis = solution_space_union(pulled_cov, g, deg_bound, power_bound)
    candidates = [
        (Fraction(0), Fraction(0)),
        (Fraction(1), Fraction(0)),
    ]
    for pt in candidates:
        q1v = pulled_cov.sets[0].q.evaluate(pt)
        q2v = pulled_cov.sets[1].q.evaluate(pt)
        if q1v == 0 and q2v == 0:
            continue
        all_zero = True
        for s1, s2 in basis:
            value = s1 if q1v != 0 else s2
            if value.evaluate(pt) != 0:
                all_zero = False
                break
        if all_zero:
            return pt
    return None


def search_trivializing_tower(
    k: int, l: int, max_depth: int, deg_bound: int, power_bound: int
) -> SearchResult:
    """Breadth-first search for a tower carrying a nowhere-vanishing section.

    Centers are restricted to the two bad points and their lifts on the first
    blowup chart, so candidate towers at depth d are the 2^d center chains.
    A tower counts as trivializing only when an explicit section verifies; a
    tower is rejected when the exact bounded section space of its deepest
    first-chart leaf is forced to vanish at a bad point.
    """
    b = make_xi(k, l)
    audits = []
    for depth in range(0, max_depth + 1):
        chains = [()] if depth == 0 else list(itertools.product([(0, 0), (1, 0)], repeat=depth))
        for centers in chains:
            tower = _chain_tower(centers)
            c1_count = sum(1 for c in centers if c == (0, 0))
            c2_count = depth - c1_count
            section = None
            if c1_count >= k and c2_count == 0:
                s1, s2 = _canonical_base_pair(k, l, "first")
                section = _verify_tower_section(b, tower, s1, s2)
            elif c2_count >= l and c1_count == 0:
                s1, s2 = _canonical_base_pair(k, l, "second")
                section = _verify_tower_section(b, tower, s1, s2)
            if section is not None:
                audits.append((centers, "section verified"))
                return SearchResult("found", depth, tower, section, tuple(audits))
            final_leaf = tower.leaf_ids()[-1] if depth else "base"
            forced = _forced_zero_on_leaf(b, tower, final_leaf, deg_bound, power_bound)
            if forced is not None:
                audits.append((centers, f"bounded sections forced to vanish at {forced}"))
            else:
                audits.append((centers, "no verified section and no forced zero"))
    return SearchResult("not_found", max_depth, audits=tuple(audits))

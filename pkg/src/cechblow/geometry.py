"""Planar charts, Zariski open sets, point blowups and blowup towers.

A tower is an ordered list of point blowups of two-dimensional charts.  Each
blowup replaces one leaf chart by two new charts glued along the standard
maps: for a center (a, b) the first chart maps by (r, s) -> (r, b + (r-a)s)
and the second by (r, s) -> (a + (s-b)r, s).  Pullbacks along towers are exact
polynomial substitutions; non-leaf charts are retained so certificates can be
replayed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .poly import (
    DenominatorCollapse,
    IndeterminateAtPoint,
    Poly,
    PoleAtPoint,
    RatFunc,
    divide_exact,
    format_fraction,
    parse_fraction,
    squarefree_decomposition,
    try_divide,
)
from . import realzero
from .realzero import (
    EmptyByPositivity,
    FinitePoints,
    NonRationalZeros,
    RegularityCert,
    SmoothFactors,
    ZeroCert,
    certify_regular,
    common_rational_zeros,
    coverage_certificate,
    make_zero_cert,
)

Point = tuple[Fraction, Fraction]


class UnknownChart(KeyError):
    pass


class NotFactored(TypeError):
    """snc_at_point needs a SmoothFactors certificate."""


class NonRationalCritical(Exception):
    def __init__(self, eliminant: Poly):
        super().__init__(f"critical point is not rational; eliminant {eliminant.render()}")
        self.eliminant = eliminant


class ChainViolation(Exception):
    """Internal consistency failure: pulled-back exponents are incomparable."""


def _pt(point) -> Point:
    x, y = point
    return (Fraction(x), Fraction(y))


# ---------------------------------------------------------------------------
# Charts and towers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Chart:
    id: str
    names: tuple[str, str]
    parent: Optional[str] = None
    center: Optional[Point] = None
    which: Optional[str] = None  # "one" | "two"
    map_to_parent: Optional[tuple[Poly, Poly]] = None


def _child_maps(center: Point) -> tuple[tuple[Poly, Poly], tuple[Poly, Poly]]:
    a, b = center
    r = Poly.variable(2, 0)
    s = Poly.variable(2, 1)
    one = (r, Poly.const(2, b) + (r - Poly.const(2, a)) * s)
    two = (Poly.const(2, a) + (s - Poly.const(2, b)) * r, s)
    return one, two


class Tower:
    """Immutable blowup tower over a two-variable base chart."""

    def __init__(self, base_names=("x", "y")):
        self.base = Chart("base", tuple(base_names))
        self.charts: dict[str, Chart] = {"base": self.base}
        self.steps: list[tuple[str, Point, str, str]] = []
        self._maps_to_base: dict[str, tuple[Poly, Poly]] = {
            "base": (Poly.variable(2, 0), Poly.variable(2, 1))
        }

    def _copy(self) -> "Tower":
        t = Tower.__new__(Tower)
        t.base = self.base
        t.charts = dict(self.charts)
        t.steps = list(self.steps)
        t._maps_to_base = dict(self._maps_to_base)
        return t

    @property
    def depth(self) -> int:
        return len(self.steps)

    def blown_chart_ids(self) -> set[str]:
        return {s[0] for s in self.steps}

    def leaf_ids(self) -> list[str]:
        blown = self.blown_chart_ids()
        order = ["base"] + [cid for step in self.steps for cid in (step[2], step[3])]
        return [cid for cid in order if cid not in blown]

    def chart(self, chart_id: str) -> Chart:
        try:
            return self.charts[chart_id]
        except KeyError:
            raise UnknownChart(chart_id) from None

    def map_to_base(self, chart_id: str) -> tuple[Poly, Poly]:
        self.chart(chart_id)
        return self._maps_to_base[chart_id]

    def step_for_chart(self, chart_id: str):
        for step in self.steps:
            if step[0] == chart_id:
                return step
        return None

    def parent_chain(self, chart_id: str) -> list[str]:
        chain = [chart_id]
        while self.charts[chain[-1]].parent is not None:
            chain.append(self.charts[chain[-1]].parent)
        return chain

    def pull_poly(self, chart_id: str, p: Poly) -> Poly:
        return p.compose(list(self.map_to_base(chart_id)))

    def pull_ratfunc(self, chart_id: str, f: RatFunc) -> RatFunc:
        return f.substitute_polys(list(self.map_to_base(chart_id)))

    def to_json(self) -> dict:
        return {
            "base": self.base.id,
            "steps": [
                {"chart": cid, "center": [format_fraction(c) for c in center]}
                for cid, center, _, _ in self.steps
            ],
        }

    @classmethod
    def from_json(cls, data: dict, base_names=("x", "y")) -> "Tower":
        t = cls(base_names)
        for step in data["steps"]:
            t = blowup_at(t, step["chart"], tuple(parse_fraction(c) for c in step["center"]))
        return t

    def __repr__(self) -> str:
        inner = "; ".join(f"{cid}@({c[0]},{c[1]})" for cid, c, _, _ in self.steps)
        return f"Tower[{inner}]"


def base_tower(names=("x", "y")) -> Tower:
    return Tower(names)


def blowup_at(t: Tower, leaf: str, center) -> Tower:
    """Blow up one leaf chart at a rational point; the leaf stops being a leaf."""
    center = _pt(center)
    chart = t.chart(leaf)
    if leaf in t.blown_chart_ids():
        raise UnknownChart(f"{leaf} has already been blown up")
    out = t._copy()
    k = len(out.steps) + 1
    one_id, two_id = f"s{k}a", f"s{k}b"
    map_one, map_two = _child_maps(center)
    names = (f"r{k}", f"s{k}")
    out.charts[one_id] = Chart(one_id, names, leaf, center, "one", map_one)
    out.charts[two_id] = Chart(two_id, names, leaf, center, "two", map_two)
    parent_map = out._maps_to_base[leaf]
    for cid, mp in ((one_id, map_one), (two_id, map_two)):
        out._maps_to_base[cid] = (
            parent_map[0].compose(list(mp)),
            parent_map[1].compose(list(mp)),
        )
    out.steps.append((leaf, center, one_id, two_id))
    return out


def pullback_function(t: Tower, f: RatFunc) -> dict[str, RatFunc]:
    """Exact pullback of a base rational function to every leaf chart."""
    return {leaf: t.pull_ratfunc(leaf, f) for leaf in t.leaf_ids()}


# ---------------------------------------------------------------------------
# Open sets and coverings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OpenSet:
    """Complement of V(q) in a chart."""

    chart: str
    q: Poly
    q_cert: ZeroCert

    def to_json(self) -> dict:
        return {"chart": self.chart, "Q": self.q.to_json(), "q_cert": self.q_cert.to_json()}


def open_set(q: Poly, chart: str = "base") -> OpenSet:
    if q.is_zero():
        raise ValueError("an open set needs a nonzero defining polynomial")
    return OpenSet(chart, q, make_zero_cert(q))


@dataclass(frozen=True)
class Covering:
    chart: str
    sets: tuple[OpenSet, ...]
    coverage_cert: ZeroCert
    coverage_power: int

    @property
    def qs(self) -> list[Poly]:
        return [u.q for u in self.sets]

    def __len__(self) -> int:
        return len(self.sets)

    def to_json(self) -> dict:
        return {
            "chart": self.chart,
            "sets": [u.to_json() for u in self.sets],
            "coverage_cert": self.coverage_cert.to_json(),
            "coverage_power": self.coverage_power,
        }


def make_covering(qs: Sequence[Poly], chart: str = "base", power: int = 2) -> Covering:
    sets = tuple(open_set(q, chart) for q in qs)
    cert = coverage_certificate(list(qs), power)
    return Covering(chart, sets, cert, power)


def pullback_openset(t: Tower, u: OpenSet) -> dict[str, OpenSet]:
    out = {}
    for leaf in t.leaf_ids():
        q = t.pull_poly(leaf, u.q)
        if q.is_zero():
            raise DenominatorCollapse("open set pulled back to the empty set")
        out[leaf] = open_set(q, leaf)
    return out


def _pull_coverage_cert(t: Tower, leaf: str, cov: Covering) -> ZeroCert:
    cert = cov.coverage_cert
    if isinstance(cert, EmptyByPositivity):
        subject = t.pull_poly(leaf, cert.subject)
        sos = tuple(t.pull_poly(leaf, f) for f in cert.sos_terms)
        pulled = EmptyByPositivity(subject, sos, cert.const)
        pulled.validate()
        return pulled
    pulled_qs = [t.pull_poly(leaf, q) for q in cov.qs]
    return coverage_certificate(pulled_qs, cov.coverage_power)


def pullback_covering(t: Tower, cov: Covering) -> dict[str, Covering]:
    """Per-leaf pullback; positivity certificates transport exactly."""
    out = {}
    for leaf in t.leaf_ids():
        sets = tuple(open_set(t.pull_poly(leaf, u.q), leaf) for u in cov.sets)
        cert = _pull_coverage_cert(t, leaf, cov)
        out[leaf] = Covering(leaf, sets, cert, cov.coverage_power)
    return out


# ---------------------------------------------------------------------------
# Common refinement of two towers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChartMap:
    """A chart of one tower mapped into a chart of another tower."""

    source: str
    target: str
    components: tuple[RatFunc, RatFunc]
    quality: str  # "identity" | "polynomial" | "unit_denominator" | "dense"


@dataclass(frozen=True)
class Refinement:
    tower: Tower
    to_first: dict[str, ChartMap]
    to_second: dict[str, ChartMap]


@dataclass(frozen=True)
class Incomparable:
    reason: str


def _descend_sites(t: Tower, chart_id: str, pt: Point):
    """Leaf representatives of a point given in the coordinates of chart_id.

    Returns ("existing", step) when the point is itself a blown-up center,
    otherwise a list of (leaf_id, point-in-leaf-coordinates).
    """
    step = t.step_for_chart(chart_id)
    if step is None:
        return [(chart_id, pt)]
    _, center, one_id, two_id = step
    if center == pt:
        return ("existing", step)
    a, b = center
    px, py = pt
    sites: list[tuple[str, Point]] = []
    if px != a:
        got = _descend_sites(t, one_id, (px, (py - b) / (px - a)))
        if isinstance(got, tuple):
            return got
        sites.extend(got)
    if py != b:
        got = _descend_sites(t, two_id, ((px - a) / (py - b), py))
        if isinstance(got, tuple):
            return got
        sites.extend(got)
    return sites


def _invert_chain(t: Tower, leaf: str, base_pair: tuple[RatFunc, RatFunc]) -> tuple[RatFunc, RatFunc]:
    """Apply the chart-wise inverse of the composed map of ``leaf`` to a pair."""
    chain = t.parent_chain(leaf)[:-1]  # leaf ... up to (not incl.) base
    x, y = base_pair
    # walk from base down to leaf, inverting one blowup chart at a time
    for cid in reversed(chain):
        chart = t.charts[cid]
        a, b = chart.center
        ca = RatFunc.const(2, a)
        cb = RatFunc.const(2, b)
        if chart.which == "one":
            x, y = x, (y - cb) / (x - ca)
        else:
            x, y = (x - ca) / (y - cb), y
    return x, y


def _map_quality(components: tuple[RatFunc, RatFunc]) -> str:
    if all(c.is_polynomial() for c in components):
        return "polynomial"
    worst = "unit_denominator"
    for c in components:
        if c.is_polynomial():
            continue
        if not realzero.is_unit(c.den).is_yes:
            worst = "dense"
    return worst


def _leaf_map_between(big: Tower, leaf: str, small: Tower) -> Optional[ChartMap]:
    """Best map from a leaf of ``big`` into some leaf of ``small``."""
    mx, my = big.map_to_base(leaf)
    base_pair = (RatFunc.from_poly(mx), RatFunc.from_poly(my))
    best: Optional[ChartMap] = None
    rank = {"identity": 0, "polynomial": 1, "unit_denominator": 2, "dense": 3}
    for target in small.leaf_ids():
        try:
            comps = _invert_chain(small, target, base_pair)
        except (ZeroDivisionError, DenominatorCollapse):
            continue
        tx, ty = small.map_to_base(target)
        try:
            back_x = RatFunc.from_poly(tx).substitute(list(comps))
            back_y = RatFunc.from_poly(ty).substitute(list(comps))
        except (DenominatorCollapse, ZeroDivisionError):
            continue
        if back_x != base_pair[0] or back_y != base_pair[1]:
            continue
        quality = _map_quality(comps)
        cand = ChartMap(leaf, target, comps, quality)
        if best is None or rank[quality] < rank[best.quality]:
            best = cand
    return best


def common_refinement(a: Tower, b: Tower):
    """Replay b's centers on top of a; returns Refinement or Incomparable."""
    if a.base.names != b.base.names:
        return Incomparable("towers live over different base charts")
    c = a._copy()
    phi: dict[str, str] = {"base": "base"}
    unsafe: set[str] = set()
    for chart_id, center, one_id, two_id in b.steps:
        if chart_id in unsafe:
            return Incomparable(
                f"cannot replay a center on chart {chart_id}: its lift was not a single point"
            )
        target = phi.get(chart_id)
        if target is None:
            return Incomparable(f"chart {chart_id} has no counterpart in the refinement")
        got = _descend_sites(c, target, center)
        if isinstance(got, tuple) and got[0] == "existing":
            step = got[1]
            phi[one_id] = step[2]
            phi[two_id] = step[3]
            continue
        sites = got
        if not sites:
            return Incomparable(f"center {center} has no rational lift in the leaf atlas")
        first_new = None
        for leaf, p in sites:
            c = blowup_at(c, leaf, p)
            if first_new is None:
                first_new = c.steps[-1]
        exact = len(sites) == 1 and sites[0] == (target, center)
        phi[one_id] = first_new[2]
        phi[two_id] = first_new[3]
        if not exact:
            unsafe.add(one_id)
            unsafe.add(two_id)
    to_a: dict[str, ChartMap] = {}
    to_b: dict[str, ChartMap] = {}
    a_leaves = set(a.leaf_ids())
    for leaf in c.leaf_ids():
        # map into a: walk up to the first chart that is a leaf of a
        chain = c.parent_chain(leaf)
        anchor = next((cid for cid in chain if cid in a_leaves), None)
        if anchor is None:
            return Incomparable(f"leaf {leaf} has no ancestor among the first tower's leaves")
        if anchor == leaf:
            ident = (RatFunc.variable(2, 0), RatFunc.variable(2, 1))
            to_a[leaf] = ChartMap(leaf, anchor, ident, "identity")
        else:
            # compose map_to_parent from the leaf up to (excluding) the anchor
            comps: tuple[Poly, Poly] = (Poly.variable(2, 0), Poly.variable(2, 1))
            for cid in chain[: chain.index(anchor)]:
                mp = c.charts[cid].map_to_parent
                comps = (mp[0].compose(list(comps)), mp[1].compose(list(comps)))
            to_a[leaf] = ChartMap(
                leaf,
                anchor,
                (RatFunc.from_poly(comps[0]), RatFunc.from_poly(comps[1])),
                "polynomial",
            )
        m = _leaf_map_between(c, leaf, b)
        if m is None:
            return Incomparable(f"leaf {leaf} does not map into the second tower")
        to_b[leaf] = m
    return Refinement(c, to_a, to_b)


# ---------------------------------------------------------------------------
# Simple-normal-crossing testing and transformation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SncAnswer:
    status: str  # "unit" | "snc" | "not_snc"
    point: Point
    vanishing: tuple[tuple[Poly, int], ...] = ()
    unit_part: tuple[tuple[Poly, int], ...] = ()
    reason: str = ""

    @property
    def alpha(self) -> tuple[int, ...]:
        return tuple(m for _, m in self.vanishing)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "point": [format_fraction(c) for c in self.point],
            "alpha": list(self.alpha),
            "vanishing": [[f.to_json(), m] for f, m in self.vanishing],
            "reason": self.reason,
        }


def snc_at_point(cert: ZeroCert, point) -> SncAnswer:
    """Transversality test for a factored polynomial at one rational point."""
    if not isinstance(cert, SmoothFactors):
        raise NotFactored("need a SmoothFactors certificate")
    point = _pt(point)
    vanishing = []
    unit_part = []
    for f, m in cert.factors:
        if f.evaluate(point) == 0:
            vanishing.append((f, m))
        else:
            unit_part.append((f, m))
    if not vanishing:
        return SncAnswer("unit", point, unit_part=tuple(unit_part))
    if len(vanishing) > 2:
        return SncAnswer(
            "not_snc", point, tuple(vanishing), tuple(unit_part), "more than two factors vanish"
        )
    grads = []
    for f, _ in vanishing:
        g = (f.derivative(0).evaluate(point), f.derivative(1).evaluate(point))
        if g == (Fraction(0), Fraction(0)):
            return SncAnswer(
                "not_snc",
                point,
                tuple(vanishing),
                tuple(unit_part),
                f"factor {f.render()} is singular at the point",
            )
        grads.append(g)
    if len(grads) == 2:
        det = grads[0][0] * grads[1][1] - grads[0][1] * grads[1][0]
        if det == 0:
            return SncAnswer(
                "not_snc", point, tuple(vanishing), tuple(unit_part), "tangential factors"
            )
    return SncAnswer("snc", point, tuple(vanishing), tuple(unit_part))


def _critical_points(factors: list[tuple[Poly, int]]) -> list[Point]:
    """Rational pairwise intersections and singular points of the factors."""
    pts: set[Point] = set()
    try:
        for i in range(len(factors)):
            for j in range(i + 1, len(factors)):
                got = common_rational_zeros([factors[i][0], factors[j][0]])
                if got:
                    pts.update(got)
            f = factors[i][0]
            got = common_rational_zeros([f, f.derivative(0), f.derivative(1)])
            if got:
                pts.update(got)
    except NonRationalZeros as e:
        raise NonRationalCritical(e.eliminant) from None
    return sorted(pts)


def vanishing_order_at(f: Poly, point) -> int:
    """Order of vanishing of f at a point (smallest degree after recentering)."""
    point = _pt(point)
    if f.is_zero():
        raise ValueError("order of the zero polynomial")
    x = Poly.variable(2, 0) + Poly.const(2, point[0])
    y = Poly.variable(2, 1) + Poly.const(2, point[1])
    shifted = f.compose([x, y])
    return min(sum(e) for e in shifted.terms)


@dataclass
class _FactorState:
    factors: list[tuple[Poly, int]]
    constant: Fraction

    def product(self) -> Poly:
        acc = Poly.const(2, self.constant)
        for f, m in self.factors:
            acc = acc * f**m
        return acc

    def cert(self, subject: Poly) -> SmoothFactors:
        return SmoothFactors(subject, tuple(self.factors), self.constant)


def _pull_factor_state(state: _FactorState, chart: Chart) -> _FactorState:
    """Strict transforms of all factors plus the new exceptional coordinate."""
    a, b = chart.center
    if chart.which == "one":
        exc = Poly.variable(2, 0) - Poly.const(2, a)
    else:
        exc = Poly.variable(2, 1) - Poly.const(2, b)
    new_factors: list[tuple[Poly, int]] = []
    exc_mult = 0
    constant = state.constant
    for f, m in state.factors:
        g = f.compose(list(chart.map_to_parent))
        k = 0
        while True:
            q = try_divide(g, exc)
            if q is None:
                break
            g = q
            k += 1
        exc_mult += m * k
        if g.is_constant():
            constant *= g.constant_value() ** m
        else:
            new_factors.append((g, m))
    if exc_mult:
        new_factors.insert(0, (exc, exc_mult))
    return _FactorState(new_factors, constant)


@dataclass(frozen=True)
class ResolveResult:
    status: str  # "resolved" | "depth_exceeded"
    tower: Tower
    reports: dict[str, list[SncAnswer]]
    factor_states: dict[str, SmoothFactors]
    depth: int


def coprime_refine(factors: list[tuple[Poly, int]]) -> list[tuple[Poly, int]]:
    """Gcd-based refinement into pairwise coprime normalized factors."""
    work: dict[Poly, int] = {}
    queue = [(f.normalized(), m) for f, m in factors if not f.is_constant()]
    for f, m in queue:
        work[f] = work.get(f, 0) + m
    changed = True
    while changed:
        changed = False
        items = sorted(work.items(), key=lambda t: t[0].key())
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                (fi, mi), (fj, mj) = items[i], items[j]
                from .poly import gcd as poly_gcd

                g = poly_gcd(fi, fj)
                if g.is_constant():
                    continue
                work.pop(fi)
                work.pop(fj)
                for part, mult in (
                    (divide_exact(fi, g).normalized(), mi),
                    (divide_exact(fj, g).normalized(), mj),
                    (g, mi + mj),
                ):
                    if not part.is_constant():
                        work[part] = work.get(part, 0) + mult
                changed = True
                break
            if changed:
                break
    return sorted(work.items(), key=lambda t: t[0].key())


def transform_to_snc(
    p: Poly, max_depth: int, factors: Optional[list[tuple[Poly, int]]] = None
) -> ResolveResult:
    """Blow up points until the pulled-back polynomial is a simple normal
    crossing at every critical point of every leaf chart.

    ``factors`` optionally supplies a factored form of p (made pairwise
    coprime here); by default the square-free decomposition is used.
    """
    if p.is_zero():
        raise ValueError("cannot resolve the zero polynomial")
    tower = base_tower()
    if factors is None:
        parts: list[tuple[Poly, int]] = list(squarefree_decomposition(p))
    else:
        refined = []
        for f, m in factors:
            for g, k in squarefree_decomposition(f):
                refined.append((g, k * m))
        parts = coprime_refine(refined)
    lead = divide_exact(p, _factor_product(parts))
    if not lead.is_constant():
        raise ValueError("supplied factors do not multiply to the polynomial")
    states: dict[str, _FactorState] = {
        "base": _FactorState(list(parts), lead.constant_value())
    }
    while True:
        bad: list[tuple[int, int, Fraction, Fraction, str, Point]] = []
        reports: dict[str, list[SncAnswer]] = {}
        for idx, leaf in enumerate(tower.leaf_ids()):
            state = states[leaf]
            subject = state.cert(state.product())
            answers = []
            for pt in _critical_points(state.factors):
                ans = snc_at_point(subject, pt)
                answers.append(ans)
                if ans.status == "not_snc":
                    mult = sum(
                        m * vanishing_order_at(f, pt) for f, m in state.factors
                        if f.evaluate(pt) == 0
                    )
                    bad.append((mult, idx, pt[0], pt[1], leaf, pt))
            reports[leaf] = answers
        if not bad:
            certs = {leaf: states[leaf].cert(states[leaf].product()) for leaf in tower.leaf_ids()}
            return ResolveResult("resolved", tower, reports, certs, tower.depth)
        if tower.depth >= max_depth:
            certs = {leaf: states[leaf].cert(states[leaf].product()) for leaf in tower.leaf_ids()}
            return ResolveResult("depth_exceeded", tower, reports, certs, tower.depth)
        bad.sort()
        _, _, _, _, leaf, pt = bad[0]
        tower = blowup_at(tower, leaf, pt)
        step = tower.steps[-1]
        for cid in (step[2], step[3]):
            states[cid] = _pull_factor_state(states[leaf], tower.charts[cid])


def _factor_product(parts) -> Poly:
    acc = Poly.const(2, 1)
    for f, m in parts:
        acc = acc * f**m
    return acc


# ---------------------------------------------------------------------------
# Division ordering of pulled-back functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentChain:
    chart: str
    point: Point
    local_coords: tuple[Poly, ...]
    exponents: tuple[tuple[int, ...], ...]  # one vector per input polynomial


@dataclass(frozen=True)
class OrderResult:
    status: str  # "ordered" | "depth_exceeded"
    tower: Tower
    chains: tuple[ExponentChain, ...]
    depth: int


def _order_along(value: RatFunc, coord: Poly, point: Point) -> tuple[int, RatFunc]:
    """Largest k with value/coord^k regular at the point, plus the quotient."""
    k = 0
    cur = value
    coord_rf = RatFunc.from_poly(coord)
    while True:
        nxt = cur / coord_rf
        if nxt.den.evaluate(point) == 0:
            return k, cur
        cur = nxt
        k += 1
        if k > 512:
            raise ChainViolation("runaway order extraction")


def order_by_division(fs: Sequence[Poly], max_depth: int) -> OrderResult:
    """Resolve the product of the inputs and their pairwise differences, then
    check that the pulled-back inputs have comparable exponent vectors at
    every critical point."""
    fs = list(fs)
    if any(f.is_zero() for f in fs):
        raise ValueError("inputs must be nonzero")
    prod = Poly.const(2, 1)
    pieces: list[tuple[Poly, int]] = []
    for f in fs:
        prod = prod * f
        pieces.append((f, 1))
    for i in range(len(fs)):
        for j in range(i + 1, len(fs)):
            d = fs[i] - fs[j]
            if d.is_zero():
                raise ValueError("inputs must be pairwise distinct")
            prod = prod * d
            pieces.append((d, 1))
    res = transform_to_snc(prod, max_depth, factors=pieces)
    if res.status != "resolved":
        return OrderResult("depth_exceeded", res.tower, (), res.depth)
    chains: list[ExponentChain] = []
    for leaf, answers in res.reports.items():
        mp = res.tower.map_to_base(leaf)
        pulled = [RatFunc.from_poly(f.compose(list(mp))) for f in fs]
        for ans in answers:
            if ans.status == "unit":
                continue
            coords = tuple(f for f, _ in ans.vanishing)
            vectors = []
            for g in pulled:
                exps = []
                cur = g
                for coord in coords:
                    k, cur = _order_along(cur, coord, ans.point)
                    exps.append(k)
                if cur.evaluate(ans.point) == 0:
                    raise ChainViolation(
                        f"residual of a pulled-back input still vanishes at {ans.point}"
                    )
                vectors.append(tuple(exps))
            for i in range(len(vectors)):
                for j in range(i + 1, len(vectors)):
                    vi, vj = vectors[i], vectors[j]
                    if not (
                        all(x <= y for x, y in zip(vi, vj))
                        or all(y <= x for x, y in zip(vi, vj))
                    ):
                        raise ChainViolation(
                            f"incomparable exponents {vi} and {vj} at {ans.point} on {leaf}"
                        )
            chains.append(ExponentChain(leaf, ans.point, coords, tuple(vectors)))
    return OrderResult("ordered", res.tower, tuple(chains), res.depth)


# ---------------------------------------------------------------------------
# Limit sections
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitSection:
    """A function on the pullback of one base open set, given per leaf chart."""

    tower: Tower
    base_open_q: Poly
    values: dict[str, RatFunc]
    certs: dict[str, RegularityCert]


def limit_section(tower: Tower, base_open_q: Poly, values: dict[str, RatFunc]) -> LimitSection:
    certs = {}
    for leaf in tower.leaf_ids():
        if leaf not in values:
            raise ValueError(f"missing value on leaf {leaf}")
        q = tower.pull_poly(leaf, base_open_q)
        certs[leaf] = certify_regular(values[leaf], q, leaf)
    return LimitSection(tower, base_open_q, dict(values), certs)


def section_from_base(tower: Tower, base_open_q: Poly, f: RatFunc) -> LimitSection:
    return limit_section(tower, base_open_q, pullback_function(tower, f))


def section_coherent(s: LimitSection) -> bool:
    """Exact agreement of the per-leaf values under all chart transitions."""
    leaves = s.tower.leaf_ids()
    for i in range(len(leaves)):
        for j in range(len(leaves)):
            if i == j:
                continue
            li, lj = leaves[i], leaves[j]
            mx, my = s.tower.map_to_base(li)
            try:
                comps = _invert_chain(
                    s.tower, lj, (RatFunc.from_poly(mx), RatFunc.from_poly(my))
                )
                transported = s.values[lj].substitute(list(comps))
            except (DenominatorCollapse, ZeroDivisionError):
                continue
            if transported != s.values[li]:
                return False
    return True


def limit_eq(s: LimitSection, t: LimitSection):
    """Compare two limit sections after pulling to a common refinement.

    Returns "equal", "not_equal", or an Incomparable value.
    """
    if s.base_open_q != t.base_open_q:
        raise ValueError("sections live on different base open sets")
    ref = common_refinement(s.tower, t.tower)
    if isinstance(ref, Incomparable):
        return ref
    for leaf in ref.tower.leaf_ids():
        ma = ref.to_first[leaf]
        mb = ref.to_second[leaf]
        va = s.values[ma.target].substitute(list(ma.components))
        vb = t.values[mb.target].substitute(list(mb.components))
        if va != vb:
            return "not_equal"
    return "equal"


def extend_section(s: LimitSection, deeper: Tower) -> LimitSection:
    """Pull a section to a tower that literally extends its own tower."""
    for step in s.tower.steps:
        if step not in deeper.steps:
            raise ValueError("target tower does not extend the section's tower")
    values = {}
    for leaf in deeper.leaf_ids():
        chain = deeper.parent_chain(leaf)
        anchor = next((cid for cid in chain if cid in s.values), None)
        if anchor is None:
            raise ValueError(f"leaf {leaf} has no ancestor carrying a value")
        comps: tuple[Poly, Poly] = (Poly.variable(2, 0), Poly.variable(2, 1))
        for cid in chain[: chain.index(anchor)]:
            mp = deeper.charts[cid].map_to_parent
            comps = (mp[0].compose(list(comps)), mp[1].compose(list(comps)))
        values[leaf] = s.values[anchor].substitute_polys(list(comps))
    return limit_section(deeper, s.base_open_q, values)

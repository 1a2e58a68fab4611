"""Cochains on finite coverings, the alternating differential, bounded
coboundary solving, power extension, and the cocycle solver that blows up
obstruction points until a preimage with certified regularity exists.

Index tuples are stored non-decreasing (repeats allowed), matching the
product over 1 <= i0 <= ... <= iq <= n; the differential supplies the
alternating signs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .poly import Poly, RatFunc, divide_exact, try_divide
from ._linalg import solve_system
from . import realzero
from .realzero import (
    EmptyByPositivity,
    FactorEvidence,
    FinitePoints,
    RegularityCert,
    Undecidable,
    ZeroCert,
    cert_from_evidence,
    certify_regular,
    coverage_certificate,
    is_unit,
    multiply_positivity,
    sum_power_positivity,
    zero_points,
)
from .geometry import (
    Covering,
    OpenSet,
    Tower,
    base_tower,
    blowup_at,
    make_covering,
    pullback_covering,
)

Index = tuple[int, ...]


def index_tuples(n: int, degree: int) -> list[Index]:
    """All non-decreasing (degree+1)-tuples over 1..n."""
    return list(itertools.combinations_with_replacement(range(1, n + 1), degree + 1))


def overlap_poly(cov: Covering, idx: Index) -> Poly:
    acc = Poly.const(2, 1)
    for i in sorted(set(idx)):
        acc = acc * cov.sets[i - 1].q
    return acc


@dataclass(frozen=True)
class Cochain:
    covering: Covering
    degree: int
    values: dict[Index, RatFunc]
    mode: str = "rational"  # "rational" | "regular"
    certs: Optional[dict[Index, RegularityCert]] = None

    def value(self, idx: Index) -> RatFunc:
        return self.values[idx]

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values.values())

    def to_json(self) -> dict:
        out = {
            "degree": self.degree,
            "mode": self.mode,
            "values": {",".join(map(str, k)): v.to_json() for k, v in self.values.items()},
        }
        if self.certs:
            out["certs"] = {",".join(map(str, k)): c.to_json() for k, c in self.certs.items()}
        return out


def make_cochain(
    cov: Covering, degree: int, values: dict[Index, RatFunc], mode: str = "rational"
) -> Cochain:
    expect = index_tuples(len(cov), degree)
    vals: dict[Index, RatFunc] = {}
    for idx in expect:
        v = values.get(idx)
        if v is None:
            v = RatFunc.const(2, 0)
        vals[idx] = v
    certs = None
    if mode == "regular":
        certs = {}
        for idx in expect:
            certs[idx] = certify_regular(vals[idx], overlap_poly(cov, idx), cov.chart)
    return Cochain(cov, degree, vals, mode, certs)


def differential(f: Cochain) -> Cochain:
    """Alternating sum over omitted indices; raises degree by one."""
    n = len(f.covering)
    out: dict[Index, RatFunc] = {}
    for idx in index_tuples(n, f.degree + 1):
        acc = RatFunc.const(2, 0)
        for j in range(len(idx)):
            sub = idx[:j] + idx[j + 1 :]
            term = f.values[sub]
            acc = acc + term if j % 2 == 0 else acc - term
        out[idx] = acc
    mode = f.mode
    if mode == "regular":
        return make_cochain(f.covering, f.degree + 1, out, "regular")
    return Cochain(f.covering, f.degree + 1, out, "rational")


def is_cocycle(f: Cochain) -> bool:
    probe = Cochain(f.covering, f.degree, f.values, "rational")
    return differential(probe).is_zero()


def value_signed(f: Cochain, i: int, j: int) -> RatFunc:
    """f_{ij} for a degree-1 cochain extended antisymmetrically off the diagonal."""
    if i <= j:
        return f.values[(i, j)]
    return -f.values[(j, i)]


# ---------------------------------------------------------------------------
# Bounded coboundary solving
# ---------------------------------------------------------------------------


def _monomials_up_to(deg: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(deg + 1) for b in range(deg + 1 - a)]


@dataclass(frozen=True)
class BoundedPreimage:
    cochain: Cochain  # degree 0, values a_i / Q_i^m
    power: int
    deg_bound: int


def is_coboundary_bounded(
    f: Cochain,
    deg_bound: int,
    power_bound: int,
    per_set_powers: Optional[Sequence[int]] = None,
) -> Optional[BoundedPreimage]:
    """Search h with dh = f over the ansatz h_i = a_i / Q_i^m, deg a_i <= D.

    Returns a verified preimage or None when none exists within the bounds.
    """
    if f.degree != 1:
        raise ValueError("the bounded solver works on 1-cochains")
    n = len(f.covering)
    for i in range(1, n + 1):
        if not f.values[(i, i)].is_zero():
            return None
    powers_list: list[Sequence[int]]
    if per_set_powers is not None:
        powers_list = [per_set_powers]
    else:
        powers_list = [[m] * n for m in range(power_bound + 1)]
    for powers in powers_list:
        sol = _solve_at_power(f, deg_bound, powers)
        if sol is not None:
            h = sol
            check = differential(Cochain(f.covering, 0, h.values, "rational"))
            ok = all(check.values[idx] == f.values[idx] for idx in check.values)
            if ok:
                return BoundedPreimage(h, max(powers), deg_bound)
    return None


def _solve_at_power(f: Cochain, deg_bound: int, powers: Sequence[int]) -> Optional[Cochain]:
    cov = f.covering
    n = len(cov)
    monos = _monomials_up_to(deg_bound)
    ncols_per = len(monos)
    col_of = {}
    for i in range(n):
        for t, e in enumerate(monos):
            col_of[(i, e)] = i * ncols_per + t
    ncols = n * ncols_per
    qpow = [cov.sets[i].q ** powers[i] for i in range(n)]
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            g = f.values[(i, j)]
            # a_j Q_i^m d - a_i Q_j^m d = num * Q_i^m Q_j^m
            d = g.den
            coeff_j = qpow[i - 1] * d
            coeff_i = qpow[j - 1] * d
            target = g.num * qpow[i - 1] * qpow[j - 1]
            row_map: dict[tuple[int, int], dict[int, Fraction]] = {}
            for e in monos:
                shifted = coeff_j.shift_mul(e, 1)
                for mono, c in shifted.terms.items():
                    row_map.setdefault(mono, {})[col_of[(j - 1, e)]] = c
                shifted = coeff_i.shift_mul(e, 1)
                for mono, c in shifted.terms.items():
                    row = row_map.setdefault(mono, {})
                    row[col_of[(i - 1, e)]] = row.get(col_of[(i - 1, e)], Fraction(0)) - c
            target_terms = dict(target.terms)
            for mono in set(row_map) | set(target_terms):
                rows.append(row_map.get(mono, {}))
                rhs.append(target_terms.get(mono, Fraction(0)))
    particular, _ = solve_system(rows, rhs, ncols)
    if particular is None:
        return None
    values: dict[Index, RatFunc] = {}
    for i in range(n):
        num = Poly(
            2,
            {e: particular[col_of[(i, e)]] for e in monos if particular[col_of[(i, e)]]},
        )
        values[(i + 1,)] = RatFunc(num, qpow[i])
    return Cochain(cov, 0, values, "rational")


def solution_space_union(
    cov: Covering, transition: RatFunc, deg_bound: int, power_bound: int
) -> list[tuple[RatFunc, RatFunc]]:
    """Independent spanning set of all bounded solution pairs.

    The ansatz allows any denominator power m <= power_bound with numerator
    degree <= deg_bound at that power; the union over m is reduced to a
    linearly independent list via coefficient vectors over the common
    denominators Q_i^power_bound.
    """
    from ._linalg import in_span

    q1 = cov.sets[0].q
    q2 = cov.sets[1].q
    qdeg = max(q1.total_degree(), q2.total_degree())
    monos = _monomials_up_to(deg_bound + power_bound * qdeg)
    index = {e: t for t, e in enumerate(monos)}

    def vector(a1: Poly, a2: Poly, m: int) -> list[Fraction]:
        u1 = a1 * q1 ** (power_bound - m)
        u2 = a2 * q2 ** (power_bound - m)
        vec = [Fraction(0)] * (2 * len(monos))
        for e, c in u1.terms.items():
            vec[index[e]] = c
        for e, c in u2.terms.items():
            vec[len(monos) + index[e]] = c
        return vec

    kept: list[tuple[RatFunc, RatFunc]] = []
    kept_vecs: list[list[Fraction]] = []
    for m in range(power_bound + 1):
        for s1, s2 in solution_space_basis(cov, transition, deg_bound, m):
            vec = vector(
                _numerator_at_power(s1, q1, m),
                _numerator_at_power(s2, q2, m),
                m,
            )
            if any(vec) and not (kept_vecs and in_span(kept_vecs, vec)):
                kept.append((s1, s2))
                kept_vecs.append(vec)
    return kept


def _numerator_at_power(s: RatFunc, q: Poly, m: int) -> Poly:
    """Numerator of s written over the denominator q^m (exact)."""
    if s.is_zero():
        return Poly.zero(2)
    return divide_exact(s.num * q**m, s.den)


def solution_space_basis(
    cov: Covering, transition: RatFunc, deg_bound: int, power: int
) -> list[tuple[RatFunc, RatFunc]]:
    """Basis of pairs (s1, s2) = (a1/Q1^m, a2/Q2^m) with transition*s1 = s2.

    Used by the bundle module; exact nullspace over the coefficient ansatz.
    """
    if len(cov) != 2:
        raise ValueError("section solving works on two-set coverings")
    monos = _monomials_up_to(deg_bound)
    ncols_per = len(monos)
    ncols = 2 * ncols_per
    q1m = cov.sets[0].q ** power
    q2m = cov.sets[1].q ** power
    # g * a1/Q1^m = a2/Q2^m  <=>  g_num * a1 * Q2^m = a2 * Q1^m * g_den
    lhs_poly = transition.num * q2m
    rhs_poly = transition.den * q1m
    row_map: dict[tuple[int, int], dict[int, Fraction]] = {}
    for t, e in enumerate(monos):
        for mono, c in lhs_poly.shift_mul(e, 1).terms.items():
            row_map.setdefault(mono, {})[t] = c
        for mono, c in rhs_poly.shift_mul(e, 1).terms.items():
            row = row_map.setdefault(mono, {})
            col = ncols_per + t
            row[col] = row.get(col, Fraction(0)) - c
    rows = list(row_map.values())
    rhs = [Fraction(0)] * len(rows)
    _, basis = solve_system(rows, rhs, ncols)
    out = []
    for vec in basis:
        a1 = Poly(2, {monos[t]: vec[t] for t in range(ncols_per) if vec[t]})
        a2 = Poly(2, {monos[t]: vec[ncols_per + t] for t in range(ncols_per) if vec[ncols_per + t]})
        out.append((RatFunc(a1, q1m), RatFunc(a2, q2m)))
    return out


# ---------------------------------------------------------------------------
# Pullback of cochains
# ---------------------------------------------------------------------------


def pullback_cochain(t: Tower, f: Cochain) -> dict[str, Cochain]:
    """Per-leaf pullback; commutes with the differential."""
    pulled_covs = pullback_covering(t, f.covering)
    out: dict[str, Cochain] = {}
    for leaf, cov in pulled_covs.items():
        values = {idx: t.pull_ratfunc(leaf, v) for idx, v in f.values.items()}
        if f.mode == "regular":
            out[leaf] = make_cochain(cov, f.degree, values, "regular")
        else:
            out[leaf] = Cochain(cov, f.degree, values, "rational")
    return out


# ---------------------------------------------------------------------------
# Power extension
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtendResult:
    status: str  # "extended" | "obstructed"
    power: int = 0
    global_fn: Optional[RatFunc] = None
    unit_cert: Optional[ZeroCert] = None
    blocking_points: tuple = ()  # zeros of the residual denominator outside V(Q)
    center_candidates: tuple = ()  # zeros inside V(Q): blowup centers
    residual_den: Optional[Poly] = None


def extend_with_power(f: RatFunc, open_q: Poly, nmax: int) -> ExtendResult:
    """Smallest N <= nmax with open_q^N * f having a certified unit denominator."""
    for n in range(nmax + 1):
        g = RatFunc(open_q**n, Poly.const(2, 1)) * f
        den = g.den
        if den.is_constant():
            cert = EmptyByPositivity(
                den if den.constant_value() > 0 else -den, (), abs(den.constant_value())
            )
            return ExtendResult("extended", n, g, cert)
        ans = is_unit(den)
        if ans.is_yes:
            return ExtendResult("extended", n, g, ans.cert)
    g = RatFunc(open_q**nmax, Poly.const(2, 1)) * f
    fp = zero_points(g.den)
    if fp is None:
        raise Undecidable(f"cannot analyze residual denominator {g.den.render()}")
    blocking = tuple(p for p in fp.points if open_q.evaluate(p) != 0)
    centers = tuple(p for p in fp.points if open_q.evaluate(p) == 0)
    return ExtendResult(
        "obstructed",
        nmax,
        blocking_points=blocking,
        center_candidates=centers,
        residual_den=g.den,
    )


# ---------------------------------------------------------------------------
# Cocycle solving after blowing up
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolveOutcome:
    status: str  # "solved" | "failed"
    tower: Tower
    power: int = 0
    preimages: Optional[dict[str, dict[Index, RatFunc]]] = None
    certs: Optional[dict[str, dict[Index, RegularityCert]]] = None
    pulled_cocycle: Optional[dict[str, Cochain]] = None
    obstructions: tuple = ()
    depth: int = 0
    report: str = ""


def _next_even_power(n: int) -> int:
    p = 2
    while p < n:
        p *= 2
    return p


def _pair_extension_power(cov: Covering, value: RatFunc, nmax: int) -> Optional[int]:
    """Smallest N with (Q_i Q_j ...)^N * value having a unit denominator."""
    q = Poly.const(2, 1)
    for u in cov.sets:
        q = q * u.q
    for n in range(nmax + 1):
        g = RatFunc(q**n, Poly.const(2, 1)) * value
        if g.den.is_constant() or is_unit(g.den).is_yes:
            return n
    return None


def _pair_obstruction_points(cov: Covering, value: RatFunc, nmax: int):
    q = Poly.const(2, 1)
    for u in cov.sets:
        q = q * u.q
    g = RatFunc(q**nmax, Poly.const(2, 1)) * value
    fp = zero_points(g.den)
    if fp is None:
        raise Undecidable(f"cannot analyze residual denominator {g.den.render()}")
    return fp.points


def solve_cocycle_blownup(f: Cochain, nmax: int = 4, max_depth: int = 6) -> SolveOutcome:
    """Solve dk = f after blowing up: extend each pair by covering powers,
    blow up surviving obstruction points, then assemble k with the reciprocal
    of the covering power sum and verify the result exactly per leaf."""
    if f.degree != 1:
        raise ValueError("the blowup solver works on 1-cocycles")
    if not is_cocycle(f):
        raise ValueError("input is not a cocycle")
    n = len(f.covering)
    tower = base_tower()
    while True:
        pulled = pullback_cochain(tower, _as_rational(f))
        needed_power = 0
        obstruction_sites: list[tuple[str, tuple[Fraction, Fraction]]] = []
        for leaf in tower.leaf_ids():
            cochain = pulled[leaf]
            pair_cov = cochain.covering
            for i in range(1, n + 1):
                for j in range(i + 1, n + 1):
                    sub = _pair_cov(pair_cov, (i, j))
                    got = _pair_extension_power(sub, cochain.values[(i, j)], nmax)
                    if got is None:
                        pts = _pair_obstruction_points(sub, cochain.values[(i, j)], nmax)
                        for p in pts:
                            site = (leaf, p)
                            if site not in obstruction_sites:
                                obstruction_sites.append(site)
                    else:
                        needed_power = max(needed_power, got)
        if not obstruction_sites:
            power = _next_even_power(max(needed_power, 1))
            if power > max(nmax, 2):
                return SolveOutcome(
                    "failed",
                    tower,
                    depth=tower.depth,
                    report=f"needed covering power {power} exceeds the bound {nmax}",
                )
            return _assemble(f, tower, pulled, power)
        if tower.depth >= max_depth:
            return SolveOutcome(
                "failed",
                tower,
                obstructions=tuple(obstruction_sites),
                depth=tower.depth,
                report="obstruction points remain at the depth limit",
            )
        leaf_order = {leaf: k for k, leaf in enumerate(tower.leaf_ids())}
        obstruction_sites.sort(key=lambda s: (leaf_order[s[0]], s[1]))
        leaf, pt = obstruction_sites[0]
        tower = blowup_at(tower, leaf, pt)


def _power_is_two_power(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _as_rational(f: Cochain) -> Cochain:
    return Cochain(f.covering, f.degree, f.values, "rational")


def _pair_cov(cov: Covering, pair: Index) -> Covering:
    sets = tuple(cov.sets[i - 1] for i in pair)
    return Covering(cov.chart, sets, cov.coverage_cert, cov.coverage_power)


def _assemble(f: Cochain, tower: Tower, pulled: dict[str, Cochain], power: int) -> SolveOutcome:
    n = len(f.covering)
    base_sum_cert = sum_power_positivity([u.q for u in f.covering.sets], power)
    preimages: dict[str, dict[Index, RatFunc]] = {}
    certs: dict[str, dict[Index, RegularityCert]] = {}
    for leaf in tower.leaf_ids():
        cochain = pulled[leaf]
        qs = [u.q for u in cochain.covering.sets]
        s_poly = Poly.zero(2)
        for q in qs:
            s_poly = s_poly + q**power
        s_cert: Optional[ZeroCert] = None
        if base_sum_cert is not None:
            subject = tower.pull_poly(leaf, base_sum_cert.subject)
            sos = tuple(tower.pull_poly(leaf, t) for t in base_sum_cert.sos_terms)
            s_cert = EmptyByPositivity(subject, sos, base_sum_cert.const)
            s_cert.validate()
        else:
            s_cert = coverage_certificate(qs, power)
        # global extensions h_{ij} = (Q_i Q_j)^power * f_ij, unit denominators
        h: dict[tuple[int, int], RatFunc] = {}
        h_unit_certs: dict[tuple[int, int], ZeroCert] = {}
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                val = cochain.values[(i, j)]
                ext = RatFunc((qs[i - 1] * qs[j - 1]) ** power, Poly.const(2, 1)) * val
                h[(i, j)] = ext
                if not ext.den.is_constant():
                    ans = is_unit(ext.den)
                    if not ans.is_yes:
                        return SolveOutcome(
                            "failed",
                            tower,
                            depth=tower.depth,
                            report=f"lost the unit certificate for {ext.den.render()} on {leaf}",
                        )
                    h_unit_certs[(i, j)] = ans.cert
        s_rf = RatFunc.from_poly(s_poly)
        k_leaf: dict[Index, RatFunc] = {}
        cert_leaf: dict[Index, RegularityCert] = {}
        for i0 in range(1, n + 1):
            acc = RatFunc.const(2, 0)
            for i in range(1, n + 1):
                if i == i0:
                    continue
                hv = h[(min(i, i0), max(i, i0))]
                acc = acc + hv if i < i0 else acc - hv
            # k_{i0} = acc / (S * Q_{i0}^power); note h_{i i0} carries sign f_{i i0}
            denom = RatFunc.from_poly(qs[i0 - 1] ** power) * s_rf
            k = acc / denom
            k_leaf[(i0,)] = k
            evidence = []
            if not acc.den.is_constant():
                # acc's denominator divides the product of the h unit denominators
                prod_cert = None
                prod = Poly.const(2, 1)
                for key, cert in h_unit_certs.items():
                    if key[0] == i0 or key[1] == i0:
                        prod = prod * _cert_subject_abs(cert)
                        prod_cert = (
                            cert
                            if prod_cert is None
                            else multiply_positivity(prod_cert, cert)
                        )
                cof = try_divide(prod, acc.den)
                if cof is None or prod_cert is None:
                    cert_leaf[(i0,)] = certify_regular(k, qs[i0 - 1], leaf)
                    continue
                evidence.append(
                    FactorEvidence(acc.den, 1, "divides_unit", cert=prod_cert, cofactor=cof)
                )
            evidence.append(
                FactorEvidence(
                    qs[i0 - 1], power, "divides_open", cofactor=Poly.const(2, 1), open_power=1
                )
            )
            if isinstance(s_cert, EmptyByPositivity):
                evidence.append(FactorEvidence(s_poly, 1, "unit", cert=s_cert))
            elif isinstance(s_cert, FinitePoints) and not s_cert.points:
                evidence.append(FactorEvidence(s_poly, 1, "unit", cert=s_cert))
            else:
                cert_leaf[(i0,)] = certify_regular(k, qs[i0 - 1], leaf)
                continue
            cert_leaf[(i0,)] = cert_from_evidence(
                k, qs[i0 - 1], leaf, acc.num, evidence
            )
        # exact verification: dk = pulled cocycle
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                diff = k_leaf[(j,)] - k_leaf[(i,)]
                if diff != cochain.values[(i, j)]:
                    return SolveOutcome(
                        "failed",
                        tower,
                        depth=tower.depth,
                        report=f"assembly identity failed on leaf {leaf} at {(i, j)}",
                    )
        preimages[leaf] = k_leaf
        certs[leaf] = cert_leaf
    return SolveOutcome(
        "solved",
        tower,
        power=power,
        preimages=preimages,
        certs=certs,
        pulled_cocycle=pulled,
        depth=tower.depth,
    )


def _cert_subject_abs(cert: ZeroCert) -> Poly:
    return cert.subject

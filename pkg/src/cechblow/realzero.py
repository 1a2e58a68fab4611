"""Certified reasoning about real zero sets of polynomials.

The calculus is sound but deliberately incomplete: every positive answer
carries a certificate that replays by exact symbolic identities, and the
honest answer for anything outside the calculus is Unknown.

Certificate kinds
-----------------
* ``EmptyByPositivity``: subject = sum of squares + positive constant, so the
  real zero set is empty.
* ``FinitePoints``: subject = sum of squares of a decomposition whose common
  real zeros are exactly the listed rational points (established by resultant
  elimination with Sturm completeness checks).
* ``SmoothFactors``: subject equals a constant times a product of declared
  factors with multiplicities.
* ``Declared``: unverified data from an instance file; it must be replayed
  before use.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .poly import (
    Poly,
    RatFunc,
    divide_exact,
    format_fraction,
    gcd,
    parse_fraction,
    poly_sqrt,
    rational_roots,
    resultant,
    squarefree_decomposition,
    try_divide,
    univariate_coefficients,
    count_real_roots,
    _as_univar,
)
from ._linalg import solve_system


class NonRationalZeros(Exception):
    """Elimination left real roots that are not rational."""

    def __init__(self, eliminant: Poly):
        super().__init__(f"non-rational real zeros remain; eliminant {eliminant.render()}")
        self.eliminant = eliminant


class NotRegular(Exception):
    """A function has a pole inside the requested open set."""

    def __init__(self, witness):
        super().__init__(f"denominator vanishes at {witness} inside the open set")
        self.witness = tuple(witness)


class Undecidable(Exception):
    """The certificate calculus could not decide the question."""


class CertificateError(Exception):
    """A certificate failed to replay."""


# ---------------------------------------------------------------------------
# Zero-set certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EmptyByPositivity:
    subject: Poly
    sos_terms: tuple[Poly, ...]
    const: Fraction

    kind = "empty_by_positivity"

    def validate(self) -> None:
        if self.const <= 0:
            raise CertificateError("positivity certificate needs a positive constant")
        acc = Poly.const(self.subject.nvars, self.const)
        for f in self.sos_terms:
            acc = acc + f * f
        if acc != self.subject:
            raise CertificateError("positivity identity does not replay")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "subject": self.subject.to_json(),
            "sos": [f.to_json() for f in self.sos_terms],
            "const": format_fraction(self.const),
        }

    @classmethod
    def from_json(cls, data: dict) -> "EmptyByPositivity":
        return cls(
            Poly.from_json(data["subject"]),
            tuple(Poly.from_json(t) for t in data["sos"]),
            parse_fraction(data["const"]),
        )


@dataclass(frozen=True)
class FinitePoints:
    subject: Poly
    points: tuple[tuple[Fraction, ...], ...]
    decomposition: tuple[Poly, ...]

    kind = "finite_points"

    def validate(self) -> None:
        acc = Poly.zero(self.subject.nvars)
        for f in self.decomposition:
            acc = acc + f * f
        if acc != self.subject:
            raise CertificateError("finite-points square identity does not replay")
        for p in self.points:
            for f in self.decomposition:
                if f.evaluate(p) != 0:
                    raise CertificateError(f"listed point {p} does not annihilate the decomposition")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "subject": self.subject.to_json(),
            "points": [[format_fraction(c) for c in p] for p in self.points],
            "decomposition": [f.to_json() for f in self.decomposition],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FinitePoints":
        return cls(
            Poly.from_json(data["subject"]),
            tuple(tuple(parse_fraction(c) for c in p) for p in data["points"]),
            tuple(Poly.from_json(f) for f in data["decomposition"]),
        )


@dataclass(frozen=True)
class SmoothFactors:
    subject: Poly
    factors: tuple[tuple[Poly, int], ...]
    unit_constant: Fraction = Fraction(1)

    kind = "smooth_factors"

    def validate(self) -> None:
        acc = Poly.const(self.subject.nvars, self.unit_constant)
        for f, m in self.factors:
            acc = acc * f**m
        if acc != self.subject:
            raise CertificateError("factor product does not replay")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "subject": self.subject.to_json(),
            "factors": [[f.to_json(), m] for f, m in self.factors],
            "unit_constant": format_fraction(self.unit_constant),
        }

    @classmethod
    def from_json(cls, data: dict) -> "SmoothFactors":
        return cls(
            Poly.from_json(data["subject"]),
            tuple((Poly.from_json(f), int(m)) for f, m in data["factors"]),
            parse_fraction(data.get("unit_constant", 1)),
        )


@dataclass(frozen=True)
class Declared:
    subject: Poly
    points: tuple[tuple[Fraction, ...], ...] = ()
    decomposition: tuple[Poly, ...] = ()
    description: str = ""
    verified: bool = False

    kind = "declared"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "subject": self.subject.to_json(),
            "points": [[format_fraction(c) for c in p] for p in self.points],
            "decomposition": [f.to_json() for f in self.decomposition],
            "description": self.description,
            "verified": self.verified,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Declared":
        return cls(
            Poly.from_json(data["subject"]),
            tuple(tuple(parse_fraction(c) for c in p) for p in data.get("points", [])),
            tuple(Poly.from_json(f) for f in data.get("decomposition", [])),
            data.get("description", ""),
            bool(data.get("verified", False)),
        )


ZeroCert = EmptyByPositivity | FinitePoints | SmoothFactors | Declared


def zero_cert_from_json(data: dict) -> ZeroCert:
    kind = data["kind"]
    for cls in (EmptyByPositivity, FinitePoints, SmoothFactors, Declared):
        if cls.kind == kind:
            return cls.from_json(data)
    raise ValueError(f"unknown certificate kind {kind!r}")


def make_zero_cert(q: Poly) -> ZeroCert:
    """Best-effort descriptive certificate for V(q), used by open sets."""
    pos = find_positivity(q)
    if pos is not None:
        return pos
    fp = None
    try:
        fp = zero_points(q)
    except NonRationalZeros:
        fp = None
    if fp is not None:
        return fp
    parts = squarefree_decomposition(q)
    const = divide_exact(q, _product([f**m for f, m in parts], q.nvars)).constant_value()
    return SmoothFactors(q, tuple(parts), const)


def _product(polys: Sequence[Poly], nvars: int) -> Poly:
    acc = Poly.const(nvars, 1)
    for p in polys:
        acc = acc * p
    return acc


# ---------------------------------------------------------------------------
# Weighted sum-of-squares search
# ---------------------------------------------------------------------------

WSOS = list[tuple[Fraction, Poly]]


def _four_squares(n: int) -> list[int]:
    """n >= 0 as a sum of at most four integer squares."""
    if n < 0:
        raise ValueError("negative integer")
    if n == 0:
        return []
    best: Optional[list[int]] = None

    def rec(remaining: int, max_root: int, acc: list[int]):
        nonlocal best
        if best is not None and len(acc) >= len(best):
            return
        if remaining == 0:
            best = list(acc)
            return
        if len(acc) == 4:
            return
        r = min(max_root, math.isqrt(remaining))
        for a in range(r, 0, -1):
            rec(remaining - a * a, a, acc + [a])
            if best is not None and len(best) == len(acc) + 1:
                return

    rec(n, math.isqrt(n), [])
    assert best is not None  # Lagrange: always expressible
    return best


def _weight_to_squares(w: Fraction) -> list[Fraction]:
    """Positive rational w as a sum of squares of rationals."""
    if w <= 0:
        raise ValueError("weight must be positive")
    root = Fraction(math.isqrt(w.numerator), math.isqrt(w.denominator))
    if root * root == w:
        return [root]
    parts = _four_squares(w.numerator * w.denominator)
    return [Fraction(t, w.denominator) for t in parts]


def _materialize(wsos: WSOS) -> list[Poly]:
    out: list[Poly] = []
    for w, f in wsos:
        if f.is_zero() or w == 0:
            continue
        for s in _weight_to_squares(w):
            out.append(f.scale(s))
    return out


def _wsos_square(wsos: WSOS, c: Fraction) -> tuple[WSOS, Fraction]:
    """(sum w f^2 + c)^2 as a weighted sum of squares plus c^2."""
    out: WSOS = []
    n = len(wsos)
    for i in range(n):
        wi, fi = wsos[i]
        out.append((wi * wi, fi * fi))
        for j in range(i + 1, n):
            wj, fj = wsos[j]
            out.append((2 * wi * wj, fi * fj))
    if c:
        for w, f in wsos:
            out.append((2 * c * w, f))
    return out, c * c


def _quadratic_wsos(q: Poly) -> Optional[tuple[WSOS, Fraction]]:
    """Complete decomposition for polynomials of total degree at most 2."""
    n = q.nvars
    A = [[Fraction(0)] * n for _ in range(n)]
    L = [Fraction(0)] * n
    for e, c in q.terms.items():
        deg = sum(e)
        if deg == 1:
            L[e.index(1)] += c
        elif deg == 2:
            idx = [i for i, k in enumerate(e) if k]
            if len(idx) == 1:
                A[idx[0]][idx[0]] += c
            else:
                i, j = idx
                A[i][j] += c / 2
                A[j][i] += c / 2
    rows = [{j: 2 * A[i][j] for j in range(n) if A[i][j]} for i in range(n)]
    rhs = [-L[i] for i in range(n)]
    x0, _ = solve_system(rows, rhs, n)
    if x0 is None:
        return None
    m = q.evaluate(x0)
    if m < 0:
        return None
    # LDL^T with symmetric pivoting on the pure quadratic part
    work = [row[:] for row in A]
    order = list(range(n))
    terms: WSOS = []
    k = 0
    while k < n:
        pivot = next((p for p in range(k, n) if work[order[p]][order[p]] != 0), None)
        if pivot is None:
            if any(work[order[i]][order[j]] for i in range(k, n) for j in range(k, n)):
                return None  # zero diagonal with off-diagonal entries: indefinite
            break
        order[k], order[pivot] = order[pivot], order[k]
        d = work[order[k]][order[k]]
        if d < 0:
            return None
        vec = {order[j]: work[order[k]][order[j]] / d for j in range(k, n) if work[order[k]][order[j]]}
        lin = Poly.zero(n)
        for var, coef in vec.items():
            lin = lin + Poly.variable(n, var).scale(coef)
            if x0[var]:
                lin = lin - Poly.const(n, coef * x0[var])
        terms.append((d, lin))
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                oi, oj = order[i], order[j]
                ok = order[k]
                work[oi][oj] -= work[oi][ok] * work[ok][oj] / d
        k += 1
    check = Poly.const(n, m)
    for w, f in terms:
        check = check + (f * f).scale(w)
    if check != q:
        return None
    return terms, m


def _univar_chain(q: Poly, v: int) -> Optional[tuple[WSOS, Fraction]]:
    """Top-down square completion for a genuinely univariate polynomial.

    If the greedy completion fails, retry after recentering at each rational
    critical point (where odd low-order coefficients vanish).
    """
    got = _univar_chain_plain(q, v)
    if got is not None:
        return got
    deriv = q.derivative(v)
    if deriv.is_zero():
        return None
    try:
        roots, _ = rational_roots(univariate_coefficients(deriv, v))
    except ValueError:
        return None
    var = Poly.variable(q.nvars, v)
    basis = [Poly.variable(q.nvars, i) for i in range(q.nvars)]
    for x0 in roots:
        shift_in = list(basis)
        shift_in[v] = var + Poly.const(q.nvars, x0)
        shifted = q.compose(shift_in)
        got = _univar_chain_plain(shifted, v)
        if got is None:
            continue
        terms, c = got
        shift_back = list(basis)
        shift_back[v] = var - Poly.const(q.nvars, x0)
        return [(w, f.compose(shift_back)) for w, f in terms], c
    return None


def _univar_chain_plain(q: Poly, v: int) -> Optional[tuple[WSOS, Fraction]]:
    try:
        coeffs = univariate_coefficients(q, v)
    except ValueError:
        return None
    terms: WSOS = []
    work = list(coeffs)
    while len(work) - 1 >= 2:
        deg = len(work) - 1
        if deg % 2:
            return None
        a = work[-1]
        if a <= 0:
            return None
        e = deg // 2
        b = work[-2] if len(work) >= 2 else Fraction(0)
        # a*(v^e + b/(2a) v^{e-1})^2 removes the top two coefficients
        head = Poly(q.nvars, {_unit_exp(q.nvars, v, e): Fraction(1)})
        if b:
            head = head + Poly(q.nvars, {_unit_exp(q.nvars, v, e - 1): b / (2 * a)})
        terms.append((a, head))
        sq = head * head
        for ee, cc in sq.terms.items():
            work_idx = ee[v]
            while work_idx >= len(work):
                work.append(Fraction(0))
            work[work_idx] -= a * cc
        while work and not work[-1]:
            work.pop()
        if not work:
            return terms, Fraction(0)
    if len(work) - 1 == 1:
        return None
    tail = work[0] if work else Fraction(0)
    if tail < 0:
        return None
    return terms, tail


def _unit_exp(nvars: int, v: int, k: int) -> tuple[int, ...]:
    e = [0] * nvars
    e[v] = k
    return tuple(e)


def _wsos_decompose(q: Poly, depth: int = 0) -> Optional[tuple[WSOS, Fraction]]:
    """q = sum of w_i * f_i^2 + c with w_i > 0 and c >= 0, or None."""
    if depth > 8:
        return None
    if q.is_zero():
        return [], Fraction(0)
    if q.is_constant():
        c = q.constant_value()
        return ([], c) if c > 0 else None
    if q.total_degree() % 2:
        return None
    h = poly_sqrt(q)
    if h is not None:
        return [(Fraction(1), h)], Fraction(0)
    c0 = q.constant_term()
    if c0 > 0:
        sub = _wsos_decompose(q - Poly.const(q.nvars, c0), depth + 1)
        if sub is not None:
            terms, c = sub
            return terms, c + c0
    if q.total_degree() == 2:
        got = _quadratic_wsos(q)
        if got is not None:
            return got
    present = q.variables_present()
    v = present[-1]
    uni = _as_univar(q, v)
    degs = sorted(uni)
    if all(d % 2 == 0 for d in degs):
        total: WSOS = []
        const = Fraction(0)
        ok = True
        for d in degs:
            sub = _wsos_decompose(uni[d], depth + 1)
            if sub is None:
                ok = False
                break
            terms, c = sub
            if d == 0:
                total.extend(terms)
                const += c
            else:
                half = Poly(q.nvars, {_unit_exp(q.nvars, v, d // 2): Fraction(1)})
                for w, f in terms:
                    total.append((w, f * half))
                if c > 0:
                    total.append((c, half))
        if ok:
            return total, const
    if max(degs) == 2:
        A = uni.get(2)
        B = uni.get(1, Poly.zero(q.nvars))
        C = uni.get(0, Poly.zero(q.nvars))
        if A is not None and A.is_constant():
            a = A.constant_value()
            if a > 0:
                inner = Poly(q.nvars, {_unit_exp(q.nvars, v, 1): Fraction(1)}) + B.scale(
                    Fraction(1, 2) / a
                )
                rest = C - (B * B).scale(Fraction(1, 4) / a)
                sub = _wsos_decompose(rest, depth + 1)
                if sub is not None:
                    terms, c = sub
                    return [(a, inner)] + terms, c
        elif A is not None:
            # completing the square with a polynomial leading coefficient:
            # A v^2 + B v + C = (h v + b)^2 + (C - b^2) when A = h^2, B = 2 h b
            h = poly_sqrt(A)
            if h is not None:
                from .poly import try_divide as _try_div

                b = _try_div(B.scale(Fraction(1, 2)), h)
                if b is not None:
                    inner = h * Poly(q.nvars, {_unit_exp(q.nvars, v, 1): Fraction(1)}) + b
                    rest = C - b * b
                    sub = _wsos_decompose(rest, depth + 1)
                    if sub is not None:
                        terms, c = sub
                        return [(Fraction(1), inner)] + terms, c
    if len(present) == 1:
        return _univar_chain(q, v)
    return None


def find_positivity(q: Poly) -> Optional[EmptyByPositivity]:
    """Exact identity q = sum of squares + positive constant, if one is found."""
    if q.is_zero():
        return None
    got = _wsos_decompose(q)
    if got is None:
        return None
    terms, c = got
    if c <= 0:
        return None
    cert = EmptyByPositivity(q, tuple(_materialize(terms)), c)
    cert.validate()
    return cert


def find_wsos(q: Poly) -> Optional[tuple[list[Poly], Fraction]]:
    """q = sum of plain squares + c (c may be zero); None when not found."""
    got = _wsos_decompose(q)
    if got is None:
        return None
    terms, c = got
    return _materialize(terms), c


def multiply_positivity(a: EmptyByPositivity, b: EmptyByPositivity) -> EmptyByPositivity:
    """Positivity certificate for the product of two certified-positive polynomials."""
    terms: WSOS = []
    for f in a.sos_terms:
        for g in b.sos_terms:
            terms.append((Fraction(1), f * g))
        terms.append((b.const, f))
    for g in b.sos_terms:
        terms.append((a.const, g))
    cert = EmptyByPositivity(a.subject * b.subject, tuple(_materialize(terms)), a.const * b.const)
    cert.validate()
    return cert


# ---------------------------------------------------------------------------
# Common rational zeros of a bivariate system
# ---------------------------------------------------------------------------


def common_rational_zeros(polys: Sequence[Poly]) -> Optional[list[tuple[Fraction, Fraction]]]:
    """Exactly the common real zeros of a system of bivariate polynomials.

    Returns the (finite, possibly empty) list of common real zeros when every
    one of them is rational and the elimination is conclusive, None when the
    machinery cannot decide (e.g. a common curve), and raises NonRationalZeros
    when real but non-rational zeros remain possible.  Both elimination orders
    are tried before giving up.
    """
    try:
        return _common_rational_zeros_1dir(polys)
    except NonRationalZeros:
        swapped = [_swap_vars(p) for p in polys]
        try:
            got = _common_rational_zeros_1dir(swapped)
        except NonRationalZeros:
            raise
        if got is None:
            raise
        return sorted((y, x) for x, y in got)


def _swap_vars(p: Poly) -> Poly:
    return Poly(2, {(e[1], e[0]): c for e, c in p.terms.items()})


def _common_rational_zeros_1dir(polys: Sequence[Poly]) -> Optional[list[tuple[Fraction, Fraction]]]:
    fs = [p for p in polys if not p.is_zero()]
    if not fs:
        return None
    nvars = fs[0].nvars
    if nvars != 2:
        raise ValueError("common-zero search is implemented for two variables")
    if any(p.is_constant() for p in fs):
        return []
    y_free = [p for p in fs if p.degree_in(1) == 0]
    y_dep = [p for p in fs if p.degree_in(1) > 0]
    eliminants: list[Poly] = list(y_free)
    for i in range(len(y_dep)):
        for j in range(i + 1, len(y_dep)):
            r = resultant(y_dep[i], y_dep[j], 1)
            if not r.is_zero():
                eliminants.append(r)
    eliminants = [e for e in eliminants if not e.is_zero()]
    if not eliminants:
        return None
    gx = eliminants[0]
    for e in eliminants[1:]:
        gx = gcd(gx, e)
        if gx.is_constant():
            return []
    if gx.is_constant():
        return []
    if not y_dep:
        # x is constrained but y is completely free: the zero set is a union of lines
        return None
    coeffs = univariate_coefficients(gx, 0)
    roots, complete = rational_roots(coeffs)
    if not complete:
        raise NonRationalZeros(gx)
    points: list[tuple[Fraction, Fraction]] = []
    for x0 in roots:
        specialized = []
        for p in y_dep + y_free:
            uni = _specialize_x(p, x0)
            specialized.append(uni)
        nonzero = [u for u in specialized if any(u)]
        if not nonzero:
            return None
        gy = nonzero[0]
        for u in nonzero[1:]:
            gy = _univar_gcd(gy, u)
            if len(gy) == 1:
                break
        if len(gy) == 1:
            continue
        yroots, ycomplete = rational_roots(gy)
        if not ycomplete:
            raise NonRationalZeros(_poly_from_y_coeffs(gy, nvars))
        for y0 in yroots:
            if all(p.evaluate((x0, y0)) == 0 for p in fs):
                points.append((x0, y0))
    points.sort()
    return points


def _specialize_x(p: Poly, x0: Fraction) -> list[Fraction]:
    out = [Fraction(0)] * (p.degree_in(1) + 1)
    for e, c in p.terms.items():
        out[e[1]] += c * x0 ** e[0]
    while out and not out[-1]:
        out.pop()
    return out


def _univar_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    from .poly import _univar_gcd_fracs

    g = _univar_gcd_fracs(a, b)
    return g if g else [Fraction(0)]


def _poly_from_y_coeffs(coeffs: list[Fraction], nvars: int) -> Poly:
    return Poly(nvars, {(0, i): c for i, c in enumerate(coeffs) if c})


# ---------------------------------------------------------------------------
# Public operations of the zero-set calculus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitAnswer:
    status: str  # "yes" | "no" | "unknown"
    cert: Optional[ZeroCert] = None
    witness: Optional[tuple[Fraction, ...]] = None

    @property
    def is_yes(self) -> bool:
        return self.status == "yes"


def is_unit(q: Poly) -> UnitAnswer:
    """Does q have an empty real zero set?  Yes answers carry certificates."""
    if q.is_zero():
        return UnitAnswer("no", witness=(Fraction(0),) * q.nvars)
    if q.is_constant():
        c = q.constant_value()
        subject = q if c > 0 else -q
        cert = EmptyByPositivity(subject, (), abs(c))
        return UnitAnswer("yes", cert=cert)
    cert = find_positivity(q)
    if cert is None:
        cert = find_positivity(-q)
    if cert is not None:
        return UnitAnswer("yes", cert=cert)
    nonrational = False
    try:
        fp = zero_points(q)
    except NonRationalZeros:
        fp = None
        nonrational = True
    if fp is not None:
        if fp.points:
            return UnitAnswer("no", witness=fp.points[0])
        return UnitAnswer("yes", cert=fp)
    if not nonrational and q.nvars == 2:
        for a in range(-4, 5):
            for b in range(-4, 5):
                pt = (Fraction(a, 2), Fraction(b, 2))
                if q.evaluate(pt) == 0:
                    return UnitAnswer("no", witness=pt)
    return UnitAnswer("unknown")


def zero_points(q: Poly, cert_hint: Optional[ZeroCert] = None) -> Optional[FinitePoints]:
    """FinitePoints certificate for V(q), or None when undecided."""
    if q.is_zero():
        return None
    decomposition: Optional[list[Poly]] = None
    if isinstance(cert_hint, FinitePoints):
        cert_hint.validate()
        return cert_hint
    if isinstance(cert_hint, Declared):
        acc = Poly.zero(q.nvars)
        for f in cert_hint.decomposition:
            acc = acc + f * f
        if acc != q:
            raise CertificateError("declared decomposition does not replay")
        decomposition = list(cert_hint.decomposition)
    if decomposition is None:
        found = find_wsos(q)
        if found is None:
            return None
        squares, const = found
        if const != 0:
            # strictly positive: the zero set is empty, witnessed by positivity
            return None
        decomposition = squares
    decomposition = [f for f in decomposition if not f.is_zero()]
    if not decomposition:
        return None
    points = common_rational_zeros(decomposition)
    if points is None:
        return None
    cert = FinitePoints(q, tuple(points), tuple(decomposition))
    cert.validate()
    return cert


@dataclass(frozen=True)
class ContainsAnswer:
    status: str  # "yes" | "no" | "unknown"
    witness: Optional[tuple[Fraction, ...]] = None


def contains(inner: ZeroCert, outer: ZeroCert) -> ContainsAnswer:
    """Decide V(inner.subject) within V(outer.subject) from the certificates."""
    if isinstance(inner, EmptyByPositivity):
        return ContainsAnswer("yes")
    if isinstance(inner, FinitePoints):
        if isinstance(outer, EmptyByPositivity):
            if inner.points:
                return ContainsAnswer("no", witness=inner.points[0])
            return ContainsAnswer("yes")
        for p in inner.points:
            if outer.subject.evaluate(p) != 0:
                return ContainsAnswer("no", witness=p)
        return ContainsAnswer("yes")
    return ContainsAnswer("unknown")


# ---------------------------------------------------------------------------
# Regularity certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FactorEvidence:
    """Why one factor of a denominator cannot vanish inside the open set."""

    factor: Poly
    power: int
    role: str  # "constant" | "unit" | "divides_open" | "finite_points"
    cert: Optional[ZeroCert] = None
    cofactor: Optional[Poly] = None
    open_power: int = 1

    def validate(self, open_q: Poly) -> None:
        if self.role == "constant":
            if not (self.factor.is_constant() and not self.factor.is_zero()):
                raise CertificateError("constant factor evidence on a non-constant factor")
            return
        if self.role == "unit":
            if self.cert is None or not isinstance(self.cert, (EmptyByPositivity, FinitePoints)):
                raise CertificateError("unit factor needs an emptiness certificate")
            self.cert.validate()
            if isinstance(self.cert, FinitePoints) and self.cert.points:
                raise CertificateError("unit factor certificate lists zeros")
            if self.cert.subject != self.factor and self.cert.subject != -self.factor:
                raise CertificateError("unit certificate subject mismatch")
            return
        if self.role == "divides_open":
            if self.cofactor is None:
                raise CertificateError("divisibility evidence needs a cofactor")
            if self.factor * self.cofactor != open_q**self.open_power:
                raise CertificateError("divisibility identity does not replay")
            return
        if self.role == "divides_unit":
            if self.cofactor is None or self.cert is None:
                raise CertificateError("unit-divisor evidence needs a cofactor and a certificate")
            if not isinstance(self.cert, (EmptyByPositivity, FinitePoints)):
                raise CertificateError("unit-divisor evidence needs an emptiness certificate")
            self.cert.validate()
            if isinstance(self.cert, FinitePoints) and self.cert.points:
                raise CertificateError("unit-divisor certificate lists zeros")
            prod = self.factor * self.cofactor
            if prod != self.cert.subject and prod != -self.cert.subject:
                raise CertificateError("unit-divisor product does not match the certified unit")
            return
        if self.role == "finite_points":
            if self.cert is None or not isinstance(self.cert, FinitePoints):
                raise CertificateError("finite-points evidence needs a FinitePoints certificate")
            self.cert.validate()
            if self.cert.subject != self.factor and self.cert.subject != -self.factor:
                raise CertificateError("finite-points certificate subject mismatch")
            for p in self.cert.points:
                if open_q.evaluate(p) != 0:
                    raise CertificateError(f"zero {p} of a denominator factor lies inside the open set")
            return
        raise CertificateError(f"unknown evidence role {self.role!r}")

    def to_json(self) -> dict:
        out = {"factor": self.factor.to_json(), "power": self.power, "role": self.role}
        if self.cert is not None:
            out["cert"] = self.cert.to_json()
        if self.cofactor is not None:
            out["cofactor"] = self.cofactor.to_json()
            out["open_power"] = self.open_power
        return out

    @classmethod
    def from_json(cls, data: dict) -> "FactorEvidence":
        return cls(
            Poly.from_json(data["factor"]),
            int(data["power"]),
            data["role"],
            zero_cert_from_json(data["cert"]) if "cert" in data else None,
            Poly.from_json(data["cofactor"]) if "cofactor" in data else None,
            int(data.get("open_power", 1)),
        )


_REGISTRY: Optional[list] = None


@contextmanager
def collecting_certificates(store: list):
    """Route every RegularityCert constructed inside the block into ``store``."""
    global _REGISTRY
    prev = _REGISTRY
    _REGISTRY = store
    try:
        yield store
    finally:
        _REGISTRY = prev


@dataclass(frozen=True)
class RegularityCert:
    """Replayable witness that a rational function is regular on chart minus V(Q).

    The denominator is analyzed through an explicit representation
    ``function = alt_num / prod(factor^power)``; every factor carries evidence
    that its real zeros avoid the open set.
    """

    function: RatFunc
    chart: str
    open_q: Poly
    alt_num: Poly
    evidence: tuple[FactorEvidence, ...]

    def __post_init__(self):
        if _REGISTRY is not None:
            _REGISTRY.append(self)

    def validate(self) -> None:
        den = Poly.const(self.function.nvars, 1)
        for ev in self.evidence:
            den = den * ev.factor**ev.power
        # alt_num/den must equal the reduced function exactly
        if self.alt_num * self.function.den != self.function.num * den:
            raise CertificateError("alternate representation does not match the function")
        for ev in self.evidence:
            ev.validate(self.open_q)

    def to_json(self) -> dict:
        return {
            "kind": "regularity",
            "function": self.function.to_json(),
            "chart": self.chart,
            "open_q": self.open_q.to_json(),
            "alt_num": self.alt_num.to_json(),
            "evidence": [ev.to_json() for ev in self.evidence],
        }

    @classmethod
    def from_json(cls, data: dict) -> "RegularityCert":
        return cls(
            RatFunc.from_json(data["function"]),
            data["chart"],
            Poly.from_json(data["open_q"]),
            Poly.from_json(data["alt_num"]),
            tuple(FactorEvidence.from_json(e) for e in data["evidence"]),
        )


def _evidences_for_part(part: Poly, mult: int, open_q: Poly) -> list[FactorEvidence]:
    """Evidence that one square-free denominator part stays outside the set."""
    if part.is_constant():
        return [FactorEvidence(part, mult, "constant")]
    cof = try_divide(open_q, part)
    if cof is not None:
        return [FactorEvidence(part, mult, "divides_open", cofactor=cof, open_power=1)]
    out: list[FactorEvidence] = []
    work = part
    while not work.is_constant():
        g = gcd(work, open_q)
        if g.is_constant():
            break
        out.append(
            FactorEvidence(g, mult, "divides_open", cofactor=divide_exact(open_q, g), open_power=1)
        )
        work = divide_exact(work, g)
    if work.is_constant():
        if work.constant_value() != 1:
            out.append(FactorEvidence(work, mult, "constant"))
        return out
    ans = is_unit(work)
    if ans.is_yes:
        out.append(FactorEvidence(work, mult, "unit", cert=ans.cert))
        return out
    try:
        fp = zero_points(work)
    except NonRationalZeros:
        fp = None
    if fp is not None:
        for p in fp.points:
            if open_q.evaluate(p) != 0:
                raise NotRegular(p)
        out.append(FactorEvidence(work, mult, "finite_points", cert=fp))
        return out
    if ans.witness is not None and open_q.evaluate(ans.witness) != 0:
        raise NotRegular(ans.witness)
    if work.nvars == 2:
        for a in range(-4, 5):
            for b in range(-4, 5):
                pt = (Fraction(a, 2), Fraction(b, 2))
                if work.evaluate(pt) == 0 and open_q.evaluate(pt) != 0:
                    raise NotRegular(pt)
    raise Undecidable(f"cannot certify factor {work.render()}")


def certify_regular(f: RatFunc, open_q: Poly, chart: str = "base") -> RegularityCert:
    """Certificate that f is regular on chart minus V(open_q).

    Raises NotRegular with a witness point when a denominator zero lies inside
    the open set, and Undecidable when the calculus cannot answer.
    """
    if open_q.is_zero():
        raise ValueError("open set must be the complement of a nonzero polynomial")
    den = f.den
    evidence: list[FactorEvidence] = []
    if den.is_constant():
        evidence.append(FactorEvidence(den, 1, "constant"))
        cert = RegularityCert(f, chart, open_q, f.num, tuple(evidence))
        cert.validate()
        return cert
    parts = squarefree_decomposition(den)
    lead = divide_exact(den, _product([p**m for p, m in parts], den.nvars))
    if not lead.is_constant():
        raise Undecidable("denominator did not factor as expected")
    if lead.constant_value() != 1:
        evidence.append(FactorEvidence(lead, 1, "constant"))
    for part, mult in parts:
        evidence.extend(_evidences_for_part(part, mult, open_q))
    cert = RegularityCert(f, chart, open_q, f.num, tuple(evidence))
    cert.validate()
    return cert


def build_factored_cert(
    f: RatFunc,
    open_q: Poly,
    chart: str,
    alt_num: Poly,
    factored_den: Sequence[tuple[Poly, int]],
    known_units: Sequence[ZeroCert] = (),
) -> RegularityCert:
    """Certificate through a caller-supplied representation alt_num / prod(factors).

    Used when a solver knows a structured denominator (for instance a product
    of a certified unit and a power of the defining polynomial) that would be
    lost after reduction.  ``known_units`` supplies ready emptiness
    certificates matched against factors by subject.
    """
    evidence: list[FactorEvidence] = []
    for p, m in factored_den:
        if p.is_constant() and p.constant_value() == 1:
            continue
        matched = None
        for cert in known_units:
            if isinstance(cert, (EmptyByPositivity, FinitePoints)):
                if cert.subject == p or cert.subject == -p:
                    if isinstance(cert, FinitePoints) and cert.points:
                        continue
                    matched = cert
                    break
        if matched is not None:
            evidence.append(FactorEvidence(p, m, "unit", cert=matched))
        else:
            evidence.extend(_evidences_for_part(p, m, open_q))
    if not evidence:
        evidence = [FactorEvidence(Poly.const(f.nvars, 1), 1, "constant")]
    cert = RegularityCert(f, chart, open_q, alt_num, tuple(evidence))
    cert.validate()
    return cert


def cert_from_evidence(
    f: RatFunc,
    open_q: Poly,
    chart: str,
    alt_num: Poly,
    evidence: Sequence[FactorEvidence],
) -> RegularityCert:
    """Assemble and validate a certificate from caller-built evidence."""
    cert = RegularityCert(f, chart, open_q, alt_num, tuple(evidence))
    cert.validate()
    return cert


# ---------------------------------------------------------------------------
# Coverage positivity for coverings
# ---------------------------------------------------------------------------


def sum_power_positivity(qs: Sequence[Poly], power: int) -> Optional[EmptyByPositivity]:
    """Certificate that sum(q_i^power) has no real zeros (power a power of two)."""
    if not qs:
        return None
    nvars = qs[0].nvars
    subject = Poly.zero(nvars)
    for q in qs:
        subject = subject + q**power
    direct = find_positivity(subject)
    if direct is not None:
        return direct
    got = _sum_power_wsos(list(qs), power)
    if got is None:
        return None
    terms, c = got
    if c <= 0:
        return None
    cert = EmptyByPositivity(subject, tuple(_materialize(terms)), c)
    cert.validate()
    return cert


def _sum_power_wsos(qs: list[Poly], power: int) -> Optional[tuple[WSOS, Fraction]]:
    nvars = qs[0].nvars
    if power == 1:
        total = Poly.zero(nvars)
        for q in qs:
            total = total + q
        return _wsos_decompose(total)
    if power % 2:
        return None
    half = power // 2
    rec = _sum_power_wsos(qs, half) if half > 1 else _wsos_decompose(_sum(qs))
    if rec is None:
        return None
    inner_terms, inner_c = rec
    if inner_c <= 0:
        return None
    n = Fraction(len(qs))
    sq_terms, sq_c = _wsos_square(inner_terms, inner_c)
    out: WSOS = [(w / n, f) for w, f in sq_terms]
    for i in range(len(qs)):
        for j in range(i + 1, len(qs)):
            out.append((Fraction(1) / n, qs[i] ** half - qs[j] ** half))
    return out, sq_c / n


def _sum(qs: list[Poly]) -> Poly:
    acc = Poly.zero(qs[0].nvars)
    for q in qs:
        acc = acc + q
    return acc


def coverage_certificate(qs: Sequence[Poly], power: int = 2) -> ZeroCert:
    """Certificate that the sets chart minus V(q_i) jointly cover the chart.

    Prefers a positivity identity for sum(q_i^power); falls back to proving
    that the q_i have no common real zeros at all by elimination.
    """
    cert = sum_power_positivity(qs, power)
    if cert is not None:
        return cert
    points = common_rational_zeros(list(qs))
    if points == []:
        nvars = qs[0].nvars
        half = power // 2 if power % 2 == 0 else 1
        dec = tuple(q**half for q in qs)
        subject = Poly.zero(nvars)
        for d in dec:
            subject = subject + d * d
        fp = FinitePoints(subject, (), dec)
        fp.validate()
        return fp
    if points:
        raise CertificateError(f"sets do not cover: common zero at {points[0]}")
    raise Undecidable("cannot certify that the open sets cover the chart")


# ---------------------------------------------------------------------------
# Sampling oracle
# ---------------------------------------------------------------------------


def standard_grid(n: int = 101, lo: Fraction = Fraction(-2), hi: Fraction = Fraction(2)):
    step = (hi - lo) / (n - 1)
    return [lo + k * step for k in range(n)]


def _int_grid_eval(p: Poly, xs: list[Fraction], ys: list[Fraction]):
    """Yield (i, j, value_scaled) with value_scaled = 0 iff p(xs[i], ys[j]) = 0."""
    if p.is_zero():
        for i in range(len(xs)):
            for j in range(len(ys)):
                yield i, j, 0
        return
    denx = 1
    for v in xs:
        denx = denx * v.denominator // math.gcd(denx, v.denominator)
    deny = 1
    for v in ys:
        deny = deny * v.denominator // math.gcd(deny, v.denominator)
    clcm = 1
    for c in p.terms.values():
        clcm = clcm * c.denominator // math.gcd(clcm, c.denominator)
    ax = [int(v * denx) for v in xs]
    ay = [int(v * deny) for v in ys]
    dx = p.degree_in(0)
    dy = p.degree_in(1)
    xpow = [[a**k for k in range(dx + 1)] for a in ax]
    ypow = [[b**k for k in range(dy + 1)] for b in ay]
    terms = [
        (e[0], e[1], int(c * clcm) * denx ** (dx - e[0]) * deny ** (dy - e[1]))
        for e, c in p.terms.items()
    ]
    for i in range(len(ax)):
        xp = xpow[i]
        for j in range(len(ay)):
            yp = ypow[j]
            val = 0
            for ex, ey, ci in terms:
                val += ci * xp[ex] * yp[ey]
            yield i, j, val


def sample_refute(
    f: RatFunc,
    open_q: Poly,
    xs: Optional[list[Fraction]] = None,
    ys: Optional[list[Fraction]] = None,
) -> Optional[tuple[Fraction, Fraction]]:
    """Grid point inside the open set where f's denominator vanishes, if any."""
    if f.nvars != 2:
        raise ValueError("sampling oracle works on two-variable charts")
    xs = xs if xs is not None else standard_grid()
    ys = ys if ys is not None else standard_grid()
    den = f.den
    if den.is_constant():
        return None
    for i, j, val in _int_grid_eval(den, xs, ys):
        if val == 0:
            pt = (xs[i], ys[j])
            if open_q.evaluate(pt) != 0:
                return pt
    return None


def refute_zero_on_set(
    num: Poly,
    open_q: Poly,
    xs: Optional[list[Fraction]] = None,
    ys: Optional[list[Fraction]] = None,
) -> Optional[tuple[Fraction, Fraction]]:
    """Grid point inside the open set where ``num`` vanishes, if any."""
    xs = xs if xs is not None else standard_grid()
    ys = ys if ys is not None else standard_grid()
    if num.is_constant():
        return None
    for i, j, val in _int_grid_eval(num, xs, ys):
        if val == 0:
            pt = (xs[i], ys[j])
            if open_q.evaluate(pt) != 0:
                return pt
    return None

"""Exact sparse multivariate polynomials and rational functions over Q.

A polynomial is a finite map from exponent tuples to nonzero Fraction
coefficients.  Terms are kept in canonical graded-lexicographic order for
serialization, so equal polynomials serialize to identical JSON.  A rational
function is a reduced fraction of two polynomials whose denominator is
normalized to have integer, coprime coefficients with a positive leading
coefficient; this makes the representation of every value unique.

No floating point is used anywhere: all arithmetic is exact.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

Exponent = tuple[int, ...]


class NotDivisible(ArithmeticError):
    """Raised when an exact polynomial quotient does not exist."""


class DivisionByZeroFunction(ZeroDivisionError):
    """Raised when dividing by the zero polynomial or zero function."""


class PoleAtPoint(ArithmeticError):
    """Evaluation hit a point where the denominator vanishes but the numerator does not."""

    def __init__(self, point):
        super().__init__(f"pole at {point}")
        self.point = tuple(point)


class IndeterminateAtPoint(ArithmeticError):
    """Evaluation hit a common zero of numerator and denominator."""

    def __init__(self, point):
        super().__init__(f"indeterminate at {point}")
        self.point = tuple(point)


class DenominatorCollapse(ArithmeticError):
    """A substitution made a denominator identically zero."""


def _grlex_key(e: Exponent):
    return (sum(e), e)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class Poly:
    """Sparse polynomial with exact rational coefficients.

    ``terms`` maps exponent tuples (one entry per variable) to nonzero
    Fractions.  Instances are immutable; all operations return new objects.
    """

    __slots__ = ("nvars", "terms", "_key")

    def __init__(self, nvars: int, terms=None):
        clean: dict[Exponent, Fraction] = {}
        if terms:
            for e, c in (terms.items() if isinstance(terms, dict) else terms):
                e = tuple(int(x) for x in e)
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} has length {len(e)}, expected {nvars}")
                if any(x < 0 for x in e):
                    raise ValueError(f"negative exponent in {e}")
                c = _frac(c)
                if c:
                    prev = clean.get(e)
                    c = c + prev if prev is not None else c
                    if c:
                        clean[e] = c
                    elif prev is not None:
                        del clean[e]
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_key", None)

    def __setattr__(self, *a):  # pragma: no cover - immutability guard
        raise AttributeError("Poly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars, {})

    @classmethod
    def const(cls, nvars: int, value) -> "Poly":
        value = _frac(value)
        if not value:
            return cls.zero(nvars)
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, idx: int) -> "Poly":
        if not 0 <= idx < nvars:
            raise ValueError(f"variable index {idx} out of range for nvars={nvars}")
        e = [0] * nvars
        e[idx] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def degree_in(self, var: int) -> int:
        if not self.terms:
            return 0
        return max(e[var] for e in self.terms)

    def variables_present(self) -> list[int]:
        out = []
        for v in range(self.nvars):
            if any(e[v] for e in self.terms):
                out.append(v)
        return out

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in canonical (descending graded-lex) order."""
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def leading_term(self) -> tuple[Exponent, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def leading_coefficient(self) -> Fraction:
        return self.leading_term()[1]

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        if not isinstance(other, Poly):
            return NotImplemented
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        p = Poly.__new__(Poly)
        object.__setattr__(p, "nvars", self.nvars)
        object.__setattr__(p, "terms", out)
        object.__setattr__(p, "_key", None)
        return p

    def __neg__(self) -> "Poly":
        p = Poly.__new__(Poly)
        object.__setattr__(p, "nvars", self.nvars)
        object.__setattr__(p, "terms", {e: -c for e, c in self.terms.items()})
        object.__setattr__(p, "_key", None)
        return p

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        if not self.terms or not other.terms:
            return Poly.zero(self.nvars)
        out: dict[Exponent, Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e, Fraction(0)) + ca * cb
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        p = Poly.__new__(Poly)
        object.__setattr__(p, "nvars", self.nvars)
        object.__setattr__(p, "terms", out)
        object.__setattr__(p, "_key", None)
        return p

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        c = _frac(c)
        if not c:
            return Poly.zero(self.nvars)
        p = Poly.__new__(Poly)
        object.__setattr__(p, "nvars", self.nvars)
        object.__setattr__(p, "terms", {e: v * c for e, v in self.terms.items()})
        object.__setattr__(p, "_key", None)
        return p

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Poly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def shift_mul(self, e_shift: Exponent, c) -> "Poly":
        c = _frac(c)
        if not c:
            return Poly.zero(self.nvars)
        out = {}
        for e, v in self.terms.items():
            out[tuple(x + y for x, y in zip(e, e_shift))] = v * c
        return Poly(self.nvars, out)

    def derivative(self, var: int) -> "Poly":
        out: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            k = e[var]
            if k:
                e2 = list(e)
                e2[var] = k - 1
                out[tuple(e2)] = c * k
        return Poly(self.nvars, out)

    # -- evaluation and composition ----------------------------------------

    def evaluate(self, point: Sequence) -> Fraction:
        vals = [_frac(v) for v in point]
        if len(vals) != self.nvars:
            raise ValueError("point length mismatch")
        total = Fraction(0)
        powers: list[dict[int, Fraction]] = [dict() for _ in range(self.nvars)]
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    cache = powers[i]
                    p = cache.get(k)
                    if p is None:
                        p = vals[i] ** k
                        cache[k] = p
                    term *= p
            total += term
        return total

    def compose(self, values: Sequence["Poly"]) -> "Poly":
        """Substitute a polynomial for each variable."""
        if len(values) != self.nvars:
            raise ValueError("substitution needs one value per variable")
        if not self.terms:
            return Poly.zero(values[0].nvars if values else self.nvars)
        nv = values[0].nvars if values else self.nvars
        for v in values:
            if v.nvars != nv:
                raise ValueError("substitution values have mixed variable counts")
        powers: list[dict[int, Poly]] = [dict() for _ in range(self.nvars)]
        acc = Poly.zero(nv)
        for e, c in self.terms.items():
            term = Poly.const(nv, c)
            for i, k in enumerate(e):
                if k:
                    cache = powers[i]
                    p = cache.get(k)
                    if p is None:
                        p = values[i] ** k
                        cache[k] = p
                    term = term * p
            acc = acc + term
        return acc

    # -- canonical form ----------------------------------------------------

    def content(self) -> Fraction:
        """Positive rational c with self/c integer-coprime; 0 for the zero poly."""
        if not self.terms:
            return Fraction(0)
        num_gcd = 0
        den_lcm = 1
        for c in self.terms.values():
            num_gcd = math.gcd(num_gcd, abs(c.numerator))
            den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
        return Fraction(num_gcd, den_lcm)

    def normalized(self) -> "Poly":
        """Canonical associate: integer coprime coefficients, positive leading one."""
        if not self.terms:
            return self
        c = self.content()
        if self.leading_coefficient() < 0:
            c = -c
        return self.scale(1 / c)

    # -- comparisons, hashing, rendering ------------------------------------

    def key(self):
        k = self._key
        if k is None:
            k = (self.nvars, tuple(self.sorted_terms()))
            object.__setattr__(self, "_key", k)
        return k

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.key())

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        if not self.terms:
            return "0"
        if names is None:
            names = default_names(self.nvars)
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c}*{body}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        return f"Poly({self.render()})"

    # -- JSON ----------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "n": self.nvars,
            "t": [{"c": format_fraction(c), "e": list(e)} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Poly":
        return cls(int(data["n"]), {tuple(t["e"]): parse_fraction(t["c"]) for t in data["t"]})


def default_names(nvars: int) -> list[str]:
    base = ["x", "y", "z", "w"]
    return base[:nvars] if nvars <= 4 else [f"x{i}" for i in range(nvars)]


def format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def parse_fraction(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(str(s))


# ---------------------------------------------------------------------------
# Exact division, gcd, square-free splitting
# ---------------------------------------------------------------------------


def divide_exact(p: Poly, d: Poly) -> Poly:
    """Return q with p = d*q, or raise NotDivisible."""
    if d.is_zero():
        raise DivisionByZeroFunction("division by the zero polynomial")
    if p.is_zero():
        return Poly.zero(p.nvars)
    if d.is_constant():
        return p.scale(1 / d.constant_value())
    ed, cd = d.leading_term()
    q_terms: dict[Exponent, Fraction] = {}
    rem = p
    while not rem.is_zero():
        er, cr = rem.leading_term()
        diff = tuple(a - b for a, b in zip(er, ed))
        if any(x < 0 for x in diff):
            raise NotDivisible(f"{p.render()} is not divisible by {d.render()}")
        coeff = cr / cd
        q_terms[diff] = coeff
        rem = rem - d.shift_mul(diff, coeff)
    return Poly(p.nvars, q_terms)


def try_divide(p: Poly, d: Poly) -> Optional[Poly]:
    try:
        return divide_exact(p, d)
    except NotDivisible:
        return None


def _as_univar(p: Poly, v: int) -> dict[int, Poly]:
    """View p as a polynomial in variable v with coefficients free of v."""
    out: dict[int, Poly] = {}
    for e, c in p.terms.items():
        k = e[v]
        e2 = list(e)
        e2[v] = 0
        cur = out.get(k)
        t = Poly(p.nvars, {tuple(e2): c})
        out[k] = t if cur is None else cur + t
    return {k: q for k, q in out.items() if not q.is_zero()}


def _from_univar(coeffs: dict[int, Poly], v: int, nvars: int) -> Poly:
    acc = Poly.zero(nvars)
    for k, q in coeffs.items():
        shift = [0] * nvars
        shift[v] = k
        acc = acc + q.shift_mul(tuple(shift), 1)
    return acc


def _univar_prem(a: dict[int, Poly], b: dict[int, Poly], nvars: int) -> dict[int, Poly]:
    """Pseudo-remainder of a by b (both dense-in-one-variable coefficient maps)."""
    da = max(a) if a else -1
    db = max(b)
    lcb = b[db]
    r = dict(a)
    n = da - db + 1
    while r and max(r) >= db:
        dr = max(r)
        lcr = r[dr]
        n -= 1
        new: dict[int, Poly] = {}
        for k, q in r.items():
            new[k] = q * lcb
        for k, q in b.items():
            t = q * lcr
            kk = k + dr - db
            cur = new.get(kk)
            s = (cur - t) if cur is not None else (-t)
            if s.is_zero():
                new.pop(kk, None)
            else:
                new[kk] = s
        r = new
    if n > 0 and r:
        f = lcb ** n
        r = {k: q * f for k, q in r.items()}
    return r


def _coeff_gcd(polys: Iterable[Poly], nvars: int) -> Poly:
    g = Poly.zero(nvars)
    for p in polys:
        g = gcd(g, p)
        if g.is_constant() and not g.is_zero():
            return Poly.const(nvars, 1)
    return g


def _content_primitive(p: Poly, v: int) -> tuple[Poly, dict[int, Poly]]:
    uni = _as_univar(p, v)
    cont = _coeff_gcd(uni.values(), p.nvars)
    if cont.is_constant():
        cont = Poly.const(p.nvars, 1)
        return cont, uni
    return cont, {k: divide_exact(q, cont) for k, q in uni.items()}


def _subresultant_gcd(fp: dict[int, Poly], gp: dict[int, Poly], v: int, nvars: int) -> Poly:
    """Subresultant PRS gcd of two primitive polynomials in variable v."""
    a, b = (fp, gp) if max(fp) >= max(gp) else (gp, fp)
    if max(b) == 0:
        return Poly.const(nvars, 1)
    one = Poly.const(nvars, 1)
    g = one
    h = one
    while True:
        delta = max(a) - max(b)
        r = _univar_prem(a, b, nvars)
        if not r:
            res = _from_univar(b, v, nvars)
            cont, prim = _content_primitive(res, v)
            return _from_univar(prim, v, nvars)
        if max(r) == 0:
            return Poly.const(nvars, 1)
        a = b
        divisor = g * (h ** delta)
        b = {k: divide_exact(q, divisor) for k, q in r.items()}
        g = a[max(a)]
        if delta:
            h = divide_exact(g ** delta, h ** (delta - 1)) if delta > 1 else g
        if max(b) == 0:
            return Poly.const(nvars, 1)


def _univar_gcd_fracs(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    """Monic gcd of two univariate polynomials given as low-to-high coefficient lists."""

    def trim(c):
        while c and not c[-1]:
            c.pop()
        return c

    a, b = trim(list(a)), trim(list(b))
    while b:
        # remainder of a by b
        while len(a) >= len(b) and a:
            f = a[-1] / b[-1]
            off = len(a) - len(b)
            for i, cb in enumerate(b):
                a[off + i] -= f * cb
            trim(a)
        a, b = b, a
    if not a:
        return []
    lead = a[-1]
    return [c / lead for c in a]


def _exp_at(nvars: int, v: int, k: int) -> Exponent:
    e = [0] * nvars
    e[v] = k
    return tuple(e)


def _univar_coeffs_at(p: Poly, v: int, point: dict[int, Fraction]) -> list[Fraction]:
    """Coefficients of p in v after substituting numbers for all other variables."""
    deg = p.degree_in(v)
    out = [Fraction(0)] * (deg + 1)
    for e, c in p.terms.items():
        val = c
        for i, k in enumerate(e):
            if i == v or not k:
                continue
            val *= point[i] ** k
        out[e[v]] += val
    while out and not out[-1]:
        out.pop()
    return out


def _coprime_by_specialization(p: Poly, q: Poly, v: int) -> bool:
    """True when specializing every other variable proves deg_v(gcd) = 0."""
    others = [i for i in set(p.variables_present() + q.variables_present()) if i != v]
    for trial in (2, 3, 5, 7, -2):
        point = {i: Fraction(trial + j) for j, i in enumerate(others)}
        pa = _univar_coeffs_at(p, v, point)
        qa = _univar_coeffs_at(q, v, point)
        if len(pa) != p.degree_in(v) + 1 and len(qa) != q.degree_in(v) + 1:
            continue  # both leading coefficients vanished; pick another point
        g = _univar_gcd_fracs(pa, qa)
        if len(g) == 1:
            return True
        return False
    return False


def gcd(p: Poly, q: Poly) -> Poly:
    """Greatest common divisor, normalized; gcd(p, 0) is normalize(p)."""
    if p.nvars != q.nvars:
        raise ValueError("variable count mismatch")
    if p.is_zero():
        return q.normalized()
    if q.is_zero():
        return p.normalized()
    if p.is_constant() or q.is_constant():
        return Poly.const(p.nvars, 1)
    pv = p.variables_present()
    qv = q.variables_present()
    common = [v for v in pv if v in qv]
    if not common:
        return Poly.const(p.nvars, 1)
    if len(pv) == 1 and len(qv) == 1 and pv == qv:
        # univariate fast path: plain Euclid on coefficient lists
        v0 = pv[0]
        g = _univar_gcd_fracs(univariate_coefficients(p, v0), univariate_coefficients(q, v0))
        return Poly(p.nvars, {_exp_at(p.nvars, v0, i): c for i, c in enumerate(g) if c}).normalized()
    v = common[-1]
    # cheap certificate of coprimality in the main variable
    if _coprime_by_specialization(p, q, v):
        cp = _coeff_gcd(_as_univar(p, v).values(), p.nvars)
        cq = _coeff_gcd(_as_univar(q, v).values(), q.nvars)
        if cp.is_constant() or cq.is_constant():
            return Poly.const(p.nvars, 1)
        return gcd(cp, cq).normalized()
    cont_p, pp_p = _content_primitive(p, v)
    cont_q, pp_q = _content_primitive(q, v)
    cont = gcd(cont_p, cont_q)
    part = _subresultant_gcd(pp_p, pp_q, v, p.nvars)
    return (cont * part).normalized()


def gcd_many(polys: Iterable[Poly]) -> Poly:
    it = iter(polys)
    try:
        g = next(it)
    except StopIteration:
        raise ValueError("gcd of empty collection")
    for p in it:
        g = gcd(g, p)
    return g.normalized() if not g.is_zero() else g


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Write p as a product of pairwise-coprime square-free parts.

    Returns [(g_k, k)] with p = c * prod g_k^k for a constant c; each g_k is
    square-free.  Parts are normalized.
    """
    if p.is_zero():
        raise ValueError("square-free decomposition of zero")
    if p.is_constant():
        return []
    work = p.normalized()
    grads = [work.derivative(v) for v in work.variables_present()]
    b = work
    for d in grads:
        b = gcd(b, d)
    if b.is_constant():
        return [(work, 1)]
    f1 = divide_exact(work, b).normalized()  # product of all distinct factors
    inner = squarefree_decomposition(b)
    rest = f1
    out: list[tuple[Poly, int]] = []
    for h, k in inner:
        out.append((h, k + 1))
        rest = divide_exact(rest, h).normalized()
    if not rest.is_constant():
        out.insert(0, (rest, 1))
    out.sort(key=lambda t: (t[1], t[0].key()))
    return out


def squarefree_part(p: Poly) -> Poly:
    prod = Poly.const(p.nvars, 1)
    for g, _ in squarefree_decomposition(p):
        prod = prod * g
    return prod.normalized()


# ---------------------------------------------------------------------------
# Resultants (Sylvester + fraction-free Bareiss), Sturm, rational roots
# ---------------------------------------------------------------------------


def resultant(p: Poly, q: Poly, v: int) -> Poly:
    """Resultant of p and q with respect to variable v (entries stay polynomial)."""
    up = _as_univar(p, v)
    uq = _as_univar(q, v)
    m = max(up) if up else 0
    n = max(uq) if uq else 0
    if m == 0 and n == 0:
        return Poly.const(p.nvars, 1)
    if m == 0:
        return (up.get(0, Poly.zero(p.nvars))) ** n
    if n == 0:
        return (uq.get(0, Poly.zero(p.nvars))) ** m
    size = m + n
    zero = Poly.zero(p.nvars)
    rows: list[list[Poly]] = []
    for i in range(n):
        row = [zero] * size
        for k, c in up.items():
            row[i + (m - k)] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k, c in uq.items():
            row[i + (n - k)] = c
        rows.append(row)
    return _bareiss_det(rows)


def _bareiss_det(m: list[list[Poly]]) -> Poly:
    n = len(m)
    nvars = m[0][0].nvars
    sign = 1
    prev = Poly.const(nvars, 1)
    a = [row[:] for row in m]
    for k in range(n - 1):
        if a[k][k].is_zero():
            pivot_row = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if pivot_row is None:
                return Poly.zero(nvars)
            a[k], a[pivot_row] = a[pivot_row], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = divide_exact(num, prev)
            a[i][k] = Poly.zero(nvars)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


def univariate_coefficients(p: Poly, v: int) -> list[Fraction]:
    """Low-to-high coefficient list; requires p to involve no variable but v."""
    for w in p.variables_present():
        if w != v:
            raise ValueError("polynomial is not univariate in the requested variable")
    out = [Fraction(0)] * (p.degree_in(v) + 1)
    for e, c in p.terms.items():
        out[e[v]] = c
    return out


def _sign_changes(vals: list[int]) -> int:
    filtered = [v for v in vals if v]
    return sum(1 for a, b in zip(filtered, filtered[1:]) if a * b < 0)


def count_real_roots(coeffs: list[Fraction]) -> int:
    """Number of distinct real roots of a univariate polynomial (Sturm)."""
    c = list(coeffs)
    while c and not c[-1]:
        c.pop()
    if len(c) <= 1:
        return 0

    def deriv(a):
        return [a[i] * i for i in range(1, len(a))]

    def rem(a, b):
        a = list(a)
        while len(a) >= len(b) and any(a):
            f = a[-1] / b[-1]
            off = len(a) - len(b)
            for i, cb in enumerate(b):
                a[off + i] -= f * cb
            while a and not a[-1]:
                a.pop()
        return a

    # square-free normalization keeps the root count honest at multiple roots
    g = _univar_gcd_fracs(c, deriv(c))
    if len(g) > 1:
        a = list(c)
        # exact univariate division a / g
        q = [Fraction(0)] * (len(a) - len(g) + 1)
        while len(a) >= len(g) and any(a):
            f = a[-1] / g[-1]
            q[len(a) - len(g)] = f
            off = len(a) - len(g)
            for i, cb in enumerate(g):
                a[off + i] -= f * cb
            while a and not a[-1]:
                a.pop()
        c = q
        while c and not c[-1]:
            c.pop()
        if len(c) <= 1:
            return 0
    seq = [c, deriv(c)]
    while len(seq[-1]) > 0:
        r = rem(seq[-2], seq[-1])
        if not any(r):
            break
        seq.append([-x for x in r])

    def sg(x):
        return (x > 0) - (x < 0)

    pos_signs = [sg(s[-1]) if s else 0 for s in seq]
    neg_signs = [sg(s[-1]) * (1 if (len(s) - 1) % 2 == 0 else -1) if s else 0 for s in seq]
    return _sign_changes(neg_signs) - _sign_changes(pos_signs)


def _int_divisors(n: int, limit: int = 10**7) -> Optional[list[int]]:
    """All positive divisors of n by trial division, or None when n is too hard."""
    n = abs(n)
    if n == 0:
        return None
    if n > 10**28:
        return None
    factors: dict[int, int] = {}
    d = 2
    steps = 0
    while d * d <= n:
        steps += 1
        if steps > limit:
            return None
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    divs = [1]
    for prime, mult in factors.items():
        divs = [dv * prime**k for dv in divs for k in range(mult + 1)]
    return sorted(divs)


def rational_roots(coeffs: list[Fraction]) -> tuple[list[Fraction], bool]:
    """Rational roots of a univariate polynomial.

    Returns (roots, complete): when ``complete`` is True the polynomial has no
    further real roots beyond the rational ones returned (checked by Sturm
    counting on the deflated polynomial).
    """
    c = list(coeffs)
    while c and not c[-1]:
        c.pop()
    if not c:
        raise ValueError("rational roots of the zero polynomial")
    roots: list[Fraction] = []
    # strip roots at zero
    shift = 0
    while not c[0]:
        c.pop(0)
        shift = 1
    if shift:
        roots.append(Fraction(0))
    if len(c) <= 1:
        return sorted(set(roots)), True
    den_lcm = 1
    for x in c:
        den_lcm = den_lcm * x.denominator // math.gcd(den_lcm, x.denominator)
    ints = [int(x * den_lcm) for x in c]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    ints = [x // g for x in ints]
    p_divs = _int_divisors(ints[0])
    q_divs = _int_divisors(ints[-1])

    def value(r: Fraction) -> Fraction:
        acc = Fraction(0)
        for coef in reversed(ints):
            acc = acc * r + coef
        return acc

    def deflate(poly_ints: list[int], r: Fraction) -> list[Fraction]:
        out = [Fraction(x) for x in poly_ints]
        res: list[Fraction] = [Fraction(0)] * (len(out) - 1)
        acc = Fraction(0)
        for i in range(len(out) - 1, 0, -1):
            acc = acc * r + out[i]
            res[i - 1] = acc
        return res

    if p_divs is None or q_divs is None:
        # coefficients too large to enumerate candidates exactly
        return sorted(set(roots)), False
    found: list[Fraction] = []
    for qd in q_divs:
        for pd in p_divs:
            for sign in (1, -1):
                r = Fraction(sign * pd, qd)
                if value(r) == 0 and r not in found:
                    found.append(r)
    roots.extend(found)
    # deflate all rational roots (with multiplicity) and Sturm-check the rest
    rest = [Fraction(x) for x in ints]
    for r in found:
        while True:
            # synthetic division by (x - r)
            quot: list[Fraction] = [Fraction(0)] * (len(rest) - 1)
            acc = Fraction(0)
            for i in range(len(rest) - 1, 0, -1):
                acc = acc * r + rest[i]
                quot[i - 1] = acc
            remainder = acc * r + rest[0]
            if remainder != 0:
                break
            rest = quot
            if len(rest) <= 1:
                break
    complete = count_real_roots(rest) == 0 if len(rest) > 1 else True
    return sorted(set(roots)), complete


def poly_sqrt(p: Poly) -> Optional[Poly]:
    """Exact square root of a polynomial, or None if p is not a perfect square."""
    if p.is_zero():
        return p
    e, c = p.leading_term()
    if any(k % 2 for k in e) or c < 0:
        return None
    ns = math.isqrt(c.numerator)
    ds = math.isqrt(c.denominator)
    if ns * ns != c.numerator or ds * ds != c.denominator:
        return None
    h = Poly(p.nvars, {tuple(k // 2 for k in e): Fraction(ns, ds)})
    lead2 = h.leading_term()[1] * 2
    lead_e = h.leading_term()[0]
    for _ in range(4 * len(p.terms) + 16):
        r = p - h * h
        if r.is_zero():
            return h
        er, cr = r.leading_term()
        diff = tuple(a - b for a, b in zip(er, lead_e))
        if any(k < 0 for k in diff):
            return None
        h = h + Poly(p.nvars, {diff: cr / lead2})
    return None


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


class RatFunc:
    """Reduced fraction of two polynomials in canonical form.

    Invariants: the denominator is nonzero, gcd(num, den) is constant, and the
    denominator has integer coprime coefficients with positive leading
    coefficient (so every value has exactly one representation).
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Optional[Poly] = None, _canonical: bool = False):
        if den is None:
            den = Poly.const(num.nvars, 1)
        if den.is_zero():
            raise DivisionByZeroFunction("zero denominator")
        if num.nvars != den.nvars:
            raise ValueError("variable count mismatch")
        if not _canonical:
            if num.is_zero():
                den = Poly.const(num.nvars, 1)
            else:
                g = gcd(num, den)
                if not g.is_constant():
                    num = divide_exact(num, g)
                    den = divide_exact(den, g)
                c = den.content()
                if den.leading_coefficient() < 0:
                    c = -c
                num = num.scale(1 / c)
                den = den.scale(1 / c)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):  # pragma: no cover - immutability guard
        raise AttributeError("RatFunc is immutable")

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFunc":
        return cls(p, Poly.const(p.nvars, 1), _canonical=True)

    @classmethod
    def const(cls, nvars: int, value) -> "RatFunc":
        return cls.from_poly(Poly.const(nvars, value))

    @classmethod
    def variable(cls, nvars: int, idx: int) -> "RatFunc":
        return cls.from_poly(Poly.variable(nvars, idx))

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_poly(self) -> Poly:
        if not self.is_polynomial():
            raise ValueError("not a polynomial")
        return self.num.scale(1 / self.den.constant_value())

    def __add__(self, other: "RatFunc") -> "RatFunc":
        if not isinstance(other, RatFunc):
            return NotImplemented
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return self + (-other)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den, _canonical=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RatFunc(self.num.scale(other), self.den)
        if not isinstance(other, RatFunc):
            return NotImplemented
        g1 = gcd(self.num, other.den)
        g2 = gcd(other.num, self.den)
        a = self.num if g1.is_constant() else divide_exact(self.num, g1)
        d2 = other.den if g1.is_constant() else divide_exact(other.den, g1)
        b = other.num if g2.is_constant() else divide_exact(other.num, g2)
        d1 = self.den if g2.is_constant() else divide_exact(self.den, g2)
        return RatFunc(a * b, d1 * d2)

    __rmul__ = __mul__

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if not isinstance(other, RatFunc):
            return NotImplemented
        if other.is_zero():
            raise DivisionByZeroFunction("division by the zero function")
        return self * other.invert()

    def invert(self) -> "RatFunc":
        if self.is_zero():
            raise DivisionByZeroFunction("inverse of the zero function")
        return RatFunc(self.den, self.num)

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return self.invert() ** (-n)
        return RatFunc(self.num**n, self.den**n)

    def __eq__(self, other) -> bool:
        return isinstance(other, RatFunc) and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num.key(), self.den.key()))

    def evaluate(self, point: Sequence) -> Fraction:
        dv = self.den.evaluate(point)
        nv = self.num.evaluate(point)
        if dv == 0:
            if nv == 0:
                raise IndeterminateAtPoint(point)
            raise PoleAtPoint(point)
        return nv / dv

    def substitute(self, values: Sequence["RatFunc"]) -> "RatFunc":
        """Compose with one rational function per variable."""
        if len(values) != self.nvars:
            raise ValueError("substitution needs one value per variable")
        num = _compose_poly_rational(self.num, values)
        den = _compose_poly_rational(self.den, values)
        if den.is_zero():
            raise DenominatorCollapse("denominator became identically zero under substitution")
        return num / den

    def substitute_polys(self, values: Sequence[Poly]) -> "RatFunc":
        """Faster composition along a polynomial map."""
        num = self.num.compose(values)
        den = self.den.compose(values)
        if den.is_zero():
            raise DenominatorCollapse("denominator became identically zero under substitution")
        return RatFunc(num, den)

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        if self.is_polynomial():
            return self.as_poly().render(names)
        return f"({self.num.render(names)})/({self.den.render(names)})"

    def __repr__(self) -> str:
        return f"RatFunc({self.render()})"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "RatFunc":
        return cls(Poly.from_json(data["num"]), Poly.from_json(data["den"]))


def _compose_poly_rational(p: Poly, values: Sequence[RatFunc]) -> RatFunc:
    """p(values) computed over a single common denominator."""
    nv = values[0].nvars if values else p.nvars
    if p.is_zero():
        return RatFunc.const(nv, 0)
    max_deg = [p.degree_in(v) for v in range(p.nvars)]
    num_pows: list[list[Poly]] = []
    den_pows: list[list[Poly]] = []
    for v, val in enumerate(values):
        npows = [Poly.const(nv, 1)]
        dpows = [Poly.const(nv, 1)]
        for _ in range(max_deg[v]):
            npows.append(npows[-1] * val.num)
            dpows.append(dpows[-1] * val.den)
        num_pows.append(npows)
        den_pows.append(dpows)
    acc = Poly.zero(nv)
    for e, c in p.terms.items():
        term = Poly.const(nv, c)
        for v, k in enumerate(e):
            term = term * num_pows[v][k] * den_pows[v][max_deg[v] - k]
        acc = acc + term
    den = Poly.const(nv, 1)
    for v in range(p.nvars):
        den = den * den_pows[v][max_deg[v]]
    return RatFunc(acc, den)


def arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    """Dispatch basic arithmetic by name; pow takes the exponent from b."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "pow":
        if not (b.is_polynomial() and b.as_poly().is_constant()):
            raise ValueError("pow exponent must be a constant")
        e = b.as_poly().constant_value()
        if e.denominator != 1 or e < 0:
            raise ValueError("pow exponent must be a non-negative integer")
        return a ** int(e)
    raise ValueError(f"unknown operation {op!r}")


def poly_from_string(expr: str, names: Sequence[str]) -> Poly:
    """Tiny helper for tests: parse '+/-' separated monomials like '2*x^2*y - 1/3'."""
    expr = expr.replace("-", "+-").replace(" ", "")
    nvars = len(names)
    acc = Poly.zero(nvars)
    for chunk in expr.split("+"):
        if not chunk:
            continue
        neg = chunk.startswith("-")
        if neg:
            chunk = chunk[1:]
        coeff = Fraction(1)
        e = [0] * nvars
        for factor in chunk.split("*"):
            if not factor:
                continue
            base, _, power = factor.partition("^")
            if base in names:
                e[names.index(base)] += int(power) if power else 1
            else:
                coeff *= Fraction(base) ** (int(power) if power else 1)
        if neg:
            coeff = -coeff
        acc = acc + Poly(nvars, {tuple(e): coeff})
    return acc


def dumps_canonical(obj) -> str:
    """Deterministic JSON text used for golden comparisons."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))

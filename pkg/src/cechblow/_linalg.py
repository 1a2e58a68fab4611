"""Exact sparse linear algebra over the rationals (internal helper).

Rows are dicts mapping column index to a nonzero Fraction.  Elimination is
fraction-free on integer-scaled rows, so entries stay small integers for the
structured systems produced by coefficient matching.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional


def _integerize(row: dict[int, Fraction]) -> dict[int, int]:
    if not row:
        return {}
    lcm = 1
    for v in row.values():
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = {c: int(v * lcm) for c, v in row.items()}
    g = 0
    for v in ints.values():
        g = math.gcd(g, abs(v))
    if g > 1:
        ints = {c: v // g for c, v in ints.items()}
    return ints


def _combine(row: dict[int, int], pivot_row: dict[int, int], col: int) -> dict[int, int]:
    """Eliminate ``col`` from row using pivot_row (fraction-free)."""
    a = pivot_row[col]
    b = row[col]
    g = math.gcd(abs(a), abs(b))
    fa, fb = a // g, b // g
    out: dict[int, int] = {}
    for c, v in row.items():
        out[c] = v * fa
    for c, v in pivot_row.items():
        nv = out.get(c, 0) - v * fb
        if nv:
            out[c] = nv
        else:
            out.pop(c, None)
    g = 0
    for v in out.values():
        g = math.gcd(g, abs(v))
    if g > 1:
        out = {c: v // g for c, v in out.items()}
    return out


def solve_system(
    rows: list[dict[int, Fraction]],
    rhs: list[Fraction],
    ncols: int,
) -> tuple[Optional[list[Fraction]], list[list[Fraction]]]:
    """Solve A x = b exactly.

    Returns ``(particular, basis)`` where ``particular`` is one solution (or
    None when the system is inconsistent) and ``basis`` spans the nullspace of
    A.  The result is deterministic: pivots are chosen in column order.
    """
    rhs_col = ncols
    pivots: dict[int, dict[int, int]] = {}
    inconsistent = False
    for row, b in zip(rows, rhs):
        work = dict(row)
        if b:
            work[rhs_col] = b
        r = _integerize(work)
        while r:
            cols = [c for c in r if c != rhs_col]
            if not cols:
                inconsistent = True
                break
            lead = min(cols)
            p = pivots.get(lead)
            if p is None:
                if r[lead] < 0:
                    r = {c: -v for c, v in r.items()}
                pivots[lead] = r
                break
            r = _combine(r, p, lead)
    # full reduction: clear pivot columns from other pivot rows
    for col in sorted(pivots, reverse=True):
        p = pivots[col]
        for col2 in list(pivots):
            row2 = pivots[col2]
            if col2 != col and col in row2:
                pivots[col2] = _combine(row2, p, col)
    basis = _nullspace(pivots, ncols, rhs_col)
    if inconsistent:
        return None, basis
    particular = [Fraction(0)] * ncols
    for col, row in pivots.items():
        particular[col] = Fraction(row.get(rhs_col, 0), row[col])
    return particular, basis


def _nullspace(pivots: dict[int, dict[int, int]], ncols: int, rhs_col: int) -> list[list[Fraction]]:
    basis: list[list[Fraction]] = []
    pivot_cols = set(pivots)
    for free in range(ncols):
        if free in pivot_cols:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for col, row in pivots.items():
            coef = row.get(free)
            if coef:
                vec[col] = Fraction(-coef, row[col])
        basis.append(vec)
    return basis


def nullspace(rows: list[dict[int, Fraction]], ncols: int) -> list[list[Fraction]]:
    particular, basis = solve_system(rows, [Fraction(0)] * len(rows), ncols)
    return basis


def in_span(basis: list[list[Fraction]], vector: list[Fraction]) -> bool:
    """Exact membership of ``vector`` in the span of ``basis``."""
    ncols = len(vector)
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    for i in range(ncols):
        row = {j: basis[j][i] for j in range(len(basis)) if basis[j][i]}
        rows.append(row)
        rhs.append(vector[i])
    particular, _ = solve_system(rows, rhs, len(basis))
    return particular is not None

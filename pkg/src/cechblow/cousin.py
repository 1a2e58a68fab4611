"""Additive Cousin data on a finite covering: validation, the obstruction
cocycle, direct bounded solving, and solving after blowing up.

Data assigns a rational function f_i to each covering set so that f_i - f_j
is regular on each overlap.  A solution is one rational function whose
difference with every f_i is regular on that set; after blowing up, the
solution lives per leaf chart of a tower.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .poly import Poly, RatFunc
from .realzero import (
    NotRegular,
    RegularityCert,
    Undecidable,
    certify_regular,
)
from .geometry import Covering, Tower, base_tower, pullback_covering
from .cech import (
    BoundedPreimage,
    Cochain,
    SolveOutcome,
    index_tuples,
    is_coboundary_bounded,
    make_cochain,
    overlap_poly,
    solve_cocycle_blownup,
)


class InvalidData(Exception):
    def __init__(self, pair, witness):
        super().__init__(f"difference for pair {pair} is not regular (witness {witness})")
        self.pair = pair
        self.witness = witness


@dataclass(frozen=True)
class CousinData:
    covering: Covering
    parts: tuple[RatFunc, ...]
    validity: dict[tuple[int, int], RegularityCert]

    def to_json(self) -> dict:
        return {
            "covering": self.covering.to_json(),
            "parts": [f.to_json() for f in self.parts],
            "validity": {f"{i},{j}": c.to_json() for (i, j), c in self.validity.items()},
        }


@dataclass(frozen=True)
class CousinSolution:
    tower: Optional[Tower]
    functions: dict[str, RatFunc]  # leaf chart -> solution (key "base" when no tower)
    certs: dict[str, dict[int, RegularityCert]]  # leaf -> set index -> certificate

    def replay(self) -> None:
        for leaf_certs in self.certs.values():
            for cert in leaf_certs.values():
                cert.validate()


def make_cousin_data(covering: Covering, parts: Sequence[RatFunc]) -> CousinData:
    """Check that all pairwise differences are regular on the overlaps."""
    if len(parts) != len(covering):
        raise ValueError("need exactly one part per covering set")
    validity: dict[tuple[int, int], RegularityCert] = {}
    n = len(covering)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            q = covering.sets[i - 1].q * covering.sets[j - 1].q
            diff = parts[i - 1] - parts[j - 1]
            try:
                validity[(i, j)] = certify_regular(diff, q, covering.chart)
            except NotRegular as e:
                raise InvalidData((i, j), e.witness) from None
    return CousinData(covering, tuple(parts), validity)


def validate(data: CousinData) -> Cochain:
    """The obstruction 1-cocycle g_{ij} = f_i - f_j with regularity certificates."""
    n = len(data.covering)
    values = {}
    for i, j in index_tuples(n, 1):
        values[(i, j)] = data.parts[i - 1] - data.parts[j - 1]
    cochain = make_cochain(data.covering, 1, values, "regular")
    return cochain


def solve_direct(data: CousinData, deg_bound: int, power_bound: int) -> Optional[CousinSolution]:
    """Solve without blowing up via the bounded coboundary search.

    A preimage h of the obstruction cocycle glues f := f_i + h_i; the result
    is verified independent of i and certified on every set.
    """
    zeta = validate(data)
    pre = is_coboundary_bounded(zeta, deg_bound, power_bound)
    if pre is None:
        return None
    n = len(data.covering)
    candidates = [data.parts[i - 1] + pre.cochain.values[(i,)] for i in range(1, n + 1)]
    f = candidates[0]
    for other in candidates[1:]:
        if other != f:
            return None
    certs: dict[int, RegularityCert] = {}
    for i in range(1, n + 1):
        diff = f - data.parts[i - 1]
        certs[i] = certify_regular(diff, data.covering.sets[i - 1].q, data.covering.chart)
    return CousinSolution(None, {"base": f}, {"base": certs})


@dataclass(frozen=True)
class BlownupSolveResult:
    status: str  # "solved" | "failed"
    solution: Optional[CousinSolution] = None
    cocycle_outcome: Optional[SolveOutcome] = None
    zeta: Optional[Cochain] = None
    report: str = ""


def solve_blownup(data: CousinData, nmax: int = 4, max_depth: int = 6) -> BlownupSolveResult:
    """Pull the obstruction cocycle back and solve it by blowing up, then glue
    the solution per leaf chart and certify it."""
    zeta = validate(data)
    outcome = solve_cocycle_blownup(zeta, nmax=nmax, max_depth=max_depth)
    if outcome.status != "solved":
        return BlownupSolveResult("failed", cocycle_outcome=outcome, zeta=zeta, report=outcome.report)
    tower = outcome.tower
    n = len(data.covering)
    functions: dict[str, RatFunc] = {}
    certs: dict[str, dict[int, RegularityCert]] = {}
    for leaf in tower.leaf_ids():
        k = outcome.preimages[leaf]
        parts_pulled = [tower.pull_ratfunc(leaf, p) for p in data.parts]
        # k_j - k_i = f_i^t - f_j^t, so f := f_i^t + k_i is independent of i
        candidates = [parts_pulled[i - 1] + k[(i,)] for i in range(1, n + 1)]
        f = candidates[0]
        for other in candidates[1:]:
            if other != f:
                return BlownupSolveResult(
                    "failed",
                    cocycle_outcome=outcome,
                    zeta=zeta,
                    report=f"glued function differs between sets on leaf {leaf}",
                )
        functions[leaf] = f
        leaf_certs: dict[int, RegularityCert] = {}
        pulled_cov = outcome.pulled_cocycle[leaf].covering
        for i in range(1, n + 1):
            diff = f - parts_pulled[i - 1]
            # the difference is the solved 0-cochain itself, already certified
            if diff == k[(i,)]:
                leaf_certs[i] = outcome.certs[leaf][(i,)]
            else:
                leaf_certs[i] = certify_regular(diff, pulled_cov.sets[i - 1].q, leaf)
        certs[leaf] = leaf_certs
    solution = CousinSolution(tower, functions, certs)
    return BlownupSolveResult("solved", solution=solution, cocycle_outcome=outcome, zeta=zeta)


def same_principal_part(f: RatFunc, g: RatFunc, open_q: Poly, chart: str = "base") -> bool:
    """True when f - g is regular on the open set; Undecidable propagates."""
    try:
        certify_regular(f - g, open_q, chart)
        return True
    except NotRegular:
        return False

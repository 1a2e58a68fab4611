"""Batch front end: parse instance files, dispatch to the solvers, write
machine-readable JSON reports, and replay certificates independently.

Exit status: 0 for solved/resolved/found/equal outcomes, 2 for bounded-search
negatives, 1 for invalid input.  Reports are byte-deterministic; timing is
written only with --timing since wall-clock values are not reproducible.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
import time
from fractions import Fraction
from typing import Any, Optional

from .poly import Poly, RatFunc, format_fraction, parse_fraction
from . import realzero
from .realzero import RegularityCert, zero_cert_from_json
from . import geometry
from .geometry import Tower, make_covering
from . import cech
from . import cousin as cousin_mod
from . import bundle as bundle_mod

SCHEMA = "cechblow/1"


class ValidationError(Exception):
    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer
        self.message = message


def _need(data: dict, key: str, pointer: str):
    if key not in data:
        raise ValidationError(f"{pointer}/{key}", "missing required field")
    return data[key]


def _parse_poly(data: Any, pointer: str) -> Poly:
    if not isinstance(data, dict):
        raise ValidationError(pointer, "expected a polynomial object")
    try:
        n = int(_need(data, "n", pointer))
        terms = _need(data, "t", pointer)
        if not isinstance(terms, list):
            raise ValidationError(f"{pointer}/t", "expected a list of terms")
        out = {}
        for i, t in enumerate(terms):
            if not isinstance(t, dict) or "c" not in t or "e" not in t:
                raise ValidationError(f"{pointer}/t/{i}", "term needs fields c and e")
            try:
                coeff = parse_fraction(t["c"])
            except (ValueError, ZeroDivisionError):
                raise ValidationError(f"{pointer}/t/{i}/c", "bad rational literal") from None
            exps = t["e"]
            if not isinstance(exps, list) or len(exps) != n or not all(
                isinstance(e, int) and e >= 0 for e in exps
            ):
                raise ValidationError(f"{pointer}/t/{i}/e", f"expected {n} non-negative integers")
            out[tuple(exps)] = coeff
        return Poly(n, out)
    except ValidationError:
        raise
    except Exception as e:
        raise ValidationError(pointer, str(e)) from None


def _parse_ratfunc(data: Any, pointer: str) -> RatFunc:
    if not isinstance(data, dict) or "num" not in data or "den" not in data:
        raise ValidationError(pointer, "expected an object with num and den")
    num = _parse_poly(data["num"], f"{pointer}/num")
    den = _parse_poly(data["den"], f"{pointer}/den")
    if den.is_zero():
        raise ValidationError(f"{pointer}/den", "denominator is zero")
    return RatFunc(num, den)


def _parse_limits(data: dict, pointer: str) -> dict:
    limits = data.get("limits", {})
    if not isinstance(limits, dict):
        raise ValidationError(f"{pointer}/limits", "expected an object")
    return {
        "deg": int(limits.get("deg", 6)),
        "power": int(limits.get("power", 4)),
        "depth": int(limits.get("depth", 6)),
    }


def _parse_point(data: Any, pointer: str):
    if not isinstance(data, list) or len(data) != 2:
        raise ValidationError(pointer, "expected a two-entry point")
    return (parse_fraction(data[0]), parse_fraction(data[1]))


# ---------------------------------------------------------------------------
# Instance runners
# ---------------------------------------------------------------------------


def _collect_regularity(certs) -> list[dict]:
    return [c.to_json() for c in certs]


def _run_cousin(instance: dict, limits: dict) -> tuple[str, dict]:
    covering_data = _need(instance, "covering", "")
    if not isinstance(covering_data, list) or not covering_data:
        raise ValidationError("/covering", "expected a non-empty list of polynomials")
    qs = [_parse_poly(q, f"/covering/{i}") for i, q in enumerate(covering_data)]
    parts_data = _need(instance, "parts", "")
    if not isinstance(parts_data, list) or len(parts_data) != len(qs):
        raise ValidationError("/parts", "expected one part per covering set")
    parts = [_parse_ratfunc(p, f"/parts/{i}") for i, p in enumerate(parts_data)]
    cov = make_covering(qs)
    try:
        data = cousin_mod.make_cousin_data(cov, parts)
    except cousin_mod.InvalidData as e:
        raise ValidationError(f"/parts/{e.pair[0] - 1}", f"difference not regular, witness {e.witness}")
    direct = cousin_mod.solve_direct(data, limits["deg"], limits["power"])
    if direct is not None:
        certs = _collect_regularity(direct.certs["base"].values())
        body = {
            "outcome": "solved",
            "mode": "direct",
            "tower": {"base": "base", "steps": []},
            "solution": {"base": direct.functions["base"].to_json()},
            "certificates": certs,
        }
        return "solved", body
    out = cousin_mod.solve_blownup(data, nmax=limits["power"], max_depth=limits["depth"])
    if out.status != "solved":
        return "failed", {
            "outcome": "failed",
            "mode": "blownup",
            "report": out.report,
            "zeta": out.zeta.to_json() if out.zeta else None,
        }
    sol = out.solution
    certs = []
    for leaf_certs in sol.certs.values():
        certs.extend(_collect_regularity(leaf_certs.values()))
    body = {
        "outcome": "solved",
        "mode": "blownup",
        "tower": sol.tower.to_json(),
        "power": out.cocycle_outcome.power,
        "solution": {leaf: f.to_json() for leaf, f in sol.functions.items()},
        "certificates": certs,
        "zeta": out.zeta.to_json(),
    }
    return "solved", body


def _run_cech_solve(instance: dict, limits: dict) -> tuple[str, dict]:
    covering_data = _need(instance, "covering", "")
    qs = [_parse_poly(q, f"/covering/{i}") for i, q in enumerate(covering_data)]
    cov = make_covering(qs)
    cocycle_data = _need(instance, "cocycle", "")
    if not isinstance(cocycle_data, dict):
        raise ValidationError("/cocycle", "expected an object of indexed values")
    values = {}
    for key, v in cocycle_data.items():
        try:
            idx = tuple(int(part) for part in key.split(","))
        except ValueError:
            raise ValidationError(f"/cocycle/{key}", "bad index tuple") from None
        values[idx] = _parse_ratfunc(v, f"/cocycle/{key}")
    f = cech.make_cochain(cov, 1, values, "regular")
    if not cech.is_cocycle(f):
        raise ValidationError("/cocycle", "values do not form a cocycle")
    out = cech.solve_cocycle_blownup(f, nmax=limits["power"], max_depth=limits["depth"])
    if out.status != "solved":
        return "failed", {
            "outcome": "failed",
            "report": out.report,
            "tower": out.tower.to_json(),
            "obstructions": [
                {"chart": leaf, "point": [format_fraction(c) for c in pt]}
                for leaf, pt in out.obstructions
            ],
        }
    certs = []
    for leaf_certs in out.certs.values():
        certs.extend(_collect_regularity(leaf_certs.values()))
    residual = {}
    for leaf in out.tower.leaf_ids():
        k = out.preimages[leaf]
        g = out.pulled_cocycle[leaf]
        entries = {}
        for i, j in cech.index_tuples(len(cov), 1):
            diff = k[(j,)] - k[(i,)] - g.values[(i, j)]
            entries[f"{i},{j}"] = diff.to_json()
        residual[leaf] = entries
    body = {
        "outcome": "solved",
        "tower": out.tower.to_json(),
        "power": out.power,
        "preimage": {
            leaf: {str(i[0]): v.to_json() for i, v in kv.items()}
            for leaf, kv in out.preimages.items()
        },
        "residual": residual,
        "certificates": certs,
    }
    return "solved", body


def _run_snc(instance: dict, limits: dict) -> tuple[str, dict]:
    p = _parse_poly(_need(instance, "poly", ""), "/poly")
    if p.is_zero():
        raise ValidationError("/poly", "cannot resolve the zero polynomial")
    max_depth = int(instance.get("max_depth", limits["depth"]))
    res = geometry.transform_to_snc(p, max_depth)
    reports = {
        leaf: [a.to_json() for a in answers] for leaf, answers in res.reports.items()
    }
    certs = [cert.to_json() for cert in res.factor_states.values()]
    body = {
        "outcome": "resolved" if res.status == "resolved" else "depth_exceeded",
        "tower": res.tower.to_json(),
        "depth": res.depth,
        "reports": reports,
        "certificates": certs,
    }
    return ("solved" if res.status == "resolved" else "failed"), body


def _run_order_division(instance: dict, limits: dict) -> tuple[str, dict]:
    polys_data = _need(instance, "polys", "")
    fs = [_parse_poly(p, f"/polys/{i}") for i, p in enumerate(polys_data)]
    max_depth = int(instance.get("max_depth", limits["depth"]))
    try:
        res = geometry.order_by_division(fs, max_depth)
    except ValueError as e:
        raise ValidationError("/polys", str(e)) from None
    chains = [
        {
            "chart": ch.chart,
            "point": [format_fraction(c) for c in ch.point],
            "exponents": [list(v) for v in ch.exponents],
        }
        for ch in res.chains
    ]
    body = {
        "outcome": "ordered" if res.status == "ordered" else "depth_exceeded",
        "tower": res.tower.to_json(),
        "depth": res.depth,
        "chains": chains,
        "certificates": [],
    }
    return ("solved" if res.status == "ordered" else "failed"), body


def _run_xi(instance: dict, limits: dict) -> tuple[str, dict]:
    k = int(_need(instance, "k", ""))
    ll = int(_need(instance, "l", ""))
    if k < 0 or ll < 0:
        raise ValidationError("/k", "need k, l >= 0")
    res = bundle_mod.search_trivializing_tower(
        k, ll, limits["depth"], limits["deg"], limits["power"]
    )
    certs = []
    section = None
    if res.section is not None:
        section = {}
        for leaf, data in res.section.leaves.items():
            section[leaf] = {"s1": data.s1.to_json(), "s2": data.s2.to_json()}
            certs.extend(_collect_regularity([data.cert1, data.cert2, *data.nv_certs]))
    body = {
        "outcome": "found" if res.status == "found" else "not_found",
        "k": k,
        "l": ll,
        "min_depth": res.depth if res.status == "found" else None,
        "tower": res.tower.to_json() if res.tower else None,
        "section": section,
        "audits": [
            {"centers": [[c[0], c[1]] for c in centers], "verdict": verdict}
            for centers, verdict in res.audits
        ],
        "certificates": certs,
    }
    return ("solved" if res.status == "found" else "failed"), body


def _run_limit_eq(instance: dict, limits: dict) -> tuple[str, dict]:
    open_q = _parse_poly(_need(instance, "open_q", ""), "/open_q")
    towers = {}
    sections = {}
    for label in ("a", "b"):
        tower_data = _need(instance, f"tower_{label}", "")
        tower = Tower.from_json(tower_data)
        values_data = _need(instance, f"values_{label}", "")
        values = {
            leaf: _parse_ratfunc(v, f"/values_{label}/{leaf}") for leaf, v in values_data.items()
        }
        try:
            sections[label] = geometry.limit_section(tower, open_q, values)
        except (realzero.NotRegular, realzero.Undecidable, ValueError) as e:
            raise ValidationError(f"/values_{label}", str(e)) from None
        towers[label] = tower
    verdict = geometry.limit_eq(sections["a"], sections["b"])
    if isinstance(verdict, geometry.Incomparable):
        return "failed", {"outcome": "incomparable", "reason": verdict.reason, "certificates": []}
    certs = []
    for s in sections.values():
        certs.extend(_collect_regularity(s.certs.values()))
    body = {"outcome": verdict, "certificates": certs}
    return ("solved" if verdict == "equal" else "failed"), body


RUNNERS = {
    "cousin": _run_cousin,
    "cech_solve": _run_cech_solve,
    "snc": _run_snc,
    "order_by_division": _run_order_division,
    "xi_experiment": _run_xi,
    "limit_eq": _run_limit_eq,
}

VERB_TO_KIND = {
    "solve-cousin": "cousin",
    "solve-cocycle": "cech_solve",
    "resolve-snc": "snc",
    "order-division": "order_by_division",
    "xi": "xi_experiment",
    "limit-eq": "limit_eq",
}


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".report-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_instance(instance_path: str, out_path: Optional[str], *, kind: Optional[str] = None,
                 overrides: Optional[dict] = None, seed: int = 0, with_timing: bool = False) -> int:
    try:
        with open(instance_path) as handle:
            instance = json.load(handle)
    except OSError as e:
        print(f"error: cannot read instance: {e}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as e:
        print(f"error: /: invalid JSON ({e})", file=sys.stderr)
        return 1
    if not isinstance(instance, dict):
        print("error: /: instance must be an object", file=sys.stderr)
        return 1
    actual_kind = instance.get("kind", kind)
    if kind is not None and actual_kind != kind:
        print(f"error: /kind: expected {kind!r}", file=sys.stderr)
        return 1
    if actual_kind not in RUNNERS:
        print(f"error: /kind: unknown instance kind {actual_kind!r}", file=sys.stderr)
        return 1
    try:
        limits = _parse_limits(instance, "")
        if overrides:
            limits.update({k: v for k, v in overrides.items() if v is not None})
        start = time.monotonic()
        status, body = RUNNERS[actual_kind](instance, limits)
        elapsed = time.monotonic() - start
    except ValidationError as e:
        print(f"error: {e.pointer}: {e.message}", file=sys.stderr)
        return 1
    report = {
        "schema": SCHEMA,
        "kind": actual_kind,
        "seed": seed,
        "limits": limits,
        "instance": instance,
        "timing_seconds": round(elapsed, 3) if with_timing else None,
    }
    report.update(body)
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out_path:
        _atomic_write(out_path, text)
    else:
        sys.stdout.write(text)
    print(f"{actual_kind}: {body.get('outcome')}", file=sys.stderr)
    return 0 if status == "solved" else 2


def verify_report(path: str) -> int:
    """Replay every certificate embedded in a report (poly + realzero only)."""
    try:
        with open(path) as handle:
            report = json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: cannot read report: {e}", file=sys.stderr)
        return 1
    certs = report.get("certificates", [])
    failures = 0
    for i, data in enumerate(certs):
        try:
            if data.get("kind") == "regularity":
                RegularityCert.from_json(data).validate()
            else:
                zero_cert_from_json(data).validate()
            print(f"certificate {i}: OK")
        except Exception as e:
            failures += 1
            print(f"certificate {i}: FAILED ({e})")
    # residual cochains must be exactly zero when present
    for leaf, entries in (report.get("residual") or {}).items():
        for key, value in entries.items():
            f = RatFunc.from_json(value)
            if not f.is_zero():
                failures += 1
                print(f"residual {leaf}[{key}]: NONZERO")
    print(f"verified {len(certs)} certificates, {failures} failures")
    return 0 if failures == 0 else 2


def selftest(seed: int) -> int:
    """Quick internal checks with seeded randomness."""
    rng = random.Random(seed)

    def rand_poly(deg=2, terms=4):
        out = {}
        for _ in range(terms):
            e = (rng.randint(0, deg), rng.randint(0, deg))
            out[e] = Fraction(rng.randint(-4, 4))
        return Poly(2, out)

    failures = 0

    def check(name, ok):
        nonlocal failures
        print(f"{name}: {'OK' if ok else 'FAIL'}")
        if not ok:
            failures += 1

    a = RatFunc(rand_poly(), rand_poly() + Poly.const(2, 1))
    b = RatFunc(rand_poly(), rand_poly() + Poly.const(2, 3))
    c = RatFunc(rand_poly(), rand_poly() + Poly.const(2, 5))
    check("ring associativity", (a + b) + c == a + (b + c))
    check("distributivity", a * (b + c) == a * b + a * c)
    q1 = Poly.from_json({"n": 2, "t": [{"c": "1", "e": [2, 0]}, {"c": "1", "e": [0, 2]}]})
    q2 = Poly.from_json(
        {"n": 2, "t": [{"c": "1", "e": [2, 0]}, {"c": "-2", "e": [1, 0]}, {"c": "1", "e": [0, 0]}, {"c": "1", "e": [0, 2]}]}
    )
    cov = make_covering([q1, q2])
    values = {(1, 2): a - b}
    f = cech.make_cochain(cov, 1, values)
    check("d of d vanishes", cech.differential(cech.differential(f)).is_zero())
    ans = realzero.is_unit(q1 + Poly.const(2, 1))
    check("positivity certificate", ans.is_yes)
    return 0 if failures == 0 else 2


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="cechblow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--instance", required=True, help="path to the instance JSON")
        p.add_argument("--out", default=None, help="path for the JSON report")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-depth", type=int, default=None)
        p.add_argument("--deg", type=int, default=None)
        p.add_argument("--power", type=int, default=None)
        p.add_argument("--jobs", type=int, default=1, help="reserved for batch runs")
        p.add_argument("--timing", action="store_true", help="write wall-clock timing into the report")

    run_parser = sub.add_parser("run", help="dispatch on the instance's kind field")
    add_common(run_parser)
    for verb in VERB_TO_KIND:
        p = sub.add_parser(verb, help=f"run a {VERB_TO_KIND[verb]} instance")
        add_common(p)
    verify_parser = sub.add_parser("verify", help="replay certificates from a report")
    verify_parser.add_argument("--report", required=True)
    selftest_parser = sub.add_parser("selftest", help="run quick internal checks")
    selftest_parser.add_argument("--seed", type=int, default=0)

    args = parser.parse_args(argv)
    if args.command == "verify":
        return verify_report(args.report)
    if args.command == "selftest":
        return selftest(args.seed)
    kind = VERB_TO_KIND.get(args.command)
    overrides = {"depth": args.max_depth, "deg": args.deg, "power": args.power}
    return run_instance(
        args.instance,
        args.out,
        kind=kind,
        overrides=overrides,
        seed=args.seed,
        with_timing=args.timing,
    )


if __name__ == "__main__":
    sys.exit(main())

"""End-to-end CLI: instances in, deterministic reports out, certificates replay."""

import json
import subprocess
import sys

import pytest

from cechblow.poly import Poly, poly_from_string
from cechblow import cli

XY = ["x", "y"]


def P(s):
    return poly_from_string(s, XY)


ONE = Poly.const(2, 1)


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture()
def cousin_instance(tmp_path):
    return write(
        tmp_path,
        "cousin.json",
        {
            "kind": "cousin",
            "covering": [P("x^2+y^2").to_json(), P("x^2-2*x+1+y^2").to_json()],
            "parts": [
                {"num": ONE.to_json(), "den": P("x^4-2*x^3+x^2+y^2").to_json()},
                {"num": Poly.zero(2).to_json(), "den": ONE.to_json()},
            ],
            "limits": {"deg": 4, "power": 4, "depth": 6},
        },
    )


def test_cousin_instance_end_to_end(tmp_path, cousin_instance, capsys):
    out = str(tmp_path / "report.json")
    code = cli.main(["solve-cousin", "--instance", cousin_instance, "--out", out])
    assert code == 0
    report = json.loads(open(out).read())
    assert report["schema"] == "cechblow/1"
    assert report["outcome"] == "solved"
    assert len(report["tower"]["steps"]) == 2
    assert report["timing_seconds"] is None
    # verify subcommand replays all certificates
    assert cli.main(["verify", "--report", out]) == 0


def test_reports_are_byte_identical(tmp_path, cousin_instance):
    out1 = str(tmp_path / "r1.json")
    out2 = str(tmp_path / "r2.json")
    assert cli.main(["run", "--instance", cousin_instance, "--out", out1]) == 0
    assert cli.main(["run", "--instance", cousin_instance, "--out", out2]) == 0
    assert open(out1, "rb").read() == open(out2, "rb").read()


def test_snc_instance(tmp_path):
    inst = write(tmp_path, "snc.json", {"kind": "snc", "poly": P("y^2-x^3").to_json(), "max_depth": 4})
    out = str(tmp_path / "snc_report.json")
    assert cli.main(["resolve-snc", "--instance", inst, "--out", out]) == 0
    report = json.loads(open(out).read())
    assert report["outcome"] == "resolved" and report["depth"] == 3
    assert cli.main(["verify", "--report", out]) == 0


def test_snc_depth_exceeded_is_status_two(tmp_path):
    inst = write(tmp_path, "snc2.json", {"kind": "snc", "poly": P("y^2-x^3").to_json(), "max_depth": 1})
    out = str(tmp_path / "r.json")
    assert cli.main(["resolve-snc", "--instance", inst, "--out", out]) == 2


def test_order_division_instance(tmp_path):
    inst = write(
        tmp_path,
        "ord.json",
        {"kind": "order_by_division", "polys": [P("x").to_json(), P("y").to_json()], "max_depth": 3},
    )
    out = str(tmp_path / "ord_report.json")
    assert cli.main(["order-division", "--instance", inst, "--out", out]) == 0
    report = json.loads(open(out).read())
    assert report["outcome"] == "ordered" and report["depth"] == 1


def test_xi_instance(tmp_path):
    inst = write(
        tmp_path,
        "xi.json",
        {"kind": "xi_experiment", "k": 1, "l": 1, "limits": {"deg": 8, "power": 2, "depth": 2}},
    )
    out = str(tmp_path / "xi_report.json")
    assert cli.main(["xi", "--instance", inst, "--out", out]) == 0
    report = json.loads(open(out).read())
    assert report["outcome"] == "found" and report["min_depth"] == 1
    assert cli.main(["verify", "--report", out]) == 0


def test_limit_eq_instance(tmp_path):
    t1 = {"base": "base", "steps": [{"chart": "base", "center": ["0", "0"]}]}
    f = {"num": ONE.to_json(), "den": P("x^2+y^2").to_json()}
    # pull 1/(x^2+y^2) to both charts by hand
    v1a = {"num": ONE.to_json(), "den": (P("x^2") * P("1+y^2")).to_json()}
    v1b = {"num": ONE.to_json(), "den": (P("y^2") * P("1+x^2")).to_json()}
    inst = write(
        tmp_path,
        "lim.json",
        {
            "kind": "limit_eq",
            "open_q": P("x^2+y^2").to_json(),
            "tower_a": {"base": "base", "steps": []},
            "values_a": {"base": f},
            "tower_b": t1,
            "values_b": {"s1a": v1a, "s1b": v1b},
        },
    )
    out = str(tmp_path / "lim_report.json")
    assert cli.main(["limit-eq", "--instance", inst, "--out", out]) == 0
    assert json.loads(open(out).read())["outcome"] == "equal"


def test_malformed_instance_reports_pointer(tmp_path, capsys):
    inst = write(
        tmp_path,
        "bad.json",
        {"kind": "cousin", "covering": [{"n": 2, "t": [{"c": "nope", "e": [0, 0]}]}], "parts": []},
    )
    code = cli.main(["run", "--instance", inst, "--out", str(tmp_path / "r.json")])
    assert code == 1
    err = capsys.readouterr().err
    assert "/covering/0/t/0/c" in err


def test_wrong_kind_for_verb(tmp_path, capsys):
    inst = write(tmp_path, "k.json", {"kind": "snc", "poly": P("x").to_json()})
    assert cli.main(["solve-cousin", "--instance", inst]) == 1


def test_selftest():
    assert cli.main(["selftest", "--seed", "3"]) == 0


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "cechblow.cli", "selftest", "--seed", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "OK" in proc.stdout

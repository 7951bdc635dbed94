import json
import subprocess
import sys

import pytest

from kgraph.cli import COMMANDS, load_graph, main, run
from kgraph.errors import ParseError


@pytest.fixture
def files(tmp_path):
    def write(name, data):
        p = tmp_path / name
        p.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(p)
    return write


def test_load_graph_from_fixture_names():
    assert load_graph("t2.json").rank == 2
    assert sorted(load_graph("tt2.json").edges) == ["e1", "e2", "f"]
    assert load_graph("omega2_inf.json").rank == 2


def test_malformed_json_has_location(files):
    path = files("bad.json", '{"rank": 2,\n  "vertices": [}')
    with pytest.raises(ParseError) as err:
        load_graph(path)
    assert err.value.location.endswith("line 2 column 16")
    report, status = run(["validate", path])
    assert status == 2 and report["error"]["type"] == "ParseError"
    assert "line 2" in report["error"]["location"]


def test_unknown_command():
    report, status = run(["frobnicate", "t2.json"])
    assert status == 2
    assert report["error"] == {"type": "UnknownCommand", "message": "unknown subcommand 'frobnicate'"}


def test_validate_and_paths():
    report, status = run(["validate", "omega22.json"])
    assert status == 0 and report["properties"]["has_sources"]
    report, _ = run(["paths", "tt2.json", "--degree", "1,1"])
    assert report["paths"] == {"v": ["e1.f", "e2.f"]}


def test_mce():
    report, status = run(["mce", "t2.json", "b", "r"])
    assert status == 0
    assert report["mce"] == ["b.r"] and report["lambda_min"] == [["r", "b"]]


def test_kp_check():
    report, status = run(["kp-check", "t2.json", "--ring", "z", "--depth", "2"])
    assert status == 0
    assert {k: v["status"] for k, v in report["relations"].items()} == {
        "KP1": "pass", "KP2": "pass", "KP3": "pass", "KP4": "pass"}


def test_coe_check(files):
    diag = files("diag.json", {"kind": "omega", "phi": "graded-lex"})
    pts = files("pts.json", [f"omega({n})" for n in range(8)])
    report, status = run(["coe-check", "omega1_inf.json", "omega2_inf.json", "--map", diag,
                          "--samples-file", pts])
    assert status == 0, report
    assert report["coe"]["envelope"]["samples"] == 8


def test_coe_check_with_bad_family(files):
    diag = files("diag.json", {"kind": "omega", "phi": "graded-lex"})
    fam = files("fam.json", {"rule": "zero"})
    report, status = run(["coe-check", "omega1_inf.json", "omega2_inf.json", "--map", diag,
                          "--family", fam, "--samples", "5"])
    assert status == 1 and not report["coe"]["pass"]


def test_eventual_check(files):
    rel = files("rel.json", {"kind": "relabel", "edges": {"b": "b1", "r": "r1"}})
    assert run(["eventual-check", "t2.json", "t2_primed.json", "--map", rel])[1] == 0
    flip = files("flip.json", {"kind": "alternating-flip"})
    report, status = run(["eventual-check", "two_loop.json", "two_loop.json", "--map", flip])
    assert status == 1 and report["relations"]["eventual"]["witness"]


def test_stabilize():
    report, status = run(["stabilize", "t2.json", "--point", "prefix=v;cycle=b.r;finite=[]",
                          "--tail", "2,1"])
    assert status == 0
    assert report["points"] == [{"path": "mu(2,1)prefix=v;cycle=b.r;finite=[]",
                                 "degree": ["inf", "inf"], "range": ["v", [2, 1]]}]


def test_stab_iso_and_conjugacy(files):
    assert run(["stab-iso-check", "tt2.json", "--samples", "30"])[1] == 0
    code = files("code.json", {"kind": "relabel", "edges": {"b": "b1", "r": "r1"}})
    assert run(["conjugacy-check", "t2.json", "t2_primed.json", "--code", code,
                "--samples", "20"])[1] == 0
    broken = files("broken.json", {"window": [1, 1], "memory": [0, 0],
                                   "table": {"b.r": "b1.r1"}, "partition": [["b.r", 1, 1]]})
    report, status = run(["conjugacy-check", "t2.json", "t2_primed.json", "--code", broken])
    assert status == 2 and report["error"]["type"] == "EquivalenceClassMismatch"


def test_aperiodicity():
    assert run(["aperiodicity", "two_loop.json"])[0]["verdict"] == "Aperiodic"
    assert run(["aperiodicity", "t2.json"])[0]["verdict"] == "Periodic"


def test_every_command_is_wired():
    import argparse
    from kgraph.cli import _parser
    sub = next(a for a in _parser()._actions if isinstance(a, argparse._SubParsersAction))
    assert set(sub.choices) == set(COMMANDS) == {
        "validate", "paths", "mce", "kp-check", "groupoid", "coe-check", "eventual-check",
        "stabilize", "stab-iso-check", "conjugacy-check", "aperiodicity"}


def test_main_prints_json(capsys):
    assert main(["mce", "t2.json", "b", "r"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["command"] == "mce"


def test_reports_are_byte_identical():
    argv = [sys.executable, "-m", "kgraph.cli", "groupoid", "tt2.json", "--samples", "25",
            "--seed", "7"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second
    other = subprocess.run(argv[:-1] + ["8"], capture_output=True, check=True).stdout
    assert json.loads(other)["envelope"]["seed"] == 8

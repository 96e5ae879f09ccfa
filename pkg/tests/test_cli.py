from __future__ import annotations

import csv
import json
import math
import re
from pathlib import Path

import pytest

from bcl.cli import main
from bcl.report import CSV_COLUMNS, SCHEMA, ReportError, emit_report, render_svg
from bcl.spaces import lp, subspace
from bcl.spaces.spec import dump_spec

SPECS = Path(__file__).parent.parent / "specs"
FAST = ["--restarts", "8", "--iters", "400"]


def run(argv, tmp_path, stem="out"):
    return main(argv + ["--out", str(tmp_path / stem)])


def test_compute_kottman(tmp_path):
    code = run(["compute", "--space", str(SPECS / "lp4_2.json"), "--constant", "kottman", "--points", "4",
                "--seed", "7"] + FAST, tmp_path)
    assert code == 0
    doc = json.loads((tmp_path / "out.json").read_text())
    assert doc["schema"] == SCHEMA
    est = doc["payload"]["estimates"][0]
    assert est["value"] >= math.sqrt(2) - 1e-6 and est["seed"] == 7 and est["bound_side"] == "lower"
    assert (tmp_path / "out.meta.json").exists()


def test_compute_gap_same_subspace_is_zero(tmp_path):
    m = str(SPECS / "plane_m.json")
    assert run(["compute", "--constant", "gap", "--space-m", m, "--space-l", m] + FAST, tmp_path) == 0
    assert json.loads((tmp_path / "out.json").read_text())["payload"]["estimates"][0]["value"] == 0


def test_compute_james_csv(tmp_path):
    code = run(["compute", "--constant", "james", "--space", str(SPECS / "lp2_1.json"), "--format", "csv"] + FAST,
               tmp_path)
    assert code == 0
    rows = list(csv.DictReader((tmp_path / "out.csv").open()))
    assert tuple(rows[0].keys()) == CSV_COLUMNS
    assert float(rows[0]["lhs"]) == pytest.approx(2, abs=1e-3)


def test_json_byte_identical_across_runs(tmp_path):
    argv = ["compute", "--space", str(SPECS / "hexagon.json"), "--constant", "kottman", "--points", "3"] + FAST
    assert run(argv, tmp_path, "a") == 0
    assert run(argv, tmp_path, "b") == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_verify_duality_passes(tmp_path):
    assert run(["verify", "--suite", "duality", "--spaces", str(SPECS / "lp4_3.json")] + FAST, tmp_path) == 0
    doc = json.loads((tmp_path / "out.json").read_text())
    assert doc["payload"]["status"] == "pass"


def test_verify_failure_exit_code(tmp_path):
    # eps = 0.1: the computed pullback gap exceeds the asserted eps bound (see the README)
    code = run(["verify", "--suite", "twisted", "--eps", "0.1", "--n", "1", "--points", "2"] + FAST, tmp_path)
    assert code == 1
    assert (tmp_path / "out.json").exists()


def test_verify_unknown_suite(tmp_path, capsys):
    assert run(["verify", "--suite", "nope"], tmp_path) == 2
    assert "field suite" in capsys.readouterr().err


def test_spec_error_names_field(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "lp", "n": 3, "p": 0.2}))
    assert run(["compute", "--space", str(bad), "--constant", "kottman", "--points", "2"], tmp_path) == 2
    assert "field space.p" in capsys.readouterr().err


def test_missing_file_and_usage(tmp_path, capsys):
    assert run(["compute", "--space", str(tmp_path / "nope.json"), "--constant", "kottman", "--points", "2"],
               tmp_path) == 2
    with pytest.raises(SystemExit) as info:
        main(["compute", "--constant", "unknown"])
    assert info.value.code == 2


def test_gap_requires_shared_ambient(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    dump_spec(subspace(lp(2, 2), [[1, 0]]), a)
    dump_spec(subspace(lp(2, 1), [[1, 0]]), b)
    assert run(["compute", "--constant", "gap", "--space-m", str(a), "--space-l", str(b)], tmp_path) == 2


def test_nonconvergence_exit_code(tmp_path, monkeypatch):
    from bcl import cli
    from bcl.solvers import NonConvergenceError

    def boom(*a, **k):
        raise NonConvergenceError("no certificate", {})

    monkeypatch.setattr(cli.V, "check_duality", boom)
    assert run(["verify", "--suite", "duality"], tmp_path) == 3


def test_sweep_thickness_with_plot(tmp_path):
    code = run(["sweep", "--param", "N", "--grid", "3,4", "--constant", "thickness", "--plot"] + FAST, tmp_path)
    assert code == 0
    doc = json.loads((tmp_path / "out.json").read_text())
    for N, v in zip(doc["payload"]["grid"], doc["payload"]["values"]):
        assert v == pytest.approx(2 * math.sin(math.pi / (2 * N)), abs=2e-3)
    svg = (tmp_path / "out.svg").read_text()
    pts = re.search(r'points="([^"]*)"', svg).group(1).split()
    assert len(pts) == 2 and svg.count("<polyline") == 1


def test_sweep_theta_disjoint(tmp_path):
    code = run(["sweep", "--param", "theta", "--grid", "0,0.5,1", "--constant", "kottman-disjoint"] + FAST, tmp_path)
    assert code == 0
    vals = json.loads((tmp_path / "out.json").read_text())["payload"]["values"]
    assert vals == pytest.approx([2, math.sqrt(2), 1], abs=5e-3)


def test_sweep_eps_gap(tmp_path):
    assert run(["sweep", "--param", "eps", "--grid", "0.5", "--n", "1"] + FAST, tmp_path) == 0
    vals = json.loads((tmp_path / "out.json").read_text())["payload"]["values"]
    assert vals[0] <= 0.5 + 1e-6


def test_sweep_bad_grid(tmp_path):
    assert run(["sweep", "--param", "N", "--grid", "3,3"], tmp_path) == 2
    assert run(["sweep", "--param", "N", "--grid", ","], tmp_path) == 2


def test_report_roundtrip(tmp_path):
    assert run(["sweep", "--param", "N", "--grid", "3", "--constant", "thickness"] + FAST, tmp_path, "s") == 0
    assert main(["report", "--input", str(tmp_path / "s.json"), "--out", str(tmp_path / "r"), "--plot"]) == 0
    rows = list(csv.DictReader((tmp_path / "r.csv").open()))
    assert len(rows) == 1 and rows[0]["suite"] == "sweep-N"
    assert (tmp_path / "r.svg").exists()


def test_emit_report_single_estimate_csv(tmp_path):
    rows = [{"suite": "compute", "param": "kottman_N N=2", "lhs": 2.0, "rhs": "", "slack": "", "status": "lower"}]
    emit_report(tmp_path / "x", "estimate", {}, rows, "csv")
    lines = (tmp_path / "x.csv").read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS) and len(lines) == 2


def test_emit_report_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ReportError):
        emit_report(blocker / "sub" / "x", "estimate", {}, [], "json")
    assert main(["compute", "--space", str(SPECS / "lp2_1.json"), "--constant", "james", "--out",
                 str(blocker / "sub" / "x")] + FAST) == 2


def test_svg_point_count():
    svg = render_svg([1, 2, 3, 4], [4, 3, 2, 1], "theta", "value")
    assert len(re.search(r'points="([^"]*)"', svg).group(1).split()) == 4

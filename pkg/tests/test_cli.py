import json

import numpy as np
import pytest

from addrlift import boolfn, cli, poly
from addrlift.approxlp import approx_spectral_norm
from addrlift.constructions import BlockLayout, composed_F, partial_F
from addrlift.errors import InvariantViolation


def run(argv, capsys):
    code = cli.run(argv)
    return code, capsys.readouterr()


def test_gen_writes_function_and_layout(tmp_path, capsys):
    out = tmp_path / "F.json"
    code, _ = run(["gen", "2", "2", "--out", str(out)], capsys)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["n"] == 4 and len(doc["values"]) == 16 and doc["kind"] == "total"
    lay = BlockLayout.from_json((tmp_path / "F.layout.json").read_text())
    assert lay == BlockLayout(1, 2, 2)
    # byte-identical re-serialization
    assert boolfn.dumps(boolfn.loads(out.read_text())) == out.read_text()
    run(["gen", "2", "4", "--out", str(tmp_path / "G.json")], capsys)
    assert json.loads((tmp_path / "G.json").read_text())["n"] == 8


def test_gen_16_bits_promise_count(tmp_path, capsys):
    code, _ = run(["gen", "4", "4", "--out", str(tmp_path / "H.json")], capsys)
    assert code == 0
    P, _ = partial_F(4, 4)
    # (4 codewords of 16 strings)^2 blocks, times all targets
    assert P.promise_count == (4 * 4) * (1 << 8)


def test_gen_to_stdout(capsys):
    code, out = run(["gen", "2", "2"], capsys)
    doc = json.loads(out.out)
    assert code == 0 and doc["layout"]["blocks"] == 1


def test_analyze_examples(tmp_path, capsys):
    p3 = tmp_path / "p3.json"
    p3.write_text(boolfn.dumps(boolfn.parity(3)))
    code, out = run(["analyze", str(p3)], capsys)
    doc = json.loads(out.out)
    assert code == 0
    assert doc["approx_degree"]["value"] == 3
    assert doc["approx_spectral_norm"]["value"] == pytest.approx(2 / 3, abs=1e-6)
    assert doc["spectral_norm"] == 1 and doc["min_entropy"] == 0 and doc["influence"] == 3

    c = tmp_path / "c.json"
    c.write_text(boolfn.dumps(boolfn.constant(2)))
    doc = json.loads(run(["analyze", str(c)], capsys)[1].out)
    assert doc["approx_degree"]["value"] == 0

    F = tmp_path / "F.json"
    run(["gen", "2", "2", "--out", str(F)], capsys)
    doc = json.loads(run(["analyze", str(F)], capsys)[1].out)
    assert doc["approx_degree"]["value"] == 3
    assert doc["approx_spectral_norm"]["value"] == pytest.approx(2.0, abs=1e-6)


def test_analyze_partial(tmp_path, capsys):
    p = tmp_path / "p.json"
    p.write_text(boolfn.dumps(partial_F(2, 2)[0]))
    doc = json.loads(run(["analyze", str(p)], capsys)[1].out)
    assert doc["kind"] == "partial" and doc["promise_count"] == 8
    assert "spectral_norm" not in doc


def test_simulate_exhaustive_and_single(tmp_path, capsys):
    F = tmp_path / "F.json"
    run(["gen", "2", "4", "--out", str(F)], capsys)
    code, out = run(["simulate", str(F)], capsys)
    doc = json.loads(out.out)
    assert code == 0
    assert doc["min_succ_promise"] == pytest.approx(1, abs=1e-10)
    assert doc["min_succ_nonpromise"] >= 2 / 3
    assert doc["max_total_queries"] <= doc["query_budget"] == 9
    code, out = run(["simulate", str(F), "--input", "++++++++"], capsys)
    doc = json.loads(out.out)
    assert doc["true_value"] == 1 and doc["queries"]["total"] == 9
    assert run(["simulate", str(F), "--input", "+++"], capsys)[0] == cli.EXIT_INVALID


def test_simulate_rejects_mismatched_files(tmp_path, capsys):
    F = tmp_path / "F.json"
    run(["gen", "2", "2", "--out", str(F)], capsys)
    F.write_text(boolfn.dumps(boolfn.parity(4)))
    assert run(["simulate", str(F)], capsys)[0] == cli.EXIT_INVALID


def test_simulate_guard(tmp_path, capsys):
    F = tmp_path / "F.json"
    run(["gen", "2", "4", "--out", str(F)], capsys)
    assert run(["simulate", str(F), "--guard-n", "6"], capsys)[0] == cli.EXIT_GUARD


def test_liftcheck(capsys):
    code, out = run(["liftcheck", "2", "2"], capsys)
    doc = json.loads(out.out)
    assert code == 0 and doc["holds"] and doc["D"] == 1
    assert doc["proof_floor"] == pytest.approx(0.1)


def test_pipeline_command(tmp_path, capsys):
    P, _ = partial_F(2, 4)
    w = approx_spectral_norm(P, 1 / 3).witness
    path = tmp_path / "w.json"
    path.write_text(json.dumps(poly.to_json(w)))
    code, out = run(["pipeline", str(path), "2", "4", "--eps", str(1 / 3 + 1e-6)], capsys)
    doc = json.loads(out.out)
    assert code == 0 and doc["final_degree"] < doc["D"] == 2
    assert doc["final_error"] <= 1 / 3 + doc["dropped_mass"] + 1e-6
    assert run(["pipeline", str(path), "2", "4", "--eps", "0.01"], capsys)[0] == cli.EXIT_INVALID


def test_sweep_default_grid(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["sweep", "--out", str(a)], capsys)[0] == 0
    assert run(["sweep", "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == ("l,k,n_bits,promise_count,sim_total_queries,min_succ_promise,"
                        "min_succ_nonpromise,adeg_F,log2_specnorm_F,proof_floor,cs_upper_bound")
    assert [l.split(",")[:4] for l in lines[1:]] == [["2", "2", "4", "8"], ["2", "4", "8", "64"],
                                                     ["4", "2", "8", "64"]]


def test_sweep_guard_marks_na(capsys, caplog):
    code, out = run(["sweep", "--grid", "4,4"], capsys)
    assert code == 0
    row = out.out.splitlines()[1].split(",")
    assert row[:4] == ["4", "4", "16", "4096"] and set(row[4:]) == {"NA"}
    assert "skipped" in caplog.text


def test_exit_codes(tmp_path, capsys, monkeypatch):
    assert run(["analyze", str(tmp_path / "missing.json")], capsys)[0] == cli.EXIT_INVALID
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert run(["analyze", str(bad)], capsys)[0] == cli.EXIT_INVALID
    assert run(["gen", "8", "4"], capsys)[0] == cli.EXIT_GUARD
    assert run(["gen", "3", "2"], capsys)[0] == cli.EXIT_INVALID

    def broken(*a, **k):
        raise InvariantViolation("forced")
    monkeypatch.setattr(cli.liftlab, "lift_bound_check", broken)
    assert run(["liftcheck", "2", "2"], capsys)[0] == cli.EXIT_INVARIANT


def test_check_row_rejects_broken_chain():
    row = {"l": 2, "k": 2, "min_succ_promise": 1.0, "min_succ_nonpromise": 0.9,
           "proof_floor": 2.0, "log2_specnorm_F": 1.0, "cs_upper_bound": 3.0}
    with pytest.raises(InvariantViolation):
        cli.check_row(row)

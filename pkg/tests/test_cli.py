import json
import subprocess
import sys

import pytest

from spicenet.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_compare_identity(capsys, data_dir):
    f = data_dir / "corpus" / "01_cs_amp.sp"
    code, out, _ = run(capsys, "compare", f, f)
    assert code == 0
    result = json.loads(out)
    assert result["similarity"] == 100.0 and result["exact"] is True


def test_compare_bipartite_and_exact_limit(capsys, tmp_path):
    a, b = tmp_path / "a.sp", tmp_path / "b.sp"
    a.write_text("R1 a b\nC1 b 0\n")
    b.write_text("R1 a b\nL1 b 0\n")
    code, out, _ = run(capsys, "compare", a, b, "--mode", "bipartite", "--exact-limit", "2")
    result = json.loads(out)
    assert code == 0 and result["mode"] == "bipartite" and result["exact"] is False


def test_lint_floating_exit_2(capsys, data_dir):
    code, out, _ = run(capsys, "lint", data_dir / "floating.sp")
    assert code == 2 and "FloatingNet [open]" in out
    code, out, _ = run(capsys, "lint", data_dir / "floating.sp", "--json")
    assert code == 2 and [d["subject"] for d in json.loads(out)] == ["open"]


def test_lint_clean_exit_0(capsys, data_dir):
    code, out, _ = run(capsys, "lint", data_dir / "corpus" / "01_cs_amp.sp")
    assert (code, out) == (0, "")


def test_cluster_chain(capsys, data_dir):
    code, out, _ = run(capsys, "cluster", "--segments", data_dir / "chain_segments.json", "--radius", "40")
    assert code == 0 and len(json.loads(out)["clusters"]) == 1
    code, out, _ = run(capsys, "cluster", "--segments", data_dir / "chain_segments.json", "--radius", "20")
    assert len(json.loads(out)["clusters"]) == 3


def test_sensitivity(capsys, data_dir):
    code, out, _ = run(capsys, "sensitivity", "--segments", data_dir / "chain_segments.json", "--radii", "80,10,40")
    assert code == 0 and out == "radius,clusters\n10,3\n40,1\n80,1\n"


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 1
    code, _, err = run(capsys, "compare", "--bogus")
    assert code == 1 and "usage:" in err
    assert run(capsys)[0] == 1


def test_missing_file_is_input_error(capsys, tmp_path):
    code, _, err = run(capsys, "parse", tmp_path / "nope.sp")
    assert code == 1 and err


def test_parse_echoes_canonical(capsys, tmp_path):
    f = tmp_path / "x.sp"
    f.write_text("c1 out gnd 1p\nr1 in out 1k\n")
    code, out, _ = run(capsys, "parse", f)
    assert (code, out) == (0, "R1 in out 1k\nC1 out 0 1p\n")
    code, out, _ = run(capsys, "parse", f, "--json")
    assert json.loads(out)["nets"] == ["in", "out", "0"]


def test_stats_and_histograms(capsys, data_dir, tmp_path):
    files = sorted((data_dir / "corpus").glob("*.sp"))
    code, out, _ = run(capsys, "stats", *files, "--json", "--hist-dir", tmp_path)
    assert code == 0
    obj = json.loads(out)
    assert len(obj["files"]) == 30
    for dim in ("components", "nodes", "mosfets", "lines"):
        lines = (tmp_path / f"histogram_{dim}.csv").read_text().splitlines()
        assert lines[0] == f"{dim},count"
        assert sum(int(line.split(",")[1]) for line in lines[1:]) == 30


def test_annotate_then_netlist(capsys, tmp_path):
    boxes = tmp_path / "boxes.json"
    boxes.write_text(json.dumps([
        {"class": "Resistor", "bbox": [100, 0, 200, 20], "id": "r"},
        {"class": "Ground", "bbox": [290, 40, 310, 60], "id": "g"},
    ]))
    segs = tmp_path / "segs.json"
    segs.write_text(json.dumps([
        {"x1": 0, "y1": 10, "x2": 95, "y2": 10},
        {"x1": 205, "y1": 10, "x2": 300, "y2": 10},
        {"x1": 300, "y1": 10, "x2": 300, "y2": 38},
    ]))
    prefix = tmp_path / "ann"
    code, _, _ = run(capsys, "annotate", "--boxes", boxes, "--segments", segs, "--out", prefix)
    assert code == 0 and (tmp_path / "ann.svg").exists()
    code, out, _ = run(capsys, "netlist-from-annotation", tmp_path / "ann.json")
    assert (code, out) == (0, "R1 N0 0\n")


def test_netlist_from_annotation_unbound(capsys, tmp_path):
    ann = tmp_path / "a.json"
    ann.write_text(json.dumps({"boxes": [{"class": "nmos", "bbox": [0, 0, 40, 60], "id": "m"}], "clusters": [],
                               "bindings": {"m": {"drain": None, "gate": None, "source": None}}}))
    code, _, err = run(capsys, "netlist-from-annotation", ann)
    assert code == 1 and "m.gate" in err


def _annotation(tmp_path):
    ann = tmp_path / "a.json"
    ann.write_text(json.dumps({"image_ref": "x.svg", "boxes": [], "clusters": [], "bindings": {}}))
    return ann


def test_generate_with_replay(capsys, tmp_path):
    fixture = tmp_path / "replies.jsonl"
    fixture.write_text(json.dumps("```spice\nR1 a b\n```") + "\n"
                       + json.dumps("```spice\nR1 a 0\nC1 a 0\n```") + "\n")
    trace = tmp_path / "trace.json"
    code, out, _ = run(capsys, "generate", "--annotation", _annotation(tmp_path), "--client", "replay",
                       "--fixture", fixture, "--trace", trace)
    assert (code, out) == (0, "R1 a 0\nC1 a 0\n")
    assert json.loads(trace.read_text())["status"] == "FixedAfter(1)"


def test_generate_transport_failure_exit_3(capsys, tmp_path):
    fixture = tmp_path / "replies.jsonl"
    fixture.write_text(json.dumps("```spice\nR1 a b\n```") + "\n")
    code, _, err = run(capsys, "generate", "--annotation", _annotation(tmp_path), "--client", "replay",
                       "--fixture", fixture)
    assert code == 3 and "transport" in err


def test_generate_requires_fixture(capsys, tmp_path):
    code, _, err = run(capsys, "generate", "--annotation", _annotation(tmp_path), "--client", "replay")
    assert code == 1 and "--fixture" in err


def test_export_finetune(capsys, caplog, tmp_path):
    records = tmp_path / "records.json"
    records.write_text(json.dumps([
        {"id": "a", "description": "RC filter", "netlist": "R1 in out 1k\nC1 out 0 1p\n"},
        {"id": "b", "description": "", "netlist": "R1 a 0\n"},
    ]))
    out_file = tmp_path / "ft.jsonl"
    code, _, _ = run(capsys, "export-finetune", records, "--out", out_file)
    assert code == 0 and "skipped b" in caplog.text
    assert len(out_file.read_text().splitlines()) == 1


def test_bench_replay(capsys, data_dir, tmp_path):
    args = ["bench", "--client", "replay", "--fixture", data_dir / "bench_replay.jsonl", "-n", "10"]
    code, out, _ = run(capsys, *args)
    assert code == 0 and "1, Common-source amplifier, 8" in out.splitlines()
    j1, j2 = tmp_path / "1.json", tmp_path / "2.json"
    run(capsys, *args, "--out-json", j1)
    run(capsys, *args, "--out-json", j2)
    assert j1.read_bytes() == j2.read_bytes()
    assert json.loads(j1.read_text())["categories"] == {"Easy": 7, "Medium": 7, "Hard": 6}


def test_config_defaults_and_flag_precedence(capsys, data_dir, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"cluster": {"radius": 20}}))
    seg = data_dir / "chain_segments.json"
    code, out, _ = run(capsys, "--config", cfg, "cluster", "--segments", seg)
    assert json.loads(out)["radius"] == 20 and len(json.loads(out)["clusters"]) == 3
    code, out, _ = run(capsys, "--config", cfg, "cluster", "--segments", seg, "--radius", "40")
    assert json.loads(out)["radius"] == 40


def test_config_satisfies_required_flags(capsys, data_dir, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"client": "replay", "bench": {"fixture": str(data_dir / "bench_replay.jsonl")}}))
    code, out, _ = run(capsys, "--config", cfg, "bench", "--json")
    assert code == 0 and json.loads(out)["rows"][0]["successes"] == 8


def test_bad_config(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    assert run(capsys, "--config", cfg, "lint", "x.sp")[0] == 1


def test_console_script_entry_point(data_dir):
    proc = subprocess.run([sys.executable, "-m", "spicenet.cli", "lint", str(data_dir / "floating.sp"), "--json"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    json.loads(proc.stdout)

import json

import numpy as np
import pytest

from geocanon.cli import main
from geocanon.corpus import square_cone, unit_circle_counterexample
from geocanon.graph import apply_transform, random_permutation, random_transform

from conftest import random_dense_graph


@pytest.fixture
def graph_files(tmp_path):
    g = random_dense_graph(0, 6)
    h = apply_transform(g, random_transform(1, allow_reflection=True),
                        random_permutation(2, 6))
    pa, pb = tmp_path / "a.json", tmp_path / "b.json"
    g.to_json(str(pa))
    h.to_json(str(pb))
    return str(pa), str(pb)


def test_iso_isomorphic_pair(graph_files, capsys):
    a, b = graph_files
    assert main(["iso", a, b]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["isomorphic"] and out["residual"] < 1e-9


def test_iso_negative_pair(tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    random_dense_graph(3, 6).to_json(str(a))
    random_dense_graph(4, 6).to_json(str(b))
    assert main(["iso", str(a), str(b)]) == 1
    assert "not isomorphic" in capsys.readouterr().out


def test_input_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["iso", str(bad), str(bad)]) == 2
    assert "error" in capsys.readouterr().err


def test_canon_general_deterministic(graph_files, capsys):
    a, b = graph_files
    assert main(["canon", a, "--mode", "general"]) == 0
    d1 = capsys.readouterr().out.strip()
    assert main(["canon", b, "--mode", "general"]) == 0
    d2 = capsys.readouterr().out.strip()
    assert d1 == d2 and len(d1) == 64


def test_canon_fast_matches_across_actions(graph_files, capsys):
    a, b = graph_files
    assert main(["canon", a, "--mode", "fast"]) == 0
    d1 = capsys.readouterr().out.strip()
    assert main(["canon", b, "--mode", "fast"]) == 0
    assert capsys.readouterr().out.strip() == d1


def test_canon_fast_inapplicable_coloring(tmp_path, capsys):
    p = tmp_path / "circle.json"
    unit_circle_counterexample(0).to_json(str(p))
    assert main(["canon", str(p), "--mode", "fast",
                 "--coloring", "center"]) == 3
    assert main(["canon", str(p), "--mode", "fast", "--coloring", "auto"]) == 0


def test_canon_symmetric_graph_inapplicable(tmp_path, capsys):
    p = tmp_path / "cone.json"
    square_cone().to_json(str(p))
    assert main(["canon", str(p), "--mode", "fast"]) == 3
    assert "general" in capsys.readouterr().err


def test_canon_verbose_components(graph_files, capsys):
    a, _ = graph_files
    assert main(["canon", a, "--mode", "fast", "--verbose"]) == 0
    cap = capsys.readouterr()
    comp = json.loads(cap.err)
    assert comp["mode"] == "fast" and len(comp["gram_block"]) == 16


def test_equivariance_passes(graph_files, capsys):
    a, _ = graph_files
    assert main(["equivariance", a, "--trials", "5"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_equivariance_detector_catches_injected_scale(graph_files, capsys):
    a, _ = graph_files
    assert main(["equivariance", a, "--trials", "3",
                 "--inject-scale", "1.01"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_bench_csv_format(capsys):
    assert main(["bench", "--sizes", "8,16", "--reps", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "algorithm,N,seconds"
    for line in lines[1:]:
        algo, n, sec = line.split(",")
        assert algo == "fast" and int(n) in (8, 16) and float(sec) >= 0


def test_bench_rejects_oversize(capsys):
    assert main(["bench", "--mode", "general", "--sizes", "64"]) == 2


def test_gen_corpus_deterministic(tmp_path):
    out1, out2 = tmp_path / "c1", tmp_path / "c2"
    assert main(["gen", "--what", "corpus", "--seed", "5",
                 "--out", str(out1)]) == 0
    assert main(["gen", "--what", "corpus", "--seed", "5",
                 "--out", str(out2)]) == 0
    m1 = (out1 / "manifest.json").read_bytes()
    assert m1 == (out2 / "manifest.json").read_bytes()
    manifest = json.loads(m1)
    assert len(manifest["pairs"]) == 5
    for entry in manifest["pairs"]:
        assert (out1 / entry["a"]).read_bytes() == (out2 / entry["a"]).read_bytes()


def test_gen_tetra_manifest(tmp_path):
    out = tmp_path / "t"
    assert main(["gen", "--what", "tetra", "--count", "5", "--seed", "1",
                 "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["tetrahedra"]) == 5
    for entry in manifest["tetrahedra"]:
        assert 1.0 <= entry["circumradius"] <= 6.0
        assert (out / entry["file"]).exists()
        assert len(entry["monge"]) == 3

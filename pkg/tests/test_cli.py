import json

import pytest
from conftest import circle, theta

from mlsrigid.cli import main
from mlsrigid.metric_graph import compute_core, graph_from_json, graph_to_json


def _write(tmp_path, name, g):
    p = tmp_path / name
    p.write_text(graph_to_json(g))
    return str(p)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_is_deterministic(capsys):
    a = run(capsys, "gen", "--seed", 1, "--rank", 2)
    b = run(capsys, "gen", "--seed", 1, "--rank", 2)
    assert a == b and a[0] == 0
    g = graph_from_json(a[1])
    assert g.num_edges - g.num_vertices + 1 == 2


def test_gen_examples(capsys):
    code, out, _ = run(capsys, "gen", "--seed", 3, "--rank", 0)
    g = graph_from_json(out)
    assert code == 0 and g.num_edges == g.num_vertices - 1
    code, out, _ = run(capsys, "gen", "--seed", 7, "--rank", 4)
    c = compute_core(graph_from_json(out))
    assert c.rank == 4 == c.graph.num_edges - c.graph.num_vertices + 1


def test_bad_config_exits_two(capsys):
    code, _, err = run(capsys, "gen", "--rank", -1)
    assert code == 2 and "error" in err


def test_malformed_json_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": 2,')
    code, _, err = run(capsys, "core", bad)
    assert code == 2 and "line 1 column 16" in err
    bad.write_text('{"vertices": 2, "edges": [{"a": 0, "b": 9, "len": 1}]}')
    for cmd in (["core", bad], ["spectrum", bad], ["compare", bad, bad], ["fuzz", bad, bad]):
        code, _, err = run(capsys, *cmd)
        assert code == 2 and "/edges/0" in err


def test_core_and_reduce(tmp_path, capsys):
    t = _write(tmp_path, "t.json", theta())
    code, out, _ = run(capsys, "core", t)
    rep = json.loads(out)
    assert code == 0 and rep["rank"] == 2 and rep["action"] == "TypeIII"
    code, out, _ = run(capsys, "reduce", t, "e1 e0' e0 e2'")
    assert json.loads(out)["reduced"] == "e1 e2'"
    code, _, err = run(capsys, "reduce", t, "e0 e1")
    assert code == 2


def test_spectrum_and_replayed_reconstruction(tmp_path, capsys):
    t = _write(tmp_path, "t.json", theta())
    code, out, _ = run(capsys, "spectrum", t, "--word-bound", 10)
    rows = json.loads(out)
    assert code == 0 and rows[0] == {"word": "", "length": "0"}
    dump = tmp_path / "dump.json"
    dump.write_text(out)
    code, out, _ = run(capsys, "reconstruct", t, "--spectrum", dump, "--phi", '{"g0": "g1", "g1": "g0"}')
    assert code == 0 and json.loads(out)["verdict"] == "reconstructed"


def test_reconstruct_hidden(tmp_path, capsys):
    t = _write(tmp_path, "t.json", theta())
    hidden = _write(tmp_path, "h.json", theta(2, 1, 3))
    code, out, _ = run(capsys, "reconstruct", t, "--hidden", hidden)
    rep = json.loads(out)
    assert code == 0 and rep["isometric_to_hidden"]
    other = _write(tmp_path, "o.json", theta(1, 2, 4))
    code, out, _ = run(capsys, "reconstruct", t, "--hidden", other)
    assert code == 0 and json.loads(out)["isometric_to_hidden"]


def test_compare(tmp_path, capsys):
    a = _write(tmp_path, "a.json", theta())
    b = _write(tmp_path, "b.json", theta(3, 2, 1))
    c = _write(tmp_path, "c.json", theta(1, 2, 4))
    assert run(capsys, "compare", a, b)[0] == 0
    assert run(capsys, "compare", a, c)[0] == 1


def test_fuzz_examples(tmp_path, capsys):
    a = _write(tmp_path, "a.json", theta())
    b = _write(tmp_path, "b.json", theta(1, 2, 4))
    code, out, _ = run(capsys, "fuzz", a, a, "--word-bound", 3)
    rep = json.loads(out)
    assert code == 0 and rep["witness"] is None and rep["verdict"] == "no witness up to bound 3"
    code, out, _ = run(capsys, "fuzz", a, b, "--word-bound", 2)
    rep = json.loads(out)
    assert code == 1 and rep["verdict"] == "witness"
    c5, c6 = _write(tmp_path, "c5.json", circle(5)), _write(tmp_path, "c6.json", circle(6))
    code, out, _ = run(capsys, "fuzz", c5, c6)
    assert code == 1 and json.loads(out)["witness"]["word"] == "g0"
    code, out, _ = run(capsys, "fuzz", a, c5)
    assert code == 1 and json.loads(out)["verdict"] == "different rank"


def test_tree_translen(tmp_path, capsys):
    t = _write(tmp_path, "t.json", theta())
    code, out, _ = run(capsys, "tree-translen", t, "g0 g1'")
    rep = json.loads(out)
    assert code == 0 and rep["rows"][0]["translationLength"] == "5"
    code, out, _ = run(capsys, "tree-translen", t, "--word-bound", 2)
    assert code == 0 and all(r["equal"] for r in json.loads(out)["rows"])
    code, _, err = run(capsys, "tree-translen", t, "g0 g0 g0", "--radius", 2)
    assert code == 2 and "radius" in err


def test_roundtrip_reports(tmp_path, capsys):
    code, out, _ = run(capsys, "roundtrip", "--trials", 0)
    rep = json.loads(out)
    assert code == 0 and rep["trials"] == [] and rep["ok"]
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "roundtrip", "--trials", 5, "--seed", 9, "--json", path)
    rep = json.loads(path.read_text())
    assert code == 0 and rep["passed"] == 5
    assert all(t["verdict"] == "certified" for t in rep["trials"])
    code, out, _ = run(capsys, "roundtrip", "--trials", 5, "--seed", 9, "--perturb")
    rep = json.loads(out)
    assert code == 0 and all(t["verdict"] != "certified" for t in rep["trials"])


def test_dot_output(tmp_path, capsys):
    t = _write(tmp_path, "t.json", theta())
    dot = tmp_path / "t.dot"
    assert run(capsys, "core", t, "--dot", dot)[0] == 0
    assert "doublecircle" in dot.read_text()


@pytest.mark.parametrize("argv", [
    ["gen", "--seed", 5, "--rank", 3],
    ["roundtrip", "--trials", 3, "--seed", 2],
    ["roundtrip", "--trials", 3, "--seed", 2, "--perturb"],
])
def test_reports_are_byte_identical(tmp_path, capsys, argv):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, *argv, "--json", a)
    run(capsys, *argv, "--json", b)
    assert a.read_bytes() == b.read_bytes()

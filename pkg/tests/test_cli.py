import json

import pytest

from sparsetw import graphio
from sparsetw import certificates as certs
from sparsetw.cli import run
from sparsetw.constructions import grid, wall
from sparsetw.graph import complete_graph, cycle_graph
from sparsetw.walls import grid_to_wall_model
from sparsetw.width import TreeDecomposition, grid_bramble


def _write_graph(tmp_path, name, g, fmt="g6"):
    path = tmp_path / name
    path.write_text(graphio.dumps(g, fmt))
    return str(path)


def _write_json(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_gen_grid_matches_constructor(tmp_path):
    out = tmp_path / "g5.g6"
    assert run(["gen", "grid", "5", "--out", str(out)]) == 0
    assert graphio.read_graph(out) == grid(5)
    out = tmp_path / "w4.txt"
    assert run(["gen", "wall", "4", "--format", "edgelist", "--out", str(out)]) == 0
    assert graphio.read_graph(out) == wall(4)


def test_gen_randomized_needs_seed(tmp_path, capsys):
    assert run(["gen", "random", "10", "0.3"]) == 3
    assert "--seed" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["gen", "grid"], ["gen", "grid", "x"], ["gen", "nonsense", "3"],
                                  ["tw", "/no/such/file"], ["frobnicate"]])
def test_input_errors_exit_3(argv):
    assert run(argv) == 3


def test_malformed_json_reports_position(tmp_path, capsys):
    host = _write_graph(tmp_path, "k3.g6", complete_graph(3))
    bad = tmp_path / "bad.json"
    bad.write_text('{"td": [1, 2,\n  }')
    assert run(["validate-td", host, str(bad)]) == 3
    assert "line 2" in capsys.readouterr().err


def test_check_grid_to_wall_model(tmp_path, capsys):
    host = _write_graph(tmp_path, "g8.g6", grid(8))
    cert = certs.make_certificate("model", {"model": grid_to_wall_model(8).to_json()})
    path = _write_json(tmp_path, "m.json", cert)
    assert run(["check", "model", host, path]) == 0
    assert "ok" in capsys.readouterr().out
    # the same model does not live in a smaller grid
    small = _write_graph(tmp_path, "g4.g6", grid(4))
    assert run(["check", "model", small, path]) == 1
    # kind mismatch is reported as invalid
    assert run(["check", "td", host, path]) == 1


def test_tw_exact_and_bounds(tmp_path, capsys):
    k5 = _write_graph(tmp_path, "k5.g6", complete_graph(5))
    assert run(["tw", k5, "--exact"]) == 0
    assert capsys.readouterr().out.strip() == "4"
    g = _write_graph(tmp_path, "g4.g6", grid(4))
    assert run(["tw", g]) == 0
    low, up = capsys.readouterr().out.split(" <= tw <= ")
    assert int(low) <= 4 <= int(up)
    assert run(["tw", g, "--exact", "--cap", "10"]) == 2


def test_find_im_exit_codes(tmp_path):
    host = _write_graph(tmp_path, "c6.g6", cycle_graph(6))
    k3 = _write_graph(tmp_path, "k3.g6", complete_graph(3))
    k4 = _write_graph(tmp_path, "k4.g6", complete_graph(4))
    out = tmp_path / "m.json"
    assert run(["find-im", host, k3, "--out", str(out)]) == 0
    assert run(["check", "model", host, str(out)]) == 0
    assert run(["find-im", host, k4]) == 1
    big = _write_graph(tmp_path, "g4.g6", grid(4))
    assert run(["find-im", big, k4, "--plain", "--budget", "1"]) == 2


def test_find_subdiv_round_trip(tmp_path):
    host = _write_graph(tmp_path, "c6.g6", cycle_graph(6))
    out = tmp_path / "s.json"
    assert run(["find-subdiv", host, "3", "--out", str(out)]) == 0
    assert run(["check", "subdivision", host, str(out)]) == 0
    assert run(["find-subdiv", host, "4"]) == 1


def test_wall_pipeline_round_trip(tmp_path):
    host = tmp_path / "h.g6"
    model = tmp_path / "model.json"
    assert run(["gen", "planted-wall", "6", "--seed", "3", "--out", str(host), "--cert", str(model)]) == 0
    assert run(["check", "model", str(host), str(model)]) == 0
    quasi = tmp_path / "quasi.json"
    assert run(["extract-wall", str(host), str(model), "--out", str(quasi)]) == 0
    assert run(["check", "quasi", str(host), str(quasi)]) == 0
    wit = tmp_path / "wit.json"
    assert run(["gen", "quasi-wall", "10", "--seed", "1", "--out", str(host), "--cert", str(quasi)]) == 0
    assert run(["thin", str(host), str(quasi), "--w", "2", "--eps", "1", "--out", str(wit)]) == 0
    assert run(["check", "witness", str(host), str(wit)]) == 0


def test_trim_pipeline_round_trip(tmp_path):
    host = tmp_path / "h.g6"
    trim = tmp_path / "trim.json"
    assert run(["gen", "trim-biclique", "4", "6", "--ell", "3", "--seed", "5",
                "--out", str(host), "--cert", str(trim)]) == 0
    assert run(["check", "trim", str(host), str(trim)]) == 0
    ded = tmp_path / "ded.json"
    assert run(["dedensify", str(host), str(trim), "--h", "2", "--out", str(ded)]) == 0
    assert run(["check", "trim", str(host), str(ded)]) == 0
    assert run(["dedensify", str(host), str(trim), "--h", "2", "--mode", "sampled"]) == 3


def test_witness_and_refusal_round_trip(tmp_path):
    host = tmp_path / "h.g6"
    trim = tmp_path / "trim.json"
    assert run(["gen", "trim-clique", "8", "0", "--ell", "5", "--seed", "2",
                "--out", str(host), "--cert", str(trim)]) == 0
    wit = tmp_path / "wit.json"
    assert run(["witness", str(host), str(trim), "--w", "2", "--eps", "1", "--seed", "0", "--out", str(wit)]) == 0
    assert run(["check", "witness", str(host), str(wit)]) == 0
    ref = tmp_path / "ref.json"
    assert run(["witness", str(host), str(trim), "--w", "50", "--eps", "1/100", "--seed", "0",
                "--out", str(ref)]) == 1
    cert = json.loads(ref.read_text())
    assert cert["kind"] == "refusal" and cert["payload"]["inequality"]
    assert run(["check", "refusal", str(host), str(ref)]) == 0


def test_td_and_bramble_round_trip(tmp_path, capsys):
    host = _write_graph(tmp_path, "g3.g6", grid(3))
    td = tmp_path / "td.json"
    assert run(["tw", host, "--exact", "--out", str(td)]) == 0
    assert run(["check", "td", host, str(td)]) == 0
    assert run(["validate-td", host, str(td)]) == 0
    broken = _write_json(tmp_path, "bad_td.json", {"td": TreeDecomposition.from_bags([[0, 1]], []).to_json()})
    assert run(["validate-td", host, broken]) == 1
    b = _write_json(tmp_path, "b.json", {"bramble": grid_bramble(3).to_json()})
    out = tmp_path / "bo.json"
    assert run(["bramble-order", host, b, "--out", str(out)]) == 0
    assert "order 4" in capsys.readouterr().out
    assert run(["check", "bramble", host, str(out)]) == 0


def test_decomposition_commands(tmp_path):
    host = tmp_path / "h.g6"
    td = tmp_path / "td.json"
    assert run(["gen", "decomposed", "20", "2", "--seed", "4", "--out", str(host), "--cert", str(td)]) == 0
    assert run(["check", "td", str(host), str(td)]) == 0
    gx = tmp_path / "gx.json"
    gxg = tmp_path / "gx.g6"
    assert run(["gx", str(host), str(td), "0", "--graph-out", str(gxg), "--out", str(gx)]) == 0
    cert = json.loads(gx.read_text())
    # the model certifies G_x as an induced minor of the host
    assert run(["check", "model", str(host), str(gx)]) == 0
    assert graphio.read_graph(gxg).n == len(cert["payload"]["model"]["branch_sets"])
    torso = tmp_path / "torso.g6"
    assert run(["torso", str(host), str(td), "0", "--out", str(torso)]) == 0


def test_project_bramble_round_trip(tmp_path):
    from sparsetw.structure import attach_ears

    g, td, _ = attach_ears(grid(3), 3, seed=1, h=1)
    host = _write_graph(tmp_path, "h.g6", g)
    tdp = _write_json(tmp_path, "td.json", {"td": td.to_json()})
    b = _write_json(tmp_path, "b.json", {"bramble": grid_bramble(3).to_json()})
    out = tmp_path / "proj.json"
    assert run(["project-bramble", host, tdp, b, "--h", "1", "--p", "3", "--out", str(out)]) == 0
    assert run(["check", "projection", host, str(out)]) == 0


def test_check_parallel_jobs(tmp_path, capsys):
    host = _write_graph(tmp_path, "g8.g6", grid(8))
    paths = []
    for i in range(3):
        paths.append(_write_json(tmp_path, f"m{i}.json",
                                 certs.make_certificate("model", {"model": grid_to_wall_model(8).to_json()})))
    assert run(["check", "any", host, *paths, "--jobs", "2"]) == 0
    assert capsys.readouterr().out.count(": ok") == 3


def test_determinism_modulo_timestamp(tmp_path):
    outs = []
    for i in range(2):
        host = tmp_path / f"h{i}.g6"
        cert = tmp_path / f"c{i}.json"
        assert run(["gen", "trim-clique", "8", "6", "--seed", "9", "--out", str(host), "--cert", str(cert)]) == 0
        ded = tmp_path / f"d{i}.json"
        assert run(["dedensify", str(host), str(cert), "--h", "2", "--mode", "sampled", "--seed", "9",
                    "--out", str(ded)]) == 0
        outs.append((host.read_bytes(), certs.strip_timestamp(json.loads(cert.read_text())),
                     certs.strip_timestamp(json.loads(ded.read_text()))))
    assert outs[0] == outs[1]

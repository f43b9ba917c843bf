import json
import subprocess
import sys

import pytest

from npcchain.cli import main


def run(tmp_path, *args):
    return main(["--out", str(tmp_path), *args])


def load(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_build_xk(tmp_path):
    assert run(tmp_path, "build-xk", "--k", "2") == 0
    rep = load(tmp_path / "build_xk.json")
    assert rep["counts"] == [1, 24, 32]
    assert rep["link"] == {"nodes": 48, "edges": 96, "bipartite": True, "girth": 4}
    assert rep["n_pair_distances"] == [6, 6]
    assert (tmp_path / "X_2.complex").exists() and (tmp_path / "timing.json").exists()


def test_template_fails_npc(tmp_path):
    assert run(tmp_path, "check-npc", "--k", "1") == 1
    assert load(tmp_path / "npc.json")["npc"]["passed"] is False


def test_pipeline_replay_and_downstream(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "pipeline-yk", "--k", "1") == 0
    assert run(b, "pipeline-yk", "--k", "1") == 0
    ra, rb = (p / "Y_1" / "report.json" for p in (a, b))
    assert ra.read_bytes() == rb.read_bytes()
    assert (a / "Y_1" / "monodromy.txt").read_bytes() == (b / "Y_1" / "monodromy.txt").read_bytes()
    cx = str(a / "Y_1" / "Y.complex")
    assert run(tmp_path, "check-npc", "--complex", cx, "--strict") == 0
    assert run(tmp_path, "ultraconvex", "--complex", cx, "--rose", "n_{1,1}^(7)") == 0
    assert run(tmp_path, "ultraconvex", "--complex", cx, "--rose", "n_{1,1}^(7)", "n_{1,1}^(8)") == 1
    assert run(tmp_path, "monodromy", "--from-pipeline", str(ra)) == 0
    assert load(tmp_path / "monodromy.json")["replay_matches_report"]


def test_link_dot(tmp_path):
    dot = tmp_path / "lk.dot"
    assert run(tmp_path, "link", "--k", "1", "--dot", str(dot)) == 0
    assert dot.read_text().startswith('graph "Lk(v)"')
    assert load(tmp_path / "link.json")["round_trip"]


def test_spine_and_short_cycles(tmp_path):
    assert run(tmp_path, "spine", "--k", "1") == 0
    assert load(tmp_path / "spine.json")["rank"] == 17
    assert run(tmp_path, "short-cycles", "--k", "1") == 0
    rep = load(tmp_path / "short_cycles.json")
    assert set(rep["count_by_length"]) == {"4", "6"} and rep["null_homologous"] == 0
    assert rep["middle_cycles"]["count"] == 2 and all(rep["middle_cycles"]["hnt"])


def test_chain_commands(tmp_path):
    assert run(tmp_path, "chain", "--ks", "1", "1", "--base", "y1") == 0
    assert load(tmp_path / "chain.json")["strict"]
    assert run(tmp_path, "chain", "--ks", "1", "--base", "gamma", "--base-k", "2") == 2


def test_presentations(tmp_path):
    assert run(tmp_path, "presentations", "--n", "2", "--terminal", "example1:2") == 0
    rep = load(tmp_path / "presentations.json")
    assert len(rep["top"]["vertices"]) == 6 and len(rep["bottom"]["vertices"]) == 6
    assert rep["bookkeeping"]["consistent"] and rep["structural_problems"] == []
    assert (tmp_path / "presentations.txt").read_text().count("[") >= 9
    assert run(tmp_path, "presentations", "--n", "1", "--terminal", "nope") == 2


def test_bs_demo(tmp_path):
    assert run(tmp_path, "bs-demo") == 0
    assert load(tmp_path / "bs_demo.json")["passed"]


def test_bass_small(tmp_path):
    assert run(tmp_path, "bass-test", "--samples", "50", "--seed", "3") == 0


def test_distort_example1_and_fit(tmp_path):
    assert run(tmp_path, "distort", "example1", "--k", "2", "--nmax", "30") == 0
    fit = load(tmp_path / "example1_k2_fit.json")
    assert fit["depth"] == 0
    for name in ("example1_k2.csv", "example1_k2.png", "example1_k2_loglog.png"):
        assert (tmp_path / name).stat().st_size > 0
    assert run(tmp_path, "distort", "fit", str(tmp_path / "example1_k2.csv")) == 0
    assert load(tmp_path / "fit_fit.json")["depth"] == 0


def test_distort_step_and_chain(tmp_path):
    assert run(tmp_path, "distort", "step", "--nmax", "9") == 0
    assert load(tmp_path / "step_fit.json")["depth"] == 1
    assert run(tmp_path, "distort", "chain", "--nmax", "9", "--cap", str(2 ** 20)) == 0
    rep = load(tmp_path / "chain_fit.json")
    assert rep["upper_model"]["passed"] and rep["depth"] == 1
    assert run(tmp_path, "distort", "chain", "--base", "other:1") == 2


def test_exports(tmp_path):
    assert run(tmp_path, "export", "complex", "--format", "txt", "--k", "1") == 0
    assert run(tmp_path, "export", "complex", "--format", "json", "--k", "1") == 0
    assert run(tmp_path, "export", "link", "--format", "dot", "--k", "1") == 0
    assert run(tmp_path, "export", "spine", "--format", "dot", "--k", "1") == 0
    assert run(tmp_path, "export", "presentations", "--format", "json", "--n", "1") == 0
    assert run(tmp_path, "export", "link", "--format", "svg", "--k", "1") == 2
    assert run(tmp_path, "export", "nothing", "--format", "txt") == 2


def test_usage_errors(tmp_path):
    assert run(tmp_path, "no-such-command") == 2
    assert run(tmp_path, "build-xk") == 2
    assert run(tmp_path, "check-npc") == 2


def test_console_script(tmp_path):
    out = subprocess.run([sys.executable, "-m", "npcchain.cli", "--out", str(tmp_path), "bs-demo"],
                         capture_output=True, text=True)
    assert out.returncode == 0

import json
import subprocess
import sys

import pytest

from conftest import write_tree

APP = {
    "m.py": (
        "def helper():\n    pass\n\n"
        "def main():\n    helper()\n\n\n"
        "main()\n"
    )
}


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "callsight", *map(str, args)],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


@pytest.fixture
def app_dir(tmp_path):
    return write_tree(tmp_path / "app", APP)


def test_analyze_writes_adjacency_json(app_dir, tmp_path):
    out = tmp_path / "cg.json"
    proc = run_cli("analyze", "--mode", "aa", "--app-root", app_dir, "-o", out)
    assert proc.returncode == 0, proc.stderr
    graph = json.loads(out.read_text())
    assert graph["m"] == ["m.main"]
    assert graph["m.main"] == ["m.helper"]


def test_analyze_edges_format(app_dir, tmp_path):
    out = tmp_path / "cg.json"
    proc = run_cli(
        "analyze", "--mode", "aa", "--app-root", app_dir,
        "-o", out, "--format", "edges",
    )
    assert proc.returncode == 0, proc.stderr
    payload = json.loads(out.read_text())
    assert any(
        e["caller"] == "m.main" and e["callee"] == "m.helper" and ":" in e["site"]
        for e in payload["edges"]
    )


def test_analyze_explicit_entries(app_dir, tmp_path):
    out = tmp_path / "cg.json"
    proc = run_cli(
        "analyze", "--app-root", app_dir, "--entry", "m.main", "-o", out,
    )
    assert proc.returncode == 0
    graph = json.loads(out.read_text())
    assert set(graph) == {"m.main", "m.helper"}


def test_configuration_error_exit_code(tmp_path):
    proc = run_cli(
        "analyze", "--app-root", tmp_path / "missing", "-o", tmp_path / "out.json",
    )
    assert proc.returncode == 1
    assert "error:" in proc.stderr


def test_analysis_error_exit_code_with_partial_output(tmp_path):
    app = write_tree(
        tmp_path / "app",
        {"m.py": "import broken\n\ndef main():\n    broken.f()\n\nmain()\n",
         "broken.py": "def f(:\n"},
    )
    out = tmp_path / "cg.json"
    proc = run_cli("analyze", "--app-root", app, "-o", out)
    assert proc.returncode == 2
    graph = json.loads(out.read_text())
    assert "broken.f" in graph["m.main"]


def test_score_command(tmp_path):
    gen = tmp_path / "gen.json"
    gt = tmp_path / "gt.json"
    gen.write_text(json.dumps({"a": ["b", "c"], "b": [], "c": []}))
    gt.write_text(json.dumps({"a": ["b", "d"], "b": [], "d": []}))
    proc = run_cli("score", "--gen", gen, "--gt", gt)
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["precision"] == 0.5
    assert report["recall"] == 0.5


def test_reach_command(tmp_path):
    cg = tmp_path / "cg.json"
    cg.write_text(json.dumps({"entry": ["mid"], "mid": ["vuln"], "vuln": []}))
    proc = run_cli(
        "reach", "--cg", cg, "--entry", "entry",
        "--target", "vuln", "--target", "ghost",
    )
    assert proc.returncode == 0
    reports = {r["target"]: r for r in json.loads(proc.stdout)}
    assert reports["vuln"]["status"] == "reachable"
    assert reports["vuln"]["chain"] == ["entry", "mid", "vuln"]
    assert reports["ghost"]["status"] == "unknown"


def test_analyze_renders_figure(app_dir, tmp_path):
    out = tmp_path / "cg.json"
    figure = tmp_path / "cg.png"
    proc = run_cli(
        "analyze", "--app-root", app_dir, "-o", out, "--figure", figure,
    )
    assert proc.returncode == 0, proc.stderr
    assert figure.exists() and figure.stat().st_size > 0


def test_score_renders_figure(tmp_path):
    gen = tmp_path / "gen.json"
    gen.write_text(json.dumps({"a": ["b"], "b": []}))
    figure = tmp_path / "score.png"
    proc = run_cli("score", "--gen", gen, "--gt", gen, "--figure", figure)
    assert proc.returncode == 0
    assert figure.exists() and figure.stat().st_size > 0


def test_custom_builtin_table(app_dir, tmp_path):
    table = tmp_path / "custom.table"
    table.write_text("frob -> builtins.frob\n")
    app = write_tree(
        tmp_path / "app2", {"m.py": "def main():\n    frob()\n\nmain()\n"}
    )
    out = tmp_path / "cg.json"
    proc = run_cli(
        "analyze", "--app-root", app, "--builtin-table", table, "-o", out,
    )
    assert proc.returncode == 0, proc.stderr
    graph = json.loads(out.read_text())
    assert "builtins.frob" in graph["m.main"]
"""Acceptance suite: one test per release criterion, strictest settings.

Each test prints a PASS line when its criterion holds so a verbose run
reads as a checklist.
"""

import json
import os
import resource
import subprocess
import sys
import time
from pathlib import Path

import pytest

from callsight.callgraph import score, vuln_chains
from callsight.driver import Mode, ScenarioConfig, run_scenario
from callsight.engine import Analysis
from callsight.intra import EMPTY_THETA
from callsight.sources import discover_modules

from conftest import write_tree
import synthetic

FIXTURES = Path(__file__).parent / "fixtures"


def _passed(name: str) -> None:
    print(f"ACCEPTANCE {name}: PASS")


# -- 1. motivating-example fidelity ---------------------------------------------


def test_criterion_motivating_example_fidelity():
    cfg = ScenarioConfig(
        mode=Mode.AA,
        app_root=FIXTURES / "motivating",
        entries=("bpytop.process", "bpytop.options"),
    )
    result = run_scenario(cfg)
    edges = result.callgraph.edge_pairs()
    assert edges == {
        ("bpytop.process", "bpytop.Cpu.redo"),
        ("bpytop.process", "psutil.pid"),
        ("bpytop.options", "bpytop.Base.collect"),
        ("bpytop.Base.collect", "bpytop.Proc.do"),
    }
    # zero edges to the flow-insensitive false positives
    forbidden = {"bpytop.Proc.redo", "bpytop.Mem.redo", "bpytop.Mem.do", "bpytop.Cpu.do"}
    assert not any(callee in forbidden for _, callee in edges)
    # no descent into the external dependency
    external = {n.render() for n in result.callgraph.nodes if n.render().startswith("psutil")}
    assert external == {"psutil.pid"}
    # the store-induced bindings, exactly one per store site
    process = result.analysis.facts.function_named("bpytop.process")
    ftg_r = result.analysis.last_run[process].ftg_r
    stores = {
        (r.dst.render(), r.site.line)
        for r in ftg_r.all_relations()
        if r.src.render() == "bpytop.Base.collector" and r.dst.render().startswith("bpytop.")
    }
    assert stores == {("bpytop.Cpu", 10), ("bpytop.Mem", 13)}
    _passed("motivating-example fidelity")


# -- 2. micro-benchmark categories ------------------------------------------------


MISS_TOLERANT = {"dicts", "lists", "builtins"}


def test_criterion_micro_benchmark_categories():
    corpus = FIXTURES / "micro"
    by_category: dict[str, list[tuple[str, object]]] = {}
    for fixture in sorted(p for p in corpus.iterdir() if p.is_dir()):
        cfg = ScenarioConfig(mode=Mode.AA, app_root=fixture, entries=("prog",))
        result = run_scenario(cfg)
        gt = json.loads((fixture / "cg.json").read_text())
        report = score(result.callgraph.adjacency(), gt)
        by_category.setdefault(fixture.name.split("__")[0], []).append(
            (fixture.name, report)
        )
    failures = []
    for category, entries in sorted(by_category.items()):
        for name, report in entries:
            documented = (corpus / name / "misses.json").exists()
            if report.fp:
                failures.append(f"{name}: FP {sorted(report.fp)}")
            if report.fn and not (documented and category in MISS_TOLERANT):
                failures.append(f"{name}: FN {sorted(report.fn)}")
    assert not failures, failures
    # the documented misses exist and live only in the tolerated categories
    documented = [
        p.parent.name for p in corpus.glob("*/misses.json")
    ]
    assert documented
    assert all(name.split("__")[0] in MISS_TOLERANT for name in documented)
    _passed("micro-benchmark categories")


# -- 3. flow-sensitivity property ---------------------------------------------------


def test_criterion_flow_sensitivity(tmp_path):
    straight = write_tree(
        tmp_path / "straight",
        {
            "m.py": (
                "class A:\n    def m(self):\n        pass\n\n"
                "class B:\n    def m(self):\n        pass\n\n"
                "def main():\n    x = A()\n    x = B()\n    x.m()\n"
            )
        },
    )
    result = run_scenario(
        ScenarioConfig(mode=Mode.AA, app_root=straight, entries=("m.main",))
    )
    edges = result.callgraph.edge_pairs()
    assert ("m.main", "m.B.m") in edges
    assert ("m.main", "m.A.m") not in edges

    branched = write_tree(
        tmp_path / "branched",
        {
            "m.py": (
                "class A:\n    def m(self):\n        pass\n\n"
                "class B:\n    def m(self):\n        pass\n\n"
                "def main(c):\n"
                "    if c:\n        x = A()\n"
                "    else:\n        x = B()\n"
                "    x.m()\n"
            )
        },
    )
    result = run_scenario(
        ScenarioConfig(mode=Mode.AA, app_root=branched, entries=("m.main",))
    )
    edges = result.callgraph.edge_pairs()
    assert ("m.main", "m.A.m") in edges
    assert ("m.main", "m.B.m") in edges
    _passed("flow-sensitivity property")


# -- 4. type-graph reuse -------------------------------------------------------------


def test_criterion_ftg_reuse(tmp_path):
    app = write_tree(
        tmp_path / "app",
        {
            "m.py": (
                "class A:\n    pass\n\n"
                "def callee(v):\n    w = v\n    x = w\n    return x\n"
            )
        },
    )
    analysis = Analysis(discover_modules(app))
    analysis.ensure_previsited("m")
    callee = analysis.facts.function_named("m.callee")
    first = analysis.intra_analysis(callee, EMPTY_THETA)
    applications_after_first = analysis.counters["rule_applications"]
    second = analysis.intra_analysis(callee, EMPTY_THETA)
    assert analysis.counters["rule_applications"] == applications_after_first
    assert analysis.counters["cache_hits"] == 1
    assert first[1].canonical() == second[1].canonical()
    _passed("FTG reuse")


# -- 5. metrics correctness ------------------------------------------------------------


def test_criterion_metrics_correctness():
    gen = {"a": ["b", "c"], "b": [], "c": []}
    gt = {"a": ["b", "d"], "b": [], "d": []}
    report = score(gen, gt)
    assert report.precision == 1 / 2
    assert report.recall == 1 / 2
    assert score(gen, gen).precision == 1.0
    assert score(gen, gen).recall == 1.0
    empty_gen = score({}, gt)
    assert empty_gen.precision == 1.0  # 0/0 is vacuously perfect
    assert empty_gen.recall == 0.0
    empty_both = score({}, {})
    assert (empty_both.precision, empty_both.recall) == (1.0, 1.0)
    gt_empty = score(gen, {})
    assert gt_empty.precision == 0.0
    assert gt_empty.recall == 1.0
    _passed("metrics correctness")


# -- 6. desk-scale performance ------------------------------------------------------------


def test_criterion_desk_scale_performance(tmp_path):
    app_root, lib_root = synthetic.generate(tmp_path)
    app_loc = synthetic.line_count(app_root)
    total_loc = app_loc + synthetic.line_count(lib_root)
    assert app_loc >= 4_500, app_loc
    assert total_loc >= 95_000, total_loc

    started = time.perf_counter()
    result = run_scenario(
        ScenarioConfig(mode=Mode.AW, app_root=app_root, lib_roots=(lib_root,))
    )
    elapsed = time.perf_counter() - started
    peak_rss_mb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024

    assert len(result.callgraph.edges) > 5_000
    assert elapsed < 30.0, f"AW analysis took {elapsed:.1f}s"
    assert peak_rss_mb < 1024, f"peak RSS {peak_rss_mb:.0f} MB"
    print(
        f"desk-scale: {total_loc} LOC, {len(result.callgraph.edges)} edges, "
        f"{elapsed:.1f}s, peak {peak_rss_mb:.0f} MB"
    )
    _passed("desk-scale performance")


# -- 7. termination and determinism ------------------------------------------------------------


RECURSIVE_APP = {
    "m.py": (
        "def direct(n):\n    direct(n)\n\n"
        "def ping():\n    pong()\n\n"
        "def pong():\n    ping()\n\n"
        "def main(c):\n"
        "    if c:\n        direct(1)\n"
        "    else:\n        ping()\n"
    )
}


def test_criterion_termination_and_determinism(tmp_path):
    app = write_tree(tmp_path / "app", RECURSIVE_APP)
    outputs = []
    for seed in ("1", "2"):
        out = tmp_path / f"cg-{seed}.json"
        env = dict(os.environ, PYTHONHASHSEED=seed)
        proc = subprocess.run(
            [
                sys.executable, "-m", "callsight", "analyze",
                "--mode", "aa", "--app-root", str(app), "-o", str(out),
            ],
            env=env,
            capture_output=True,
            timeout=60,
        )
        assert proc.returncode == 0, proc.stderr.decode()
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    graph = json.loads(outputs[0])
    assert "m.direct" in graph["m.direct"]
    assert "m.pong" in graph["m.ping"]
    _passed("termination and determinism")


# -- 8. reachability case study ------------------------------------------------------------


CASE_STUDY_APP = {
    "main.py": (
        "import vulnlib\n\n\n"
        "def entry():\n    wrapper()\n\n\n"
        "def wrapper():\n    vulnlib.parse('payload')\n\n\n"
        "def debug_dump():\n    vulnlib.legacy()\n"
    )
}

CASE_STUDY_LIB = {
    "vulnlib/__init__.py": (
        "def parse(data):\n    return data\n\n\n"
        "def legacy():\n    pass\n"
    )
}


def test_criterion_reachability_case_study(tmp_path):
    app = write_tree(tmp_path / "app", CASE_STUDY_APP)
    lib = write_tree(tmp_path / "libs", CASE_STUDY_LIB)
    result = run_scenario(
        ScenarioConfig(mode=Mode.AW, app_root=app, lib_roots=(lib,))
    )
    graph = result.callgraph.adjacency()
    reports = {
        r.target: r
        for r in vuln_chains(
            graph, ["main.entry"], ["vulnlib.parse", "vulnlib.legacy"]
        )
    }
    reachable = reports["vulnlib.parse"]
    assert reachable.status == "reachable"
    assert reachable.chain == ["main.entry", "main.wrapper", "vulnlib.parse"]
    safe = reports["vulnlib.legacy"]
    assert safe.status == "safe"
    assert safe.chain == []
    _passed("reachability case study")

import sys

from callsight.driver import Mode

from conftest import edge_names

COLLECT_APP = {
    "m.py": (
        "class Base:\n"
        "    collector = None\n"
        "    def collect(self, what):\n"
        "        Base.collector = what\n\n"
        "class Cpu(Base):\n"
        "    def redo(self):\n        pass\n\n"
        "def main():\n"
        "    Base().collect(Cpu())\n"
    )
}


def last_run(result, dotted):
    ident = result.analysis.facts.function_named(dotted)
    return result.analysis.last_run[ident]


def rendered(graph) -> set[tuple[str, str]]:
    return {(r.src.render(), r.dst.render()) for r in graph.all_relations()}


def test_param_types_from_call_arguments(analyze):
    result = analyze(COLLECT_APP, entries=["m.main"])
    entry = last_run(result, "m.Base.collect")
    assert ("m.Base.collect.what", "m.Cpu") in rendered(entry.g_in)
    assert ("m.Base.collect.self", "m.Base") in rendered(entry.g_in)


def test_entry_function_starts_from_imports_only(analyze):
    result = analyze(
        {
            "m.py": "import helper\n\ndef process():\n    pass\n",
            "helper.py": "def h():\n    pass\n",
        },
        entries=["m.process"],
    )
    entry = last_run(result, "m.process")
    seeds = rendered(entry.g_in)
    assert ("m.helper", "helper") in seeds
    # θ is empty: nothing is rooted in the entry function's own namespace
    assert not any(src.startswith("m.process.") for src, _ in seeds)


def _observed_self_types(source: str, call: str) -> list[str]:
    """Oracle: run the program and record type(self) seen by each method."""
    namespace: dict = {}
    observed: list[str] = []

    def profiler(frame, event, arg):
        if event == "call":
            bound = frame.f_locals.get("self")
            if bound is not None and frame.f_code.co_name == "m":
                observed.append(type(bound).__name__)

    exec(source, namespace)
    sys.setprofile(profiler)
    try:
        eval(call, namespace)
    finally:
        sys.setprofile(None)
    return observed


def test_method_receiver_binds_dynamic_type(analyze):
    source = "class K:\n    def m(self):\n        return self\n"
    assert _observed_self_types(source, "K().m()") == ["K"]
    result = analyze(
        {"m.py": source + "\ndef main():\n    x = K()\n    x.m()\n"},
        entries=["m.main"],
    )
    entry = last_run(result, "m.K.m")
    assert ("m.K.m.self", "m.K") in rendered(entry.g_in)


def test_reuse_skips_rule_applications(analyze):
    result = analyze(
        {
            "m.py": (
                "class A:\n    pass\n\n"
                "def callee(v):\n    w = v\n    return w\n\n"
                "def main():\n    callee(A())\n    callee(A())\n"
            )
        },
        entries=["m.main"],
    )
    assert result.analysis.counters["cache_hits"] == 1


def test_cached_result_equals_fresh_computation(analyze):
    files = {
        "m.py": (
            "class A:\n    pass\n\n"
            "def callee(v):\n    w = v\n    return w\n\n"
            "def main():\n    callee(A())\n    callee(A())\n"
        )
    }
    result = analyze(files, entries=["m.main"])
    fresh = analyze(files, entries=["m.main"])
    cached_out = last_run(result, "m.callee").ftg_out
    fresh_out = last_run(fresh, "m.callee").ftg_out
    assert rendered(cached_out) == rendered(fresh_out)


def test_straight_line_strong_update(analyze):
    result = analyze(
        {
            "m.py": (
                "class A:\n    def m(self):\n        pass\n\n"
                "class B:\n    def m(self):\n        pass\n\n"
                "def main():\n    x = A()\n    x = B()\n    x.m()\n"
            )
        },
        entries=["m.main"],
    )
    edges = edge_names(result)
    assert ("m.main", "m.B.m") in edges
    assert ("m.main", "m.A.m") not in edges


def test_branch_join_weak_update(analyze):
    result = analyze(
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
        entries=["m.main"],
    )
    edges = edge_names(result)
    assert ("m.main", "m.A.m") in edges
    assert ("m.main", "m.B.m") in edges
    # and only those bindings for x
    rels = [
        r
        for r in last_run(result, "m.main").ftg_r.all_relations()
        if r.src.render() == "m.main.x"
    ]
    assert {r.dst.render() for r in rels} == {"m.A", "m.B"}


def test_empty_body_adds_no_relations(analyze):
    result = analyze(
        {"m.py": "def empty(a):\n    pass\n\ndef main():\n    empty(1)\n"},
        entries=["m.main"],
    )
    entry = last_run(result, "m.empty")
    added = rendered(entry.ftg_out) - rendered(entry.g_in)
    assert added == set()


def test_local_temporaries_dropped_from_output(analyze):
    result = analyze(
        {
            "m.py": (
                "class K:\n    pass\n\n"
                "def noisy():\n    tmp = K()\n    other = tmp\n"
            ),
        },
        entries=["m.noisy"],
    )
    out = last_run(result, "m.noisy").ftg_out
    assert not any(
        src.startswith("m.noisy.") for src, _ in rendered(out)
    )


def test_loop_exit_merges_header_and_body_state(analyze):
    result = analyze(
        {
            "m.py": (
                "class A:\n    def fin(self):\n        pass\n\n"
                "class B:\n    def fin(self):\n        pass\n\n"
                "def main(c):\n"
                "    h = A()\n"
                "    while c:\n        h = B()\n"
                "    h.fin()\n"
            )
        },
        entries=["m.main"],
    )
    edges = edge_names(result)
    assert ("m.main", "m.A.fin") in edges
    assert ("m.main", "m.B.fin") in edges


def test_direct_recursion_terminates_with_single_edge(analyze):
    result = analyze(
        {"m.py": "def f():\n    f()\n\ndef main():\n    f()\n"},
        entries=["m.main"],
    )
    edges = edge_names(result)
    assert ("m.f", "m.f") in edges
    assert ("m.main", "m.f") in edges

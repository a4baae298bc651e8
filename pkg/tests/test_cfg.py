import ast
import textwrap

import pytest

from callsight.cfg import ROLE_WITH_EXIT, build_cfg


def cfg_for(source: str):
    tree = ast.parse(textwrap.dedent(source))
    return build_cfg("m", tree.body, None)


def by_line(cfg):
    """Map line -> site for real statement nodes (one statement per line)."""
    out = {}
    for site, node in cfg.nodes.items():
        if node.role != "virtual":
            out.setdefault(site.line, site)
    return out


def edge_lines(cfg):
    def label(site):
        if site == cfg.entry:
            return "entry"
        if site == cfg.dummy_exit:
            return "exit"
        suffix = "w" if cfg.nodes[site].role == ROLE_WITH_EXIT else ""
        return f"{site.line}{suffix}"

    return {(label(a), label(b)) for a, b in cfg.edges}


def test_linear_chain():
    cfg = cfg_for("a()\nb()\n")
    assert edge_lines(cfg) == {("entry", "1"), ("1", "2"), ("2", "exit")}
    assert len(cfg.returns) == 1


def test_if_divergence_and_convergence():
    cfg = cfg_for("if c:\n    x = A\nelse:\n    x = B\nuse(x)\n")
    lines = by_line(cfg)
    cond, use = lines[1], lines[5]
    assert cfg.out_degree(cond) == 2
    assert len(cfg.predecessors(use)) == 2


def test_if_without_else_falls_through():
    cfg = cfg_for("if c:\n    x = A\nuse(x)\n")
    lines = by_line(cfg)
    assert cfg.out_degree(lines[1]) == 2
    assert {p.line for p in cfg.predecessors(lines[3])} == {1, 2}


def test_while_loop_edges():
    # Hand-enumerated edge set for the three-statement loop program.
    cfg = cfg_for("while c:\n    f()\n")
    assert edge_lines(cfg) == {
        ("entry", "1"),
        ("1", "2"),
        ("2", "1"),
        ("1", "exit"),
    }
    lines = by_line(cfg)
    assert cfg.back_sources[lines[1]] == frozenset({lines[2]})


def test_return_edges_into_dummy_exit():
    cfg = cfg_for("def unused():\n    pass\n")
    # module body: one statement falls off the end
    assert len(cfg.returns) == 1
    source = "x = 1\n"
    cfg = cfg_for(source)
    (ret,) = cfg.returns
    assert (ret, cfg.dummy_exit) in cfg.edges


def test_explicit_return_and_dead_code():
    tree = ast.parse("def f():\n    return 1\n    dead()\n")
    cfg = build_cfg("m", tree.body[0].body, tree.body[0])
    # the statement after the return never executes and gets no site
    lines = {s.line for s, n in cfg.nodes.items() if n.role != "virtual"}
    assert lines == {2}
    assert {s.line for s in cfg.returns} == {2}


def test_every_site_reachable_from_entry():
    cfg = cfg_for(
        """
        a()
        if c:
            b()
        else:
            d()
        while w:
            e()
        try:
            t()
        except Exception:
            h()
        with open(p) as fh:
            fh.read()
        z()
        """
    )
    for site in cfg.nodes:
        if site == cfg.entry:
            continue
        assert cfg.reaches(cfg.entry, site), f"{site} unreachable"


def test_with_block_diverges_and_converges():
    cfg = cfg_for("with m() as v:\n    body()\nafter()\n")
    lines = edge_lines(cfg)
    assert ("1", "2") in lines  # header to body
    assert ("1", "1w") in lines  # header to join
    assert ("2", "1w") in lines  # body to join
    assert ("1w", "3") in lines


def test_try_except_divergence():
    cfg = cfg_for(
        "pre()\ntry:\n    t()\nexcept ValueError:\n    h()\nafter()\n"
    )
    lines = by_line(cfg)
    pre, t, handler, after = lines[1], lines[3], lines[4], lines[6]
    assert (pre, t) in cfg.edges
    assert (pre, handler) in cfg.edges
    assert (t, after) in cfg.edges
    assert {p.line for p in cfg.predecessors(after)} >= {3, 5}


def test_break_and_continue():
    cfg = cfg_for(
        "while c:\n    if q:\n        break\n    continue\nafter()\n"
    )
    lines = by_line(cfg)
    assert (lines[3], lines[5]) in cfg.edges  # break -> after
    assert (lines[4], lines[1]) in cfg.edges  # continue -> header


def test_deterministic_construction():
    source = "a()\nif c:\n    b()\nwhile w:\n    d()\n"
    one, two = cfg_for(source), cfg_for(source)
    assert {(a, b) for a, b in one.edges} == {(a, b) for a, b in two.edges}
    assert one.walk_order() == two.walk_order()


def test_preorder_ordinals_monotone_on_acyclic_paths():
    cfg = cfg_for("a()\nif c:\n    b()\nz()\n")
    for src, dst in cfg.edges:
        if dst == cfg.dummy_exit or src == cfg.entry:
            continue
        if src in cfg.back_sources.get(dst, ()):  # pragma: no cover
            continue
        assert src.ordinal < dst.ordinal


def test_function_body_always_has_a_return():
    tree = ast.parse("def f():\n    x = 1\n")
    cfg = build_cfg("m", tree.body[0].body, tree.body[0])
    assert len(cfg.returns) >= 1

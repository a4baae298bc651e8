"""Control flow graphs over statement-level expressions.

Each function (or module body) gets a graph whose nodes are the sites of its
executable statements.  Control headers (`if`/`while`/`for`/`with`
conditions) are nodes of their own; branch bodies hang off them and converge
at join points.  A virtual entry node precedes the first statement and a
virtual dummy exit collects every return site, including the implicit
fall-off end.  Statements that can never execute (code after a return or
raise) receive no site.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field

from .sources import ExprSite

# Node roles drive the transfer-rule dispatch during the preorder walk.
ROLE_STMT = "stmt"
ROLE_WITH_EXIT = "with_exit"
ROLE_EXCEPT = "except"
ROLE_VIRTUAL = "virtual"


@dataclass(frozen=True, slots=True)
class CfgNode:
    site: ExprSite
    role: str
    node: ast.AST | None


@dataclass
class ControlFlowGraph:
    """Statement-level control flow for one function or module body."""

    owner_module: str
    entry: ExprSite
    dummy_exit: ExprSite
    nodes: dict[ExprSite, CfgNode] = field(default_factory=dict)
    edges: set[tuple[ExprSite, ExprSite]] = field(default_factory=set)
    returns: set[ExprSite] = field(default_factory=set)
    # Loop header -> sites whose back edges target it.  The state flowing out
    # of a loop merges the header state with these, once, after the single
    # pass over the body.
    back_sources: dict[ExprSite, frozenset[ExprSite]] = field(default_factory=dict)
    _preds: dict[ExprSite, list[ExprSite]] = field(default_factory=dict)
    _succs: dict[ExprSite, list[ExprSite]] = field(default_factory=dict)
    _reach: dict[ExprSite, frozenset[ExprSite]] = field(default_factory=dict)
    _dominators: dict[ExprSite, frozenset[ExprSite]] = field(default_factory=dict)

    def add_edge(self, src: ExprSite, dst: ExprSite) -> None:
        if (src, dst) in self.edges:
            return
        self.edges.add((src, dst))
        self._preds.setdefault(dst, []).append(src)
        self._succs.setdefault(src, []).append(dst)

    def predecessors(self, site: ExprSite) -> list[ExprSite]:
        return self._preds.get(site, [])

    def successors(self, site: ExprSite) -> list[ExprSite]:
        return self._succs.get(site, [])

    def out_degree(self, site: ExprSite) -> int:
        return len(self._succs.get(site, []))

    def walk_order(self) -> list[ExprSite]:
        """Real nodes in preorder (entry and dummy exit excluded)."""
        return sorted(
            (s for s in self.nodes if self.nodes[s].role != ROLE_VIRTUAL),
            key=lambda s: s.ordinal,
        )

    def reaches(self, src: ExprSite, dst: ExprSite) -> bool:
        """True if control can flow from ``src`` to ``dst``."""
        if src not in self._reach:
            seen: set[ExprSite] = set()
            frontier = [src]
            while frontier:
                cur = frontier.pop()
                for nxt in self._succs.get(cur, []):
                    if nxt not in seen:
                        seen.add(nxt)
                        frontier.append(nxt)
            self._reach[src] = frozenset(seen)
        return dst in self._reach[src]

    def dominates(self, dom: ExprSite, node: ExprSite) -> bool:
        """True if every path from the entry to ``node`` passes ``dom``."""
        if not self._dominators:
            self._compute_dominators()
        return dom in self._dominators.get(node, frozenset())

    def _compute_dominators(self) -> None:
        nodes = list(self.nodes)
        everything = frozenset(nodes)
        dom: dict[ExprSite, frozenset[ExprSite]] = {
            n: (frozenset((n,)) if n == self.entry else everything) for n in nodes
        }
        order = sorted(nodes, key=lambda s: s.ordinal)
        changed = True
        while changed:
            changed = False
            for node in order:
                if node == self.entry:
                    continue
                preds = self._preds.get(node, [])
                incoming = [dom[p] for p in preds] or [frozenset()]
                new = frozenset((node,)) | frozenset.intersection(*incoming)
                if new != dom[node]:
                    dom[node] = new
                    changed = True
        self._dominators = dom


class _Builder:
    def __init__(self, module: str, anchor: ast.AST | None):
        line = getattr(anchor, "lineno", 1) if anchor is not None else 1
        col = getattr(anchor, "col_offset", 0) if anchor is not None else 0
        self.module = module
        self.counter = 0
        self.cfg = ControlFlowGraph(
            owner_module=module,
            entry=ExprSite(module, line, col, 0),
            dummy_exit=ExprSite(module, line, col, -1),
        )
        self.cfg.nodes[self.cfg.entry] = CfgNode(self.cfg.entry, ROLE_VIRTUAL, None)
        # (header, exits) per enclosing loop, for break/continue targets.
        self.loops: list[tuple[ExprSite, set[ExprSite]]] = []

    def new_site(self, node: ast.AST, role: str = ROLE_STMT) -> ExprSite:
        self.counter += 1
        site = ExprSite(self.module, node.lineno, node.col_offset, self.counter)
        self.cfg.nodes[site] = CfgNode(site, role, node)
        return site

    def link(self, frontier: set[ExprSite], site: ExprSite) -> None:
        for src in frontier:
            self.cfg.add_edge(src, site)

    def visit_body(self, stmts: list[ast.stmt], frontier: set[ExprSite]) -> set[ExprSite]:
        for stmt in stmts:
            if not frontier:
                break  # unreachable tail; no sites for dead statements
            frontier = self.visit_stmt(stmt, frontier)
        return frontier

    def visit_stmt(self, stmt: ast.stmt, frontier: set[ExprSite]) -> set[ExprSite]:
        if isinstance(stmt, ast.If):
            cond = self.new_site(stmt)
            self.link(frontier, cond)
            then_out = self.visit_body(stmt.body, {cond})
            else_out = self.visit_body(stmt.orelse, {cond}) if stmt.orelse else {cond}
            return then_out | else_out

        if isinstance(stmt, (ast.While, ast.For, ast.AsyncFor)):
            header = self.new_site(stmt)
            self.link(frontier, header)
            breaks: set[ExprSite] = set()
            self.loops.append((header, breaks))
            body_out = self.visit_body(stmt.body, {header})
            self.loops.pop()
            for src in body_out:
                self.cfg.add_edge(src, header)
            self.cfg.back_sources[header] = frozenset(body_out)
            out = self.visit_body(stmt.orelse, {header}) if stmt.orelse else {header}
            return out | breaks

        if isinstance(stmt, (ast.With, ast.AsyncWith)):
            header = self.new_site(stmt)
            self.link(frontier, header)
            body_out = self.visit_body(stmt.body, {header})
            exit_site = self.new_site(stmt, ROLE_WITH_EXIT)
            # Diverge at the header (the body may be skipped by an enter
            # failure or a suppressed exception) and converge at the exit.
            self.link(body_out | {header}, exit_site)
            return {exit_site}

        if isinstance(stmt, ast.Try):
            body_out = self.visit_body(stmt.body, set(frontier))
            joined = self.visit_body(stmt.orelse, body_out) if stmt.orelse else body_out
            for handler in stmt.handlers:
                hsite = self.new_site(handler, ROLE_EXCEPT)
                self.link(frontier, hsite)
                joined = joined | self.visit_body(handler.body, {hsite})
            if stmt.finalbody and joined:
                joined = self.visit_body(stmt.finalbody, joined)
            return joined

        if isinstance(stmt, ast.Match):
            header = self.new_site(stmt)
            self.link(frontier, header)
            out: set[ExprSite] = set()
            exhaustive = False
            for case in stmt.cases:
                if isinstance(case.pattern, ast.MatchAs) and case.pattern.pattern is None:
                    exhaustive = True
                out |= self.visit_body(case.body, {header})
            if not exhaustive:
                out.add(header)
            return out

        site = self.new_site(stmt)
        self.link(frontier, site)

        if isinstance(stmt, (ast.Return, ast.Raise)):
            self.cfg.returns.add(site)
            return set()
        if isinstance(stmt, ast.Break):
            if self.loops:
                self.loops[-1][1].add(site)
            return set()
        if isinstance(stmt, ast.Continue):
            if self.loops:
                self.cfg.add_edge(site, self.loops[-1][0])
            return set()
        return {site}


def build_cfg(module: str, body: list[ast.stmt], anchor: ast.AST | None = None) -> ControlFlowGraph:
    """Build the control flow graph for a statement list.

    ``anchor`` locates the virtual entry/exit (the enclosing def, or None for
    a module body).
    """
    builder = _Builder(module, anchor)
    cfg = builder.cfg
    frontier = builder.visit_body(body, {cfg.entry})
    cfg.returns |= frontier
    if not cfg.returns:
        cfg.returns.add(cfg.entry)
    builder.counter += 1
    dummy = ExprSite(module, cfg.dummy_exit.line, cfg.dummy_exit.col, builder.counter)
    cfg.dummy_exit = dummy
    cfg.nodes[dummy] = CfgNode(dummy, ROLE_VIRTUAL, None)
    for site in cfg.returns:
        cfg.add_edge(site, dummy)
    return cfg

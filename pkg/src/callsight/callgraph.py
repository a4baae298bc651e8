"""Call graphs, their serialization, scoring and reachability queries.

Graphs are emitted as adjacency JSON (sorted keys, sorted arrays, UTF-8,
newline-terminated) or as an edge list carrying per-edge call sites.
Scoring compares generated and ground-truth edge sets; reachability reports
one shortest call chain per requested target.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError
from .identifiers import IdentifierType
from .sources import ExprSite


@dataclass(frozen=True, slots=True)
class CallEdge:
    """One call relation with its call-site provenance."""

    caller: IdentifierType
    callee: IdentifierType
    site: ExprSite

    def sort_key(self):
        return (self.caller.render(), self.callee.render(), self.site)


@dataclass
class CallGraph:
    """Nodes are callables; edges carry call-site provenance."""

    nodes: set[IdentifierType] = field(default_factory=set)
    edges: set[CallEdge] = field(default_factory=set)

    def add_edge(self, edge: CallEdge) -> None:
        self.edges.add(edge)
        self.nodes.add(edge.caller)
        self.nodes.add(edge.callee)

    def add_node(self, node: IdentifierType) -> None:
        self.nodes.add(node)

    def adjacency(self) -> dict[str, list[str]]:
        """Name-level view: every node keyed, callee lists sorted."""
        out: dict[str, set[str]] = {n.render(): set() for n in self.nodes}
        for edge in self.edges:
            out.setdefault(edge.caller.render(), set()).add(edge.callee.render())
            out.setdefault(edge.callee.render(), set())
        return {k: sorted(v) for k, v in sorted(out.items())}

    def edge_pairs(self) -> set[tuple[str, str]]:
        return {(e.caller.render(), e.callee.render()) for e in self.edges}


def prune_reachable(cg: CallGraph, entries: list[IdentifierType],
                    warnings: list[str] | None = None) -> CallGraph:
    """Subgraph forward-reachable from the entries.

    Entries missing from the graph are kept as isolated nodes with a warning.
    """
    succs: dict[IdentifierType, set[IdentifierType]] = {}
    for edge in cg.edges:
        succs.setdefault(edge.caller, set()).add(edge.callee)
    reachable: set[IdentifierType] = set()
    frontier: list[IdentifierType] = []
    for entry in entries:
        if entry not in cg.nodes and warnings is not None:
            warnings.append(f"entry {entry.render()} not in call graph")
        if entry not in reachable:
            reachable.add(entry)
            frontier.append(entry)
    while frontier:
        cur = frontier.pop()
        for nxt in succs.get(cur, ()):
            if nxt not in reachable:
                reachable.add(nxt)
                frontier.append(nxt)
    pruned = CallGraph()
    pruned.nodes = set(reachable)
    pruned.edges = {e for e in cg.edges if e.caller in reachable}
    return pruned


# -- serialization ------------------------------------------------------------


def emit(cg: CallGraph, fmt: str = "adjacency") -> bytes:
    """Byte-deterministic serialization of a call graph."""
    if fmt == "adjacency":
        payload: object = cg.adjacency()
    elif fmt == "edges":
        payload = {
            "nodes": sorted(n.render() for n in cg.nodes),
            "edges": [
                {
                    "caller": e.caller.render(),
                    "callee": e.callee.render(),
                    "site": e.site.render(),
                }
                for e in sorted(cg.edges, key=CallEdge.sort_key)
            ],
        }
    else:
        raise ConfigurationError(f"unknown output format {fmt!r}")
    text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def load_adjacency(path: Path) -> dict[str, list[str]]:
    """Read an adjacency JSON file back into a name-level graph."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot load call graph {path}: {exc}") from exc
    if isinstance(data, dict) and "edges" in data and "nodes" in data:
        out: dict[str, set[str]] = {n: set() for n in data["nodes"]}
        for edge in data["edges"]:
            out.setdefault(edge["caller"], set()).add(edge["callee"])
        return {k: sorted(v) for k, v in sorted(out.items())}
    if not isinstance(data, dict):
        raise ConfigurationError(f"call graph {path} is not an adjacency object")
    return {str(k): sorted(str(c) for c in v) for k, v in sorted(data.items())}


def adjacency_edges(graph: dict[str, list[str]]) -> set[tuple[str, str]]:
    return {(caller, callee) for caller, callees in graph.items() for callee in callees}


# -- scoring ------------------------------------------------------------------


@dataclass
class MetricsReport:
    """Edge-set precision and recall, with the witnessing edge sets."""

    precision: float
    recall: float
    tp: set[tuple[str, str]]
    fp: set[tuple[str, str]]
    fn: set[tuple[str, str]]

    def as_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "tp": sorted(f"{a} -> {b}" for a, b in self.tp),
            "fp": sorted(f"{a} -> {b}" for a, b in self.fp),
            "fn": sorted(f"{a} -> {b}" for a, b in self.fn),
        }


def score(gen: dict[str, list[str]], gt: dict[str, list[str]]) -> MetricsReport:
    """Edge-set arithmetic: precision |TP|/|Gen|, recall |TP|/|GT|.

    An empty denominator counts as a vacuous 1.0.
    """
    gen_edges = adjacency_edges(gen)
    gt_edges = adjacency_edges(gt)
    tp = gen_edges & gt_edges
    precision = len(tp) / len(gen_edges) if gen_edges else 1.0
    recall = len(tp) / len(gt_edges) if gt_edges else 1.0
    return MetricsReport(
        precision=precision,
        recall=recall,
        tp=tp,
        fp=gen_edges - gt_edges,
        fn=gt_edges - gen_edges,
    )


# -- reachability -------------------------------------------------------------


@dataclass
class ChainReport:
    target: str
    status: str  # "reachable" | "safe" | "unknown"
    chain: list[str]

    def as_dict(self) -> dict:
        return {"target": self.target, "status": self.status, "chain": self.chain}


def vuln_chains(
    graph: dict[str, list[str]],
    entries: list[str],
    targets: list[str],
) -> list[ChainReport]:
    """One shortest entry-to-target call chain per reachable target.

    Targets absent from the graph are reported as unknown, present but
    unreachable ones as safe.  Chains are node lists; a target that is
    itself an entry yields a single-node chain.
    """
    known = set(graph)
    for callees in graph.values():
        known.update(callees)
    parent: dict[str, str | None] = {}
    order: list[str] = []
    for entry in sorted(set(entries)):
        if entry not in parent:
            parent[entry] = None
            order.append(entry)
    idx = 0
    while idx < len(order):
        cur = order[idx]
        idx += 1
        for nxt in graph.get(cur, ()):
            if nxt not in parent:
                parent[nxt] = cur
                order.append(nxt)
    reports = []
    for target in targets:
        if target not in known:
            reports.append(ChainReport(target, "unknown", []))
        elif target in parent:
            chain: list[str] = []
            cur: str | None = target
            while cur is not None:
                chain.append(cur)
                cur = parent[cur]
            reports.append(ChainReport(target, "reachable", list(reversed(chain))))
        else:
            reports.append(ChainReport(target, "safe", []))
    return reports

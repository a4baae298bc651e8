"""Intra-procedural analysis: one pass over a function's statements.

Starting from the argument type relations supplied by the caller, the walk
threads a type graph through the control flow graph in preorder: a branch
point hands each successor an independent copy, a join merges the incoming
graphs, and every statement applies its transfer rule followed by a strong
update.  Results are cached per (function, input graph) so repeated calls
with the same argument types reuse the finished graph without re-applying
any rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from . import typegraph as tg
from .cfg import ControlFlowGraph
from .identifiers import IdentifierType, Kind
from .sources import ExprSite
from .summaries import FunctionInfo
from .transfer import apply_transfer_rule, scoped_var
from .typegraph import FunctionTypeGraph, TypeRelation, latest, points_of

if TYPE_CHECKING:  # pragma: no cover
    from .engine import Analysis


@dataclass(frozen=True)
class Theta:
    """Argument type information selected at one call site.

    ``param_types``: for each parameter bound at the call, the non-variable
    types its argument can take.  ``extra_relations``: class- and
    module-rooted relations those types can reach, copied so the callee can
    resolve attribute chains on them.  ``bound_params`` lists every
    parameter the call bound explicitly, so defaults only fill the rest.
    """

    param_types: tuple[tuple[str, tuple[IdentifierType, ...]], ...] = ()
    extra_relations: frozenset[TypeRelation] = frozenset()
    bound_params: tuple[str, ...] = ()


EMPTY_THETA = Theta()


@dataclass(frozen=True)
class FtgCacheEntry:
    """Frozen result of one intra-procedural run, keyed by (owner, input)."""

    owner: IdentifierType
    g_in: FunctionTypeGraph
    ftg_r: FunctionTypeGraph
    ftg_out: FunctionTypeGraph
    edges: tuple
    resolved_returns: tuple[IdentifierType, ...]


def compute_param_types(engine: "Analysis", info: FunctionInfo, theta: Theta) -> FunctionTypeGraph:
    """Initial type graph: parameters from the call, then the module's
    import bindings, globals and any captured closure relations."""
    cfg = engine.cfg_of(info)
    entry = cfg.entry
    g_in = FunctionTypeGraph(info.ident)

    def seed(src: IdentifierType, dst: IdentifierType) -> None:
        g_in.add(TypeRelation(src, dst, entry))

    for name, types in theta.param_types:
        param = scoped_var(info, name)
        for typ in types:
            seed(param, typ)
    bound = set(theta.bound_params)
    for name, default in engine.default_exprs(info):
        if name in bound:
            continue
        for typ in engine.resolve_static_expr(info.module, default):
            seed(scoped_var(info, name), typ)
    for rel in sorted(theta.extra_relations, key=TypeRelation.sort_key):
        seed(rel.src, rel.dst)
    for local, target in engine.import_seeds(info):
        seed(local, target)
    if not info.is_module_body:
        for rel in engine.module_globals(info.module):
            seed(rel.src, rel.dst)
        for rel in engine.captures.get(info.ident, ()):
            seed(rel.src, rel.dst)
    return g_in


def _effective_parents(cfg: ControlFlowGraph, site: ExprSite) -> list[ExprSite]:
    """Predecessors, with loop-exit edges widened by the loop's back-edge
    sources so the state after a loop reflects one body evaluation."""
    parents = list(cfg.predecessors(site))
    extra: list[ExprSite] = []
    for parent in parents:
        back = cfg.back_sources.get(parent)
        if back:
            limit = max(b.ordinal for b in back)
            if site.ordinal > limit:
                extra.extend(b for b in back if b not in parents)
    return parents + extra


def intra_analysis(
    engine: "Analysis", f: IdentifierType, theta: Theta
) -> tuple[FunctionTypeGraph, FunctionTypeGraph]:
    """Run (or reuse) the analysis of one function for given argument types."""
    info = engine.function_info(f)
    if info is None:
        empty = FunctionTypeGraph(f)
        return empty, empty
    engine.ensure_previsited(info.module)
    g_in = compute_param_types(engine, info, theta)
    key = (f, g_in.canonical())

    if not info.is_module_body:
        cached = engine.cache.get(key)
        if cached is not None:
            engine.counters["cache_hits"] += 1
            engine.replay_edges(cached.edges)
            return cached.g_in, cached.ftg_out

    if engine.on_stack(key):
        engine.counters["recursion_cuts"] += 1
        return g_in, g_in
    if engine.stack_depth() >= engine.max_depth:
        engine.diagnose(
            "depth-limit", None, f"call depth limit reached at {f.render()}"
        )
        return g_in, g_in

    cfg = engine.cfg_of(info)
    engine.push_frame(key)
    engine.push_edge_collector()
    try:
        ftg: dict[ExprSite, FunctionTypeGraph] = {cfg.entry: g_in}
        run_state: dict = {}
        for site in cfg.walk_order():
            parents = [p for p in _effective_parents(cfg, site) if p in ftg]
            if not parents:
                continue
            if len(parents) == 1:
                base = ftg[parents[0]]
                if cfg.out_degree(parents[0]) > 1:
                    base = base.copy()
            else:
                base = tg.merge([ftg[p] for p in parents])
            delta = apply_transfer_rule(engine, info, cfg.nodes[site], base, run_state, cfg)
            ftg[site] = tg.strong_update(base, delta.relations)
        return_graphs = [
            ftg[r] for r in sorted(cfg.returns, key=lambda s: s.ordinal) if r in ftg
        ]
        ftg_r = tg.merge(return_graphs) if return_graphs else g_in.copy()
    finally:
        edges = engine.pop_edge_collector()
        engine.pop_frame()

    engine.mark_visited(f)
    ftg_out = compute_output_ftg(info, g_in, ftg_r, cfg)
    entry = FtgCacheEntry(
        owner=f,
        g_in=g_in,
        ftg_r=ftg_r,
        ftg_out=ftg_out,
        edges=tuple(edges),
        resolved_returns=(),
    )
    engine.last_run[f] = entry
    if not info.is_module_body:
        engine.cache[key] = entry
    return g_in, ftg_out


def _is_nonlocal_rooted(src: IdentifierType) -> bool:
    """Relations under a class, module or external stub survive the call."""
    return src.parent_kind in (Kind.CLASS, Kind.MODULE, Kind.EXT_MODULE)


def compute_output_ftg(
    info: FunctionInfo,
    ftg_in: FunctionTypeGraph,
    ftg_r: FunctionTypeGraph,
    cfg: ControlFlowGraph,
) -> FunctionTypeGraph:
    """Project the final graph onto what outlives the call.

    Keeps the final bindings of every input source (latest along the flow),
    everything rooted at classes or modules, and the return pseudo-field.
    Purely local temporaries are discarded; relations pointing AT a local
    temporary are rewritten to the temporary's resolved types so the chain
    stays intact for the caller.
    """
    out = FunctionTypeGraph(info.ident)
    ret = info.ident.ret()
    in_sources = set(ftg_in.relations)
    for src in ftg_r.sources():
        rels = ftg_r.outgoing(src)
        if src == ret:
            kept = rels  # returns accumulate; yields may produce several
        elif src in in_sources or _is_nonlocal_rooted(src):
            kept = latest(rels, cfg)
        else:
            continue
        for rel in kept:
            dst = rel.dst
            if dst.kind is Kind.VARIABLE and not _is_nonlocal_rooted(dst) and dst not in in_sources:
                # Local temporary: substitute what it resolves to.
                for resolved in sorted(points_of(ftg_r, dst), key=IdentifierType.sort_key):
                    out.add(TypeRelation(src, resolved, rel.site))
            else:
                out.add(rel)
    return out

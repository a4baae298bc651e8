"""Flow-labeled type relations and per-function type graphs.

A type graph records, for one function, which types each identifier has
taken and at which expression.  Straight-line code replaces a binding in
place (strong update); control-flow joins union the incoming graphs, so a
variable may carry one binding per converging path, each keeping the site
that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cfg import ControlFlowGraph
from .identifiers import IdentifierType, Kind
from .sources import ExprSite

NON_VARIABLE_KINDS = (Kind.CLASS, Kind.FUNCTION, Kind.MODULE, Kind.EXT_MODULE)


@dataclass(frozen=True, slots=True)
class TypeRelation:
    """``src`` took the type of ``dst`` as a result of evaluating ``site``."""

    src: IdentifierType
    dst: IdentifierType
    site: ExprSite

    def sort_key(self):
        return (self.src.sort_key(), self.dst.sort_key(), self.site)

    def __repr__(self) -> str:
        return f"{self.src.render()} -> {self.dst.render()} @ {self.site.render()}"


@dataclass
class FunctionTypeGraph:
    """Type relations of one function, keyed by source identifier."""

    owner: IdentifierType
    relations: dict[IdentifierType, frozenset[TypeRelation]] = field(
        default_factory=dict
    )
    _canonical: tuple | None = field(default=None, repr=False, compare=False)

    def copy(self) -> "FunctionTypeGraph":
        """Independent duplicate; updates to either side stay invisible."""
        return FunctionTypeGraph(self.owner, dict(self.relations))

    def all_relations(self) -> list[TypeRelation]:
        out: list[TypeRelation] = []
        for rels in self.relations.values():
            out.extend(rels)
        out.sort(key=TypeRelation.sort_key)
        return out

    def outgoing(self, src: IdentifierType) -> frozenset[TypeRelation]:
        return self.relations.get(src, frozenset())

    def add(self, relation: TypeRelation) -> None:
        existing = self.relations.get(relation.src, frozenset())
        self.relations[relation.src] = existing | {relation}
        self._canonical = None

    def sources(self) -> list[IdentifierType]:
        return sorted(self.relations, key=IdentifierType.sort_key)

    def canonical(self) -> tuple:
        """Order-free form; site ordinals erased so that graphs built for the
        same argument types at different call sites compare equal."""
        if self._canonical is None:
            self._canonical = tuple(
                sorted(
                    (r.src.render(), r.src.kind.value, r.dst.render(), r.dst.kind.value,
                     r.site.flow_key())
                    for rels in self.relations.values()
                    for r in rels
                )
            )
        return self._canonical

    def dump(self) -> str:
        """One relation per line, sorted; the golden-test format."""
        lines = [
            f"{r.src.render()} -> {r.dst.render()} @ {r.site.render()}"
            for r in self.all_relations()
        ]
        lines.sort()
        return "\n".join(lines)


def strong_update(g: FunctionTypeGraph, delta: set[TypeRelation]) -> FunctionTypeGraph:
    """Fold a delta into the graph, replacing rebindable sources.

    Variable bindings (locals, globals) are replaced outright, together with
    any field path shadowed under them.  Class-attribute slots accumulate
    one relation per store site; the flow order decides later which one a
    read or the output graph sees.
    """
    if not delta:
        return g
    out = g.copy()
    killed = {r.src for r in delta if r.src.parent_kind is not Kind.CLASS}
    for src in killed:
        out.relations.pop(src, None)
        for other in list(out.relations):
            if other.is_path_under(src):
                del out.relations[other]
    for rel in sorted(delta, key=TypeRelation.sort_key):
        out.add(rel)
    return out


def merge(graphs: list[FunctionTypeGraph]) -> FunctionTypeGraph:
    """Union of relation sets; duplicates collapse."""
    if not graphs:
        raise ValueError("merge requires at least one graph")
    out = FunctionTypeGraph(graphs[0].owner)
    for g in graphs:
        for src, rels in g.relations.items():
            existing = out.relations.get(src)
            out.relations[src] = rels if existing is None else existing | rels
    return out


def points_of(g: FunctionTypeGraph, t: IdentifierType) -> frozenset[IdentifierType]:
    """Non-variable types transitively reachable from ``t``.

    A non-variable input points to itself.  Cycles among variables simply
    terminate; an empty result means the identifier is unresolved.
    """
    if t.kind in NON_VARIABLE_KINDS:
        return frozenset((t,))
    found: set[IdentifierType] = set()
    seen: set[IdentifierType] = set()
    stack = [t]
    while stack:
        cur = stack.pop()
        if cur in seen:
            continue
        seen.add(cur)
        for rel in g.outgoing(cur):
            if rel.dst.kind in NON_VARIABLE_KINDS:
                found.add(rel.dst)
            else:
                stack.append(rel.dst)
    return frozenset(found)


def latest(
    relations: frozenset[TypeRelation] | set[TypeRelation],
    cfg: ControlFlowGraph,
    use_site: "ExprSite | None" = None,
) -> frozenset[TypeRelation]:
    """Keep only the flow-latest relations among ones sharing a source.

    A relation is dropped when a strictly later relation certainly
    overwrites it before ``use_site`` (the function exit by default): the
    later site is flow-reachable from the earlier one but not vice versa,
    and it dominates the use site, so no path keeps the old binding alive.
    Sites on parallel branches or inside skippable loop bodies survive;
    ties at the same location fall back to the ordinal.
    """
    rels = sorted(relations, key=TypeRelation.sort_key)
    if len(rels) <= 1:
        return frozenset(rels)
    use = use_site if use_site is not None else cfg.dummy_exit
    keep: list[TypeRelation] = []
    for a in rels:
        superseded = False
        for b in rels:
            if a is b or a.site == b.site:
                continue
            if a.site.flow_key() == b.site.flow_key():
                if b.site.ordinal > a.site.ordinal:
                    superseded = True
                    break
                continue
            if (
                cfg.reaches(a.site, b.site)
                and not cfg.reaches(b.site, a.site)
                and cfg.dominates(b.site, use)
            ):
                superseded = True
                break
        if not superseded:
            keep.append(a)
    return frozenset(keep)


def equals(g1: FunctionTypeGraph, g2: FunctionTypeGraph) -> bool:
    """Relation-set equality, ignoring site ordinals."""
    return g1.canonical() == g2.canonical()


def relation_closure(
    g: FunctionTypeGraph, roots: list[IdentifierType]
) -> set[TypeRelation]:
    """Relations reachable from the given types.

    For class-kind roots this collects every relation rooted at a field path
    of the class, then chases variable chains and newly discovered classes,
    so a callee receiving those types can resolve attribute lookups on them.
    """
    out: set[TypeRelation] = set()
    seen_cls: set[IdentifierType] = set()
    seen_var: set[IdentifierType] = set()
    cls_queue = [r for r in roots if r.kind in (Kind.CLASS, Kind.MODULE)]
    var_queue: list[IdentifierType] = [r for r in roots if r.kind is Kind.VARIABLE]

    def take(rel: TypeRelation) -> None:
        out.add(rel)
        if rel.dst.kind is Kind.VARIABLE:
            var_queue.append(rel.dst)
        elif rel.dst.kind is Kind.CLASS:
            cls_queue.append(rel.dst)

    while cls_queue or var_queue:
        while var_queue:
            var = var_queue.pop()
            if var in seen_var:
                continue
            seen_var.add(var)
            for rel in g.outgoing(var):
                take(rel)
        if cls_queue:
            cls = cls_queue.pop()
            if cls in seen_cls:
                continue
            seen_cls.add(cls)
            for src in list(g.relations):
                if src.is_path_under(cls):
                    for rel in g.outgoing(src):
                        take(rel)
    return out

"""The analysis engine: shared state and cross-module resolution.

One :class:`Analysis` instance owns the module table, the three summaries,
the type-graph cache, the call graph under construction and the diagnostics
stream.  Intra- and inter-procedural passes call back into it for everything
that crosses a function boundary: previsiting modules, resolving imports and
class members, seeding globals, and recording call edges.

Cache entries remember the call edges discovered while a function was first
analyzed; a cache hit replays them, so reuse never loses edges even when the
first analysis ran during a non-recorded globals pass.
"""

from __future__ import annotations

import ast
import builtins as py_builtins
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from . import inter, intra
from .builtins_table import BuiltinTable, load_builtin_table
from .callgraph import CallEdge, CallGraph
from .cfg import ControlFlowGraph, build_cfg
from .identifiers import IdentifierType, Kind, module_ident
from .intra import EMPTY_THETA, FtgCacheEntry, Theta
from .sources import ExprSite, ModuleTable, SourceModule
from .summaries import (
    FunctionInfo,
    ProgramFacts,
    collect_module,
    lookup_member,
    module_namespace,
    mro_linearize,
)
from .transfer import EvalContext, Handle, module_var, scoped_var
from .typegraph import FunctionTypeGraph, TypeRelation, relation_closure


@dataclass(frozen=True, slots=True)
class Diagnostic:
    category: str
    site: ExprSite | None
    message: str

    def render(self) -> str:
        where = self.site.render() if self.site else "-"
        return f"[{self.category}] {where}: {self.message}"


def _ext_module_stub(dotted: str) -> IdentifierType:
    *pkgs, leaf = dotted.split(".")
    ns = tuple((p, Kind.EXT_MODULE) for p in pkgs)
    return IdentifierType(Kind.EXT_MODULE, ns, leaf)


class Analysis:
    """Shared state for one call-graph construction run."""

    def __init__(
        self,
        table: ModuleTable,
        *,
        descend_libraries: bool = True,
        builtin_table: Path | None = None,
        max_depth: int = 200,
    ) -> None:
        self.table = table
        self.descend_libraries = descend_libraries
        self.max_depth = max_depth
        self.facts = ProgramFacts()
        self.builtins: BuiltinTable = load_builtin_table(builtin_table)
        self.callgraph = CallGraph()
        self.cache: dict[tuple[IdentifierType, tuple], FtgCacheEntry] = {}
        self.last_run: dict[IdentifierType, FtgCacheEntry] = {}
        self.diagnostics: list[Diagnostic] = []
        self.warnings: list[str] = list(table.warnings)
        self.counters: Counter = Counter()
        self.captures: dict[IdentifierType, tuple[TypeRelation, ...]] = {}
        self.record_edges = True
        self._stack: list[tuple[IdentifierType, tuple]] = []
        self._stack_set: set[tuple[IdentifierType, tuple]] = set()
        self._bodies_in_flight: list[str] = []
        self._collectors: list[list[CallEdge]] = []
        self._cfgs: dict[IdentifierType, ControlFlowGraph] = {}
        self._bodies_by_ident: dict[IdentifierType, FunctionInfo] = {}
        self._module_globals: dict[str, tuple[TypeRelation, ...]] = {}
        self._globals_in_progress: set[str] = set()
        self._visited_funcs: set[IdentifierType] = set()

    # -- diagnostics ---------------------------------------------------------

    def diagnose(self, category: str, site: ExprSite | None, message: str) -> None:
        self.diagnostics.append(Diagnostic(category, site, message))

    # -- modules and previsit --------------------------------------------------

    def module_visible(self, module: SourceModule) -> bool:
        """Library modules are analysis boundaries unless descent is on."""
        return self.descend_libraries or not module.is_library

    def ensure_previsited(self, name: str) -> SourceModule | None:
        module = self.table.get(name)
        if module is None or not self.module_visible(module):
            return None
        if name in self.facts.visited_modules:
            return module
        module.parse()
        if module.unanalyzable is not None:
            self.diagnose("unanalyzable", None, f"{name}: {module.unanalyzable}")
        collect_module(self.facts, module)
        body = self.facts.module_bodies.get(name)
        if body is not None:
            self._bodies_by_ident[body.ident] = body
        self._resolve_bases(name)
        return module

    def _resolve_bases(self, name: str) -> None:
        for cls_ident, info in list(self.facts.classes.items()):
            if info.module != name or info.bases:
                continue
            for expr in info.base_exprs:
                base = self._resolve_base_expr(name, expr)
                if base is None:
                    continue
                info.bases.append(base)
                self.facts.hier.add((base, cls_ident))

    def _resolve_base_expr(self, module: str, expr: ast.expr) -> IdentifierType | None:
        """Base-class expression to identifier; stubs for the unresolvable.

        Builtin bases (object, Exception, ...) terminate the hierarchy and
        are not recorded.
        """
        dotted = _dotted_name(expr)
        if dotted is None:
            return None
        head, _, rest = dotted.partition(".")
        target: IdentifierType | None = None
        local = self.facts.module_level.get(module, {}).get(head)
        if local is not None:
            target = local
        else:
            for entry in self.facts.imports.get(module, ()):
                if entry.local_name == head and entry.scope is None:
                    target = self._resolve_import(entry.source_module, entry.imported_name)
                    break
        if target is None:
            if not rest:
                return None if hasattr(py_builtins, head) else _stub_class(head)
            return _stub_class(dotted)
        for part in rest.split(".") if rest else []:
            if target.kind in (Kind.MODULE, Kind.EXT_MODULE):
                target = self.resolve_module_attr(target, part)
                if target is None:
                    return _stub_class(dotted)
            else:
                return _stub_class(dotted)
        if target.kind is Kind.CLASS:
            return target
        if target.kind is Kind.EXT_MODULE:
            return IdentifierType(Kind.CLASS, target.namespace, target.name)
        return _stub_class(dotted)

    # -- imports ---------------------------------------------------------------

    def _resolve_import(
        self,
        source: str,
        name: str | None,
        seen: frozenset[tuple[str, str | None]] = frozenset(),
    ) -> IdentifierType:
        """Identifier an import binding points at; stubs when out of scope."""
        key = (source, name)
        if key in seen:
            return _ext_module_stub(source if name is None else f"{source}.{name}")
        seen = seen | {key}
        module = self.table.get(source)
        visible = module is not None and self.module_visible(module)
        if name is None:
            if visible:
                self.ensure_previsited(source)
                return module_ident(source)
            return _ext_module_stub(source)
        if not visible:
            return _ext_module_stub(f"{source}.{name}")
        sub = self.table.get(f"{source}.{name}")
        if sub is not None and self.module_visible(sub):
            self.ensure_previsited(sub.name)
            return module_ident(sub.name)
        self.ensure_previsited(source)
        top = self.facts.module_level.get(source, {}).get(name)
        if top is not None:
            return top
        if name in self.facts.module_vars.get(source, set()):
            return module_var(source, name)
        for entry in self.facts.imports.get(source, ()):
            if entry.local_name == name and entry.scope is None:
                return self._resolve_import(entry.source_module, entry.imported_name, seen)
        return module_var(source, name)

    def _entry_bindings(self, entry) -> list[tuple[str, IdentifierType]]:
        if entry.imported_name == "*":
            source = self.table.get(entry.source_module)
            if source is None or not self.module_visible(source):
                return []
            self.ensure_previsited(entry.source_module)
            out = []
            names = set(self.facts.module_level.get(entry.source_module, {}))
            names |= self.facts.module_vars.get(entry.source_module, set())
            for name in sorted(names):
                if not name.startswith("_"):
                    out.append((name, self._resolve_import(entry.source_module, name)))
            return out
        return [(entry.local_name, self._resolve_import(entry.source_module, entry.imported_name))]

    def import_bindings(
        self, module: str, node: ast.Import | ast.ImportFrom
    ) -> list[tuple[str, IdentifierType]]:
        """Name bindings produced by one import statement."""
        out: list[tuple[str, IdentifierType]] = []
        for entry in self.facts.imports.get(module, ()):
            if entry.site.line == node.lineno and entry.site.col == node.col_offset:
                out.extend(self._entry_bindings(entry))
        return out

    def import_seeds(self, info: FunctionInfo) -> list[tuple[IdentifierType, IdentifierType]]:
        """Import-derived relations seeded into a function's initial graph."""
        out: list[tuple[IdentifierType, IdentifierType]] = []
        for entry in self.facts.imports.get(info.module, ()):
            if entry.scope is None:
                src_of = lambda local: module_var(info.module, local)
            elif entry.scope == info.ident:
                src_of = lambda local: scoped_var(info, local)
            else:
                continue
            for local, target in self._entry_bindings(entry):
                out.append((src_of(local), target))
        return out

    def import_triples(self, module: str) -> list[tuple[IdentifierType, IdentifierType, ExprSite]]:
        """The import summary view: (importing, imported, site) triples."""
        out = []
        for entry in self.facts.imports.get(module, ()):
            for local, target in self._entry_bindings(entry):
                out.append((module_var(module, local), target, entry.site))
        return out

    def resolve_module_attr(
        self, handle: IdentifierType, attr: str
    ) -> IdentifierType | None:
        """What ``module.attr`` names: submodule, member, variable or stub."""
        if handle.kind is Kind.EXT_MODULE:
            return handle.derive(attr, Kind.EXT_MODULE)
        dotted = handle.render()
        module = self.table.get(dotted)
        if module is None or not self.module_visible(module):
            return _ext_module_stub(dotted).derive(attr, Kind.EXT_MODULE)
        self.ensure_previsited(dotted)
        if module.unanalyzable is not None:
            return _ext_module_stub(dotted).derive(attr, Kind.EXT_MODULE)
        return self._resolve_import(dotted, attr)

    def default_exprs(self, info: FunctionInfo) -> list[tuple[str, ast.expr]]:
        """(parameter, default expression) pairs for one callable."""
        node = info.node
        if not isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.Lambda)):
            return []
        args = node.args
        out: list[tuple[str, ast.expr]] = []
        positional = args.posonlyargs + args.args
        for arg, default in zip(positional[len(positional) - len(args.defaults):], args.defaults):
            out.append((arg.arg, default))
        for arg, default in zip(args.kwonlyargs, args.kw_defaults):
            if default is not None:
                out.append((arg.arg, default))
        return out

    def resolve_static_expr(self, module: str, expr: ast.expr) -> list[IdentifierType]:
        """Flow-free resolution of a simple expression in a module's scope.

        Used where no type graph is threaded (default argument values).
        """
        if isinstance(expr, ast.Constant):
            kind = type(expr.value).__name__
            from .builtins_table import LITERAL_CLASSES

            if kind in LITERAL_CLASSES:
                return [IdentifierType(Kind.CLASS, (("builtins", Kind.MODULE),), kind)]
            return []
        if isinstance(expr, ast.Lambda):
            info = self.facts.lambda_infos.get(id(expr))
            return [info.ident] if info else []
        dotted = _dotted_name(expr)
        if dotted is None:
            return []
        head, _, rest = dotted.partition(".")
        target = self.facts.module_level.get(module, {}).get(head)
        if target is None:
            for entry in self.facts.imports.get(module, ()):
                if entry.local_name == head and entry.scope is None:
                    target = self._resolve_import(entry.source_module, entry.imported_name)
                    break
        if target is None:
            stub = self.builtins.function_stub(head)
            if stub is not None and not rest:
                return [stub]
            return []
        for part in rest.split(".") if rest else []:
            if target is None or target.kind not in (Kind.MODULE, Kind.EXT_MODULE):
                return []
            target = self.resolve_module_attr(target, part)
        return [target] if target is not None else []

    # -- class machinery ---------------------------------------------------------

    def lookup_member(self, cls: IdentifierType, name: str) -> IdentifierType | None:
        if cls.namespace and cls.namespace[0][0] == "builtins":
            return None
        info = self.facts.classes.get(cls)
        if info is None:
            module = cls.namespace[0][0] if cls.namespace else None
            if module:
                self.ensure_previsited(module)
        return lookup_member(cls, name, self.facts)

    def super_lookup(self, cls: IdentifierType, name: str) -> IdentifierType | None:
        try:
            order = mro_linearize(cls, self.facts, self.warnings)
        except Exception:
            return None
        for ancestor in order[1:]:
            info = self.facts.classes.get(ancestor)
            if info is not None and name in info.members:
                return info.members[name]
        return None

    # -- functions ---------------------------------------------------------------

    def function_info(self, ident: IdentifierType) -> FunctionInfo | None:
        info = self.facts.functions.get(ident)
        if info is not None:
            return info
        return self._bodies_by_ident.get(ident)

    def descendable(self, info: FunctionInfo) -> bool:
        module = self.table.get(info.module)
        if module is None or module.unanalyzable is not None:
            return False
        return self.module_visible(module)

    def cfg_of(self, info: FunctionInfo) -> ControlFlowGraph:
        cfg = self._cfgs.get(info.ident)
        if cfg is not None:
            return cfg
        node = info.node
        if info.is_module_body:
            body = node.body if node is not None else []
            cfg = build_cfg(info.module, body, None)
        elif isinstance(node, ast.Lambda):
            ret = ast.Return(value=node.body)
            ret.lineno = node.body.lineno
            ret.col_offset = node.body.col_offset
            cfg = build_cfg(info.module, [ret], node)
        else:
            cfg = build_cfg(info.module, node.body, node)
        self._cfgs[info.ident] = cfg
        return cfg

    def mark_visited(self, ident: IdentifierType) -> None:
        self._visited_funcs.add(ident)

    def is_visited(self, ident: IdentifierType) -> bool:
        return ident in self._visited_funcs

    # -- globals and closures -------------------------------------------------------

    def module_globals(self, name: str) -> tuple[TypeRelation, ...]:
        """Module-level bindings, computed once by a non-recorded body pass."""
        cached = self._module_globals.get(name)
        if cached is not None:
            return cached
        if name in self._globals_in_progress:
            return ()
        body = self.facts.module_bodies.get(name)
        if body is None:
            module = self.ensure_previsited(name)
            if module is None:
                self._module_globals[name] = ()
                return ()
            body = self.facts.module_bodies.get(name)
            if body is None:
                self._module_globals[name] = ()
                return ()
        if any(key[0] == body.ident for key in self._stack):
            # The body is being walked right now; callers thread the live
            # global state through theta instead.  Do not cache.
            return ()
        self._globals_in_progress.add(name)
        recording = self.record_edges
        self.record_edges = False
        try:
            _, ftg_out = intra.intra_analysis(self, body.ident, EMPTY_THETA)
        finally:
            self.record_edges = recording
            self._globals_in_progress.discard(name)
        rels = tuple(ftg_out.all_relations())
        self._module_globals[name] = rels
        return rels

    def capture_closure(self, ctx: EvalContext, inner: FunctionInfo) -> None:
        """Snapshot relations for an inner callable's free variables."""
        free = sorted(inner.read_names - inner.local_names)
        if not free:
            return
        roots: list[IdentifierType] = []
        outer = ctx.info
        for name in free:
            scope = outer
            while scope is not None:
                if not scope.is_module_body and name in scope.local_names:
                    roots.append(scoped_var(scope, name))
                    break
                enclosing = scope.enclosing_function
                scope = self.facts.functions.get(enclosing) if enclosing else None
        if not roots:
            return
        rels = relation_closure(ctx.g, roots)
        if rels:
            self.captures[inner.ident] = tuple(sorted(rels, key=TypeRelation.sort_key))

    # -- analysis entry points ---------------------------------------------------

    def intra_analysis(
        self, f: IdentifierType, theta: Theta
    ) -> tuple[FunctionTypeGraph, FunctionTypeGraph]:
        return intra.intra_analysis(self, f, theta)

    def eval_call(self, ctx: EvalContext, node: ast.Call) -> list[Handle]:
        return inter.eval_call(ctx, node)

    def invoke_handles(self, ctx, handles, positional) -> list[Handle]:
        return inter.invoke_handles(ctx, handles, positional)

    def invoke_method(self, ctx, member, receiver_types) -> list[Handle]:
        return inter.invoke_method(ctx, member, receiver_types)

    def analyze_entry(self, ident: IdentifierType) -> None:
        """One analysis session rooted at an entry callable."""
        info = self.function_info(ident)
        if info is None:
            self.diagnose("unknown-entry", None, f"entry {ident.render()} not found")
            return
        self.counters["sessions"] += 1
        self.callgraph.add_node(ident)
        intra.intra_analysis(self, ident, EMPTY_THETA)

    # -- call recording -------------------------------------------------------------

    def record_call(self, ctx: EvalContext, callee: IdentifierType) -> None:
        edge = CallEdge(ctx.info.ident, callee, ctx.site)
        ctx.delta.resolved_calls.add((ctx.site, callee))
        self._emit_edge(edge)

    def _emit_edge(self, edge: CallEdge) -> None:
        for collector in self._collectors:
            collector.append(edge)
        if self.record_edges:
            self.callgraph.add_edge(edge)

    def replay_edges(self, edges: tuple) -> None:
        for edge in edges:
            self._emit_edge(edge)

    def push_edge_collector(self) -> None:
        self._collectors.append([])

    def pop_edge_collector(self) -> tuple:
        edges = self._collectors.pop()
        return tuple(dict.fromkeys(edges))

    # -- active call stack -------------------------------------------------------

    def push_frame(self, key: tuple) -> None:
        self._stack.append(key)
        self._stack_set.add(key)
        body = self._bodies_by_ident.get(key[0])
        if body is not None:
            self._bodies_in_flight.append(body.module)

    def pop_frame(self) -> None:
        key = self._stack.pop()
        self._stack_set.discard(key)
        body = self._bodies_by_ident.get(key[0])
        if body is not None:
            self._bodies_in_flight.pop()

    def modules_in_flight(self) -> frozenset[str]:
        return frozenset(self._bodies_in_flight)

    def on_stack(self, key: tuple) -> bool:
        return key in self._stack_set

    def stack_depth(self) -> int:
        return len(self._stack)


def _dotted_name(expr: ast.expr) -> str | None:
    if isinstance(expr, ast.Name):
        return expr.id
    if isinstance(expr, ast.Attribute):
        base = _dotted_name(expr.value)
        return f"{base}.{expr.attr}" if base else None
    return None


def _stub_class(dotted: str) -> IdentifierType:
    *pkgs, leaf = dotted.split(".")
    ns = tuple((p, Kind.EXT_MODULE) for p in pkgs)
    return IdentifierType(Kind.CLASS, ns, leaf)

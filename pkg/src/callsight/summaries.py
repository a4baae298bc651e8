"""Per-module pre-visit summaries: functions, classes and imports.

A single pass over a module's AST records every function definition with its
parameter list, every class with its ordered bases and member functions, and
every import binding.  Cross-module resolution (turning a base-class name or
an import into a concrete identifier) is left to the analysis engine, which
calls back into these structures on demand.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field

from .errors import AnalysisError
from .identifiers import IdentifierType, Kind, Namespace, module_ident
from .sources import ExprSite, SourceModule


@dataclass(frozen=True, slots=True)
class ParamSpec:
    """Parameter names of one callable, with enough shape to bind calls."""

    names: tuple[str, ...]
    positional: tuple[str, ...]
    with_default: frozenset[str]
    vararg: str | None
    kwonly: tuple[str, ...]
    kwarg: str | None
    skip_receiver: bool = False


EMPTY_PARAMS = ParamSpec((), (), frozenset(), None, (), None)


@dataclass
class FunctionInfo:
    """Everything the analyzer needs to know about one callable."""

    ident: IdentifierType
    module: str
    node: ast.AST | None
    params: ParamSpec
    lexical_class: IdentifierType | None = None
    enclosing_function: IdentifierType | None = None
    local_names: frozenset[str] = frozenset()
    global_decls: frozenset[str] = frozenset()
    read_names: frozenset[str] = frozenset()
    is_module_body: bool = False

    @property
    def is_method(self) -> bool:
        return self.lexical_class is not None


@dataclass
class ClassInfo:
    ident: IdentifierType
    module: str
    node: ast.ClassDef
    base_exprs: list[ast.expr]
    bases: list[IdentifierType] = field(default_factory=list)
    members: dict[str, IdentifierType] = field(default_factory=dict)


@dataclass(frozen=True, slots=True)
class ImportEntry:
    """One name binding produced by an import statement.

    ``imported_name`` is None for ``import m`` bindings, ``*`` for star
    imports, and the leaf name for ``from m import x``.
    """

    module: str
    local_name: str
    source_module: str
    imported_name: str | None
    site: ExprSite
    scope: IdentifierType | None = None  # enclosing function for local imports


@dataclass
class ProgramFacts:
    """The three summaries shared by every analysis session."""

    functions: dict[IdentifierType, FunctionInfo] = field(default_factory=dict)
    classes: dict[IdentifierType, ClassInfo] = field(default_factory=dict)
    hier: set[tuple[IdentifierType, IdentifierType]] = field(default_factory=set)
    incl: set[tuple[IdentifierType, IdentifierType]] = field(default_factory=set)
    imports: dict[str, list[ImportEntry]] = field(default_factory=dict)
    # Top-level defs/classes per module, and top-level variable names.
    module_level: dict[str, dict[str, IdentifierType]] = field(default_factory=dict)
    module_vars: dict[str, set[str]] = field(default_factory=dict)
    module_bodies: dict[str, FunctionInfo] = field(default_factory=dict)
    lambda_infos: dict[int, FunctionInfo] = field(default_factory=dict)
    visited_modules: set[str] = field(default_factory=set)

    def function_named(self, dotted: str) -> IdentifierType | None:
        for ident in self.functions:
            if ident.render() == dotted:
                return ident
        return None

    def class_named(self, dotted: str) -> IdentifierType | None:
        for ident in self.classes:
            if ident.render() == dotted:
                return ident
        return None


def module_namespace(name: str) -> Namespace:
    ident = module_ident(name)
    return ident.namespace + ((ident.name, ident.kind),)


def _param_spec(args: ast.arguments, decorators: list[ast.expr]) -> ParamSpec:
    positional = tuple(a.arg for a in args.posonlyargs + args.args)
    kwonly = tuple(a.arg for a in args.kwonlyargs)
    names = list(positional)
    if args.vararg:
        names.append(args.vararg.arg)
    names.extend(kwonly)
    if args.kwarg:
        names.append(args.kwarg.arg)
    with_default = set(positional[len(positional) - len(args.defaults):])
    for kw, default in zip(args.kwonlyargs, args.kw_defaults):
        if default is not None:
            with_default.add(kw.arg)
    skip_receiver = any(
        isinstance(d, ast.Name) and d.id == "staticmethod" for d in decorators
    )
    return ParamSpec(
        names=tuple(names),
        positional=positional,
        with_default=frozenset(with_default),
        vararg=args.vararg.arg if args.vararg else None,
        kwonly=kwonly,
        kwarg=args.kwarg.arg if args.kwarg else None,
        skip_receiver=skip_receiver,
    )


def _assigned_names(node: ast.AST, acc: set[str]) -> None:
    if isinstance(node, ast.Name):
        acc.add(node.id)
    elif isinstance(node, (ast.Tuple, ast.List)):
        for elt in node.elts:
            _assigned_names(elt, acc)
    elif isinstance(node, ast.Starred):
        _assigned_names(node.value, acc)


class _ScopeCollector(ast.NodeVisitor):
    """Collects assigned and read names for one function scope.

    Does not descend into nested function or class scopes; their bindings do
    not belong to this scope.
    """

    def __init__(self) -> None:
        self.assigned: set[str] = set()
        self.globals: set[str] = set()
        self.reads: set[str] = set()

    def visit_FunctionDef(self, node: ast.FunctionDef) -> None:
        self.assigned.add(node.name)

    visit_AsyncFunctionDef = visit_FunctionDef  # type: ignore[assignment]

    def visit_ClassDef(self, node: ast.ClassDef) -> None:
        self.assigned.add(node.name)

    def visit_Lambda(self, node: ast.Lambda) -> None:
        pass

    def visit_Global(self, node: ast.Global) -> None:
        self.globals.update(node.names)

    def visit_Nonlocal(self, node: ast.Nonlocal) -> None:
        self.globals.update(node.names)

    def visit_Name(self, node: ast.Name) -> None:
        if isinstance(node.ctx, (ast.Store, ast.Del)):
            self.assigned.add(node.id)
        else:
            self.reads.add(node.id)

    def visit_Import(self, node: ast.Import) -> None:
        for alias in node.names:
            self.assigned.add(alias.asname or alias.name.split(".")[0])

    def visit_ImportFrom(self, node: ast.ImportFrom) -> None:
        for alias in node.names:
            if alias.name != "*":
                self.assigned.add(alias.asname or alias.name)

    def visit_ExceptHandler(self, node: ast.ExceptHandler) -> None:
        if node.name:
            self.assigned.add(node.name)
        self.generic_visit(node)

    def visit_comprehension(self, node: ast.comprehension) -> None:
        _assigned_names(node.target, self.assigned)
        self.generic_visit(node)


def scope_names(body: list[ast.stmt] | ast.expr) -> tuple[frozenset[str], frozenset[str], frozenset[str]]:
    """(assigned, global-declared, read) names for one scope body."""
    collector = _ScopeCollector()
    if isinstance(body, list):
        for stmt in body:
            collector.visit(stmt)
    else:
        collector.visit(body)
    # Reads inside nested scopes still matter for closure capture.
    reads = set(collector.reads)
    nodes = body if isinstance(body, list) else [body]
    for stmt in nodes:
        for sub in ast.walk(stmt):
            if isinstance(sub, ast.Name) and isinstance(sub.ctx, ast.Load):
                reads.add(sub.id)
    return (
        frozenset(collector.assigned - collector.globals),
        frozenset(collector.globals),
        frozenset(reads),
    )


class ModuleCollector:
    """Walks one module and records raw summary facts.

    Base-class expressions are kept unresolved; the engine resolves them
    right after collection, once imports are known.
    """

    def __init__(self, facts: ProgramFacts, module: SourceModule):
        self.facts = facts
        self.module = module
        self.counter = 0

    def collect(self) -> None:
        name = self.module.name
        self.facts.module_level.setdefault(name, {})
        self.facts.module_vars.setdefault(name, set())
        self.facts.imports.setdefault(name, [])
        body_ident = _module_body_ident(name)
        assigned: frozenset[str] = frozenset()
        reads: frozenset[str] = frozenset()
        root = self.module.ast_root
        if root is not None:
            assigned, _, reads = scope_names(root.body)
        self.facts.module_bodies[name] = FunctionInfo(
            ident=body_ident,
            module=name,
            node=root,
            params=EMPTY_PARAMS,
            local_names=assigned,
            read_names=reads,
            is_module_body=True,
        )
        if root is None:
            return
        ns = module_namespace(name)
        for stmt in root.body:
            self._visit_stmt(stmt, ns, top_level=True, cls=None, func=None)

    def _site(self, node: ast.AST) -> ExprSite:
        self.counter += 1
        return ExprSite(self.module.name, node.lineno, node.col_offset, self.counter)

    # -- statements --------------------------------------------------------

    def _visit_stmt(
        self,
        stmt: ast.stmt,
        ns: Namespace,
        top_level: bool,
        cls: IdentifierType | None,
        func: IdentifierType | None,
    ) -> None:
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            self._record_function(stmt, ns, top_level, cls, func)
        elif isinstance(stmt, ast.ClassDef):
            self._record_class(stmt, ns, top_level, func)
        elif isinstance(stmt, ast.Import):
            self._record_import(stmt, func)
        elif isinstance(stmt, ast.ImportFrom):
            self._record_import_from(stmt, func)
        elif isinstance(stmt, (ast.Assign, ast.AnnAssign)) and top_level:
            targets = stmt.targets if isinstance(stmt, ast.Assign) else [stmt.target]
            names: set[str] = set()
            for target in targets:
                _assigned_names(target, names)
            self.facts.module_vars[self.module.name].update(names)
        else:
            # Defs nested under control flow are recorded unconditionally.
            for child in ast.iter_child_nodes(stmt):
                if isinstance(child, ast.stmt):
                    self._visit_stmt(child, ns, top_level, cls, func)
                elif isinstance(child, ast.excepthandler):
                    for sub in child.body:
                        self._visit_stmt(sub, ns, top_level, cls, func)
        self._scan_lambdas(stmt, ns, cls, func)

    def _record_function(
        self,
        node: ast.FunctionDef | ast.AsyncFunctionDef,
        ns: Namespace,
        top_level: bool,
        cls: IdentifierType | None,
        func: IdentifierType | None,
    ) -> None:
        ident = IdentifierType(Kind.FUNCTION, ns, node.name)
        assigned, globals_, reads = scope_names(node.body)
        params = _param_spec(node.args, node.decorator_list)
        assigned = assigned | frozenset(params.names)
        self.facts.functions[ident] = FunctionInfo(
            ident=ident,
            module=self.module.name,
            node=node,
            params=params,
            lexical_class=cls,
            enclosing_function=func,
            local_names=assigned,
            global_decls=globals_,
            read_names=reads,
        )
        if cls is not None:
            self.facts.incl.add((cls, ident))
            info = self.facts.classes.get(cls)
            if info is not None and node.name not in info.members:
                info.members[node.name] = ident
        if top_level:
            self.facts.module_level[self.module.name].setdefault(node.name, ident)
        inner_ns = ns + ((node.name, Kind.FUNCTION),)
        for stmt in node.body:
            self._visit_stmt(stmt, inner_ns, top_level=False, cls=None, func=ident)

    def _record_class(
        self,
        node: ast.ClassDef,
        ns: Namespace,
        top_level: bool,
        func: IdentifierType | None,
    ) -> None:
        ident = IdentifierType(Kind.CLASS, ns, node.name)
        self.facts.classes[ident] = ClassInfo(
            ident=ident,
            module=self.module.name,
            node=node,
            base_exprs=list(node.bases),
        )
        if top_level:
            self.facts.module_level[self.module.name].setdefault(node.name, ident)
        inner_ns = ns + ((node.name, Kind.CLASS),)
        for stmt in node.body:
            self._visit_stmt(stmt, inner_ns, top_level=False, cls=ident, func=func)

    def _record_import(self, node: ast.Import, func: IdentifierType | None) -> None:
        for alias in node.names:
            local = alias.asname or alias.name.split(".")[0]
            source = alias.name if alias.asname else alias.name.split(".")[0]
            self.facts.imports[self.module.name].append(
                ImportEntry(
                    module=self.module.name,
                    local_name=local,
                    source_module=source,
                    imported_name=None,
                    site=self._site(node),
                    scope=func,
                )
            )

    def _record_import_from(self, node: ast.ImportFrom, func: IdentifierType | None) -> None:
        source = _resolve_relative(self.module, node)
        if source is None:
            return
        for alias in node.names:
            local = alias.asname or alias.name
            self.facts.imports[self.module.name].append(
                ImportEntry(
                    module=self.module.name,
                    local_name=local,
                    source_module=source,
                    imported_name=alias.name,
                    site=self._site(node),
                    scope=func,
                )
            )

    def _scan_lambdas(
        self,
        stmt: ast.stmt,
        ns: Namespace,
        cls: IdentifierType | None,
        func: IdentifierType | None,
    ) -> None:
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            # Only decorators and defaults evaluate in this scope.
            roots: list[ast.AST] = list(stmt.decorator_list)
            roots += [d for d in stmt.args.defaults + stmt.args.kw_defaults if d]
        elif isinstance(stmt, ast.ClassDef):
            roots = list(stmt.decorator_list) + list(stmt.bases)
        else:
            roots = [stmt]
        for root in roots:
            self._register_lambdas(root, ns, func)

    def _register_lambdas(
        self, root: ast.AST, ns: Namespace, func: IdentifierType | None
    ) -> None:
        stack: list[ast.AST] = [root]
        while stack:
            node = stack.pop()
            if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
                continue  # nested scope registers its own lambdas
            if isinstance(node, ast.Lambda):
                if id(node) not in self.facts.lambda_infos:
                    name = f"<lambda>@{node.lineno}"
                    ident = IdentifierType(Kind.FUNCTION, ns, name)
                    params = _param_spec(node.args, [])
                    _, _, reads = scope_names(node.body)
                    info = FunctionInfo(
                        ident=ident,
                        module=self.module.name,
                        node=node,
                        params=params,
                        enclosing_function=func,
                        local_names=frozenset(params.names),
                        read_names=reads,
                    )
                    self.facts.functions[ident] = info
                    self.facts.lambda_infos[id(node)] = info
                    self._register_lambdas(
                        node.body, ns + ((name, Kind.FUNCTION),), ident
                    )
                continue
            stack.extend(ast.iter_child_nodes(node))


def _module_body_ident(name: str) -> IdentifierType:
    """The implicit callable standing for a module's top-level code."""
    mod = module_ident(name)
    return IdentifierType(Kind.FUNCTION, mod.namespace, mod.name)


def _resolve_relative(module: SourceModule, node: ast.ImportFrom) -> str | None:
    if node.level == 0:
        return node.module
    # Relative import: climb from the current package.
    parts = module.name.split(".")
    if module.path is not None and module.path.name == "__init__.py":
        package = parts
    else:
        package = parts[:-1]
    climb = node.level - 1
    if climb > len(package):
        return None
    base = package[: len(package) - climb]
    if node.module:
        base = base + node.module.split(".")
    return ".".join(base) if base else None


def collect_module(facts: ProgramFacts, module: SourceModule) -> None:
    """Record summary facts for one parsed module (idempotent)."""
    if module.name in facts.visited_modules:
        return
    facts.visited_modules.add(module.name)
    ModuleCollector(facts, module).collect()


# -- class hierarchy ---------------------------------------------------------


def mro_linearize(
    cls: IdentifierType,
    facts: ProgramFacts,
    warnings: list[str] | None = None,
) -> list[IdentifierType]:
    """Ancestor order for attribute search, starting at ``cls``.

    Uses C3 linearization; on an inconsistent hierarchy falls back to a
    left-to-right depth-first order with duplicates removed and records a
    warning.  A cyclic hierarchy is an analysis error.
    """
    _check_acyclic(cls, facts)
    try:
        return _c3(cls, facts, set())
    except _C3Inconsistent:
        if warnings is not None:
            warnings.append(f"inconsistent hierarchy for {cls.render()}; using depth-first order")
        order: list[IdentifierType] = []
        _dfs(cls, facts, order, set())
        return order


class _C3Inconsistent(Exception):
    pass


def _bases(cls: IdentifierType, facts: ProgramFacts) -> list[IdentifierType]:
    info = facts.classes.get(cls)
    return list(info.bases) if info is not None else []


def _check_acyclic(cls: IdentifierType, facts: ProgramFacts) -> None:
    seen: set[IdentifierType] = set()
    stack = [cls]
    path: set[IdentifierType] = set()

    def walk(node: IdentifierType) -> None:
        if node in path:
            raise AnalysisError(f"cyclic class hierarchy at {node.render()}")
        if node in seen:
            return
        seen.add(node)
        path.add(node)
        for base in _bases(node, facts):
            walk(base)
        path.discard(node)

    del stack
    walk(cls)


def _c3(cls: IdentifierType, facts: ProgramFacts, trail: set[IdentifierType]) -> list[IdentifierType]:
    if cls in trail:
        raise AnalysisError(f"cyclic class hierarchy at {cls.render()}")
    bases = _bases(cls, facts)
    if not bases:
        return [cls]
    trail = trail | {cls}
    sequences = [_c3(base, facts, trail) for base in bases]
    sequences.append(list(bases))
    return [cls] + _merge(sequences)


def _merge(sequences: list[list[IdentifierType]]) -> list[IdentifierType]:
    result: list[IdentifierType] = []
    seqs = [list(s) for s in sequences]
    while True:
        seqs = [s for s in seqs if s]
        if not seqs:
            return result
        for seq in seqs:
            head = seq[0]
            if not any(head in s[1:] for s in seqs):
                break
        else:
            raise _C3Inconsistent()
        result.append(head)
        for seq in seqs:
            if seq and seq[0] == head:
                del seq[0]


def _dfs(
    cls: IdentifierType,
    facts: ProgramFacts,
    order: list[IdentifierType],
    seen: set[IdentifierType],
) -> None:
    if cls in seen:
        return
    seen.add(cls)
    order.append(cls)
    for base in _bases(cls, facts):
        _dfs(base, facts, order, seen)


def lookup_member(
    cls: IdentifierType,
    name: str,
    facts: ProgramFacts,
) -> IdentifierType | None:
    """First member function named ``name`` along the ancestor order."""
    try:
        order = mro_linearize(cls, facts)
    except AnalysisError:
        return None
    for ancestor in order:
        info = facts.classes.get(ancestor)
        if info is not None and name in info.members:
            return info.members[name]
    return None


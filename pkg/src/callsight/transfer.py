"""Transfer rules: evaluating one statement against the current type graph.

Each statement-level expression is dispatched by syntactic form (import,
assign, attribute store/load, object construction, call, return, context
manager entry/exit) and yields the set of new type relations labeled with
that statement's site.  Call forms hand off to the inter-procedural layer
through the engine and fold the callee's effects back into the delta.
"""

from __future__ import annotations

import ast
import builtins as py_builtins
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .builtins_table import LITERAL_CLASSES
from .cfg import ROLE_EXCEPT, ROLE_WITH_EXIT, CfgNode
from .identifiers import IdentifierType, Kind, builtin_class, builtin_func
from .sources import ExprSite
from .summaries import FunctionInfo, ParamSpec, module_namespace
from .typegraph import FunctionTypeGraph, TypeRelation, latest, points_of

if TYPE_CHECKING:  # pragma: no cover
    from .engine import Analysis

# Sentinels used in call bindings.
RECEIVER = object()
OPAQUE = object()

# Decorators that modify binding rather than wrap the callable.
BINDING_DECORATORS = {"staticmethod", "classmethod", "property", "abstractmethod"}

_AUG_METHODS = {
    ast.Add: "__iadd__",
    ast.Sub: "__isub__",
    ast.Mult: "__imul__",
    ast.Div: "__itruediv__",
    ast.FloorDiv: "__ifloordiv__",
    ast.Mod: "__imod__",
    ast.Pow: "__ipow__",
    ast.BitAnd: "__iand__",
    ast.BitOr: "__ior__",
    ast.BitXor: "__ixor__",
    ast.LShift: "__ilshift__",
    ast.RShift: "__irshift__",
}


@dataclass(frozen=True, slots=True)
class SuperHandle:
    """Receiver produced by a zero-argument ``super()`` call."""

    cls: IdentifierType
    receiver: IdentifierType


Handle = IdentifierType | SuperHandle


def handle_key(handle: Handle):
    if isinstance(handle, SuperHandle):
        return (1, handle.cls.render(), "")
    return (0, handle.render(), handle.kind.value)


def dedup_handles(handles: list[Handle]) -> list[Handle]:
    return sorted(set(handles), key=handle_key)


@dataclass
class Delta:
    """Evaluation result of one expression."""

    relations: set[TypeRelation] = field(default_factory=set)
    resolved_calls: set[tuple[ExprSite, IdentifierType]] = field(default_factory=set)


@dataclass
class Binding:
    """Parameter-to-argument mapping for one call."""

    by_param: dict[str, object] = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)


def kwargs_bind(params: ParamSpec, call: ast.Call, has_receiver: bool) -> Binding:
    """Map parameter names to argument expressions.

    Positionals fill left to right, keywords match by name, star arguments
    absorb the remainder as opaque.  Arity mismatches are reported but never
    abort the call.
    """
    binding = Binding()
    slots = list(params.positional)
    if has_receiver and not params.skip_receiver and slots:
        binding.by_param[slots[0]] = RECEIVER
        slots = slots[1:]
    idx = 0
    star_seen = False
    for arg in call.args:
        if isinstance(arg, ast.Starred):
            star_seen = True
            continue
        if star_seen:
            continue
        if idx < len(slots):
            binding.by_param[slots[idx]] = arg
            idx += 1
        elif params.vararg:
            binding.by_param.setdefault(params.vararg, OPAQUE)
        else:
            binding.errors.append("too many positional arguments")
            break
    if star_seen:
        for name in slots[idx:]:
            binding.by_param.setdefault(name, OPAQUE)
        if params.vararg:
            binding.by_param.setdefault(params.vararg, OPAQUE)
    double_star = False
    for kw in call.keywords:
        if kw.arg is None:
            double_star = True
            continue
        if kw.arg in params.names:
            if kw.arg in binding.by_param:
                binding.errors.append(f"multiple values for {kw.arg!r}")
            else:
                binding.by_param[kw.arg] = kw.value
        elif params.kwarg:
            binding.by_param.setdefault(params.kwarg, OPAQUE)
        else:
            binding.errors.append(f"unexpected keyword {kw.arg!r}")
    if double_star:
        for name in slots + list(params.kwonly):
            binding.by_param.setdefault(name, OPAQUE)
    if not star_seen and not double_star:
        for name in list(slots[idx:]) + list(params.kwonly):
            if name not in binding.by_param and name not in params.with_default:
                binding.errors.append(f"missing argument {name!r}")
    return binding


@dataclass
class EvalContext:
    """Everything one statement evaluation needs."""

    engine: "Analysis"
    info: FunctionInfo
    g: FunctionTypeGraph
    site: ExprSite
    delta: Delta
    run_state: dict
    cfg: object | None = None

    def local_ident(self, name: str) -> IdentifierType:
        if self.info.is_module_body:
            return IdentifierType(Kind.VARIABLE, module_namespace(self.info.module), name)
        info = self.info
        ns = info.ident.namespace + ((info.ident.name, Kind.FUNCTION),)
        return IdentifierType(Kind.VARIABLE, ns, name)

    def relate(self, src: IdentifierType, dst: IdentifierType) -> None:
        self.delta.relations.add(TypeRelation(src, dst, self.site))

    def pointees(self, handle: IdentifierType) -> list[IdentifierType]:
        """Resolved types of a handle, honoring flow order at this site.

        The first hop is filtered to the flow-latest relations so that a
        class attribute rebound earlier on the same path resolves to its
        newest binding only.
        """
        if handle.kind is not Kind.VARIABLE:
            return [handle]
        rels = self.g.outgoing(handle)
        if self.cfg is not None and len(rels) > 1:
            rels = latest(rels, self.cfg, self.site)
        out: set[IdentifierType] = set()
        for rel in rels:
            if rel.dst.kind is Kind.VARIABLE:
                out.update(points_of(self.g, rel.dst))
            else:
                out.add(rel.dst)
        return sorted(out, key=IdentifierType.sort_key)

    def diagnose(self, category: str, message: str) -> None:
        self.engine.diagnose(category, self.site, message)


def module_var(module: str, name: str) -> IdentifierType:
    return IdentifierType(Kind.VARIABLE, module_namespace(module), name)


def scoped_var(info: FunctionInfo, name: str) -> IdentifierType:
    if info.is_module_body:
        return module_var(info.module, name)
    ns = info.ident.namespace + ((info.ident.name, Kind.FUNCTION),)
    return IdentifierType(Kind.VARIABLE, ns, name)


# -- name resolution ----------------------------------------------------------


def resolve_name_read(ctx: EvalContext, name: str) -> list[Handle]:
    info = ctx.info
    engine = ctx.engine
    if not info.is_module_body and name in info.local_names and name not in info.global_decls:
        return [ctx.local_ident(name)]
    enclosing = info.enclosing_function
    while enclosing is not None:
        enc_info = engine.facts.functions.get(enclosing)
        if enc_info is None:
            break
        if name in enc_info.local_names:
            return [scoped_var(enc_info, name)]
        enclosing = enc_info.enclosing_function
    module = info.module
    top = engine.facts.module_level.get(module, {}).get(name)
    var = module_var(module, name)
    if top is not None:
        # Prefer the flow binding when the name has been (re)bound, e.g. by
        # a decorator; fall back to the definition itself otherwise.
        return [var] if ctx.pointees(var) else [top]
    if name in engine.facts.module_vars.get(module, set()):
        return [var]
    for entry in engine.facts.imports.get(module, ()):
        if entry.local_name == name:
            return [module_var(module, name)]
    if name in LITERAL_CLASSES:
        return [builtin_class(name)]
    stub = engine.builtins.function_stub(name)
    if stub is not None:
        return [stub]
    if hasattr(py_builtins, name):
        if name[:1].isupper():
            return [builtin_class(name)]
        return []
    return [module_var(module, name)]


def attr_handles(ctx: EvalContext, base: Handle, attr: str) -> list[Handle]:
    """Value handles for ``base.attr``."""
    engine = ctx.engine
    if isinstance(base, SuperHandle):
        member = engine.super_lookup(base.cls, attr)
        return [member] if member is not None else []
    if base.kind in (Kind.MODULE, Kind.EXT_MODULE):
        resolved = engine.resolve_module_attr(base, attr)
        return [resolved] if resolved is not None else []
    if base.kind is Kind.CLASS:
        member = engine.lookup_member(base, attr)
        if member is not None:
            return [member]
        return [base.derive(attr)]
    if base.kind is Kind.VARIABLE:
        out: list[Handle] = []
        for pointee in ctx.pointees(base):
            out.extend(attr_handles(ctx, pointee, attr))
        return dedup_handles(out)
    return [base.derive(attr)]


# -- expression evaluation -----------------------------------------------------


def eval_expr(ctx: EvalContext, node: ast.expr | None) -> list[Handle]:
    """Value handles for an expression, recording call edges on the way."""
    if node is None:
        return []
    if isinstance(node, ast.Name):
        return resolve_name_read(ctx, node.id)
    if isinstance(node, ast.Attribute):
        bases = eval_expr(ctx, node.value)
        out: list[Handle] = []
        for base in bases:
            out.extend(attr_handles(ctx, base, node.attr))
        return dedup_handles(out)
    if isinstance(node, ast.Call):
        return ctx.engine.eval_call(ctx, node)
    if isinstance(node, ast.Constant):
        kind = type(node.value).__name__
        if kind not in LITERAL_CLASSES:
            kind = "object"
        return [builtin_class(kind)]
    if isinstance(node, ast.JoinedStr):
        for value in node.values:
            if isinstance(value, ast.FormattedValue):
                eval_expr(ctx, value.value)
        return [builtin_class("str")]
    if isinstance(node, (ast.List, ast.Set, ast.Tuple)):
        for elt in node.elts:
            eval_expr(ctx, elt)
        name = {ast.List: "list", ast.Set: "set", ast.Tuple: "tuple"}[type(node)]
        return [builtin_class(name)]
    if isinstance(node, ast.Dict):
        for key in node.keys:
            eval_expr(ctx, key)
        for value in node.values:
            eval_expr(ctx, value)
        return [builtin_class("dict")]
    if isinstance(node, ast.Lambda):
        info = ctx.engine.facts.lambda_infos.get(id(node))
        if info is None:
            return []
        ctx.engine.capture_closure(ctx, info)
        return [info.ident]
    if isinstance(node, ast.IfExp):
        eval_expr(ctx, node.test)
        return dedup_handles(eval_expr(ctx, node.body) + eval_expr(ctx, node.orelse))
    if isinstance(node, ast.BoolOp):
        out: list[Handle] = []
        for value in node.values:
            out.extend(eval_expr(ctx, value))
        return dedup_handles(out)
    if isinstance(node, ast.NamedExpr):
        values = eval_expr(ctx, node.value)
        _bind_target(ctx, node.target, values)
        return values
    if isinstance(node, ast.Await):
        return eval_expr(ctx, node.value)
    if isinstance(node, ast.Starred):
        return eval_expr(ctx, node.value)
    if isinstance(node, (ast.Yield, ast.YieldFrom)):
        inner = eval_expr(ctx, node.value) if node.value is not None else []
        ret = ctx.info.ident.ret()
        for value in _type_handles(ctx, inner):
            ctx.relate(ret, value)
        return []
    if isinstance(node, ast.Compare):
        eval_expr(ctx, node.left)
        for comp in node.comparators:
            eval_expr(ctx, comp)
        return [builtin_class("bool")]
    if isinstance(node, ast.UnaryOp):
        eval_expr(ctx, node.operand)
        return [builtin_class("bool")] if isinstance(node.op, ast.Not) else []
    if isinstance(node, ast.BinOp):
        eval_expr(ctx, node.left)
        eval_expr(ctx, node.right)
        return []
    if isinstance(node, ast.Subscript):
        eval_expr(ctx, node.value)
        eval_expr(ctx, node.slice)
        return []
    if isinstance(node, (ast.ListComp, ast.SetComp, ast.GeneratorExp)):
        _eval_comprehension(ctx, node.generators)
        eval_expr(ctx, node.elt)
        name = "list" if isinstance(node, ast.ListComp) else (
            "set" if isinstance(node, ast.SetComp) else "object"
        )
        return [builtin_class(name)]
    if isinstance(node, ast.DictComp):
        _eval_comprehension(ctx, node.generators)
        eval_expr(ctx, node.key)
        eval_expr(ctx, node.value)
        return [builtin_class("dict")]
    if isinstance(node, ast.Slice):
        for part in (node.lower, node.upper, node.step):
            if part is not None:
                eval_expr(ctx, part)
        return []
    return []


def _eval_comprehension(ctx: EvalContext, generators: list[ast.comprehension]) -> None:
    for gen in generators:
        handles = eval_expr(ctx, gen.iter)
        _bind_iteration_target(ctx, gen.target, handles)
        for cond in gen.ifs:
            eval_expr(ctx, cond)


def _type_handles(ctx: EvalContext, handles: list[Handle]) -> list[IdentifierType]:
    """Drop receiver proxies; keep identifier handles only."""
    return [h for h in handles if isinstance(h, IdentifierType)]


def _bind_target(ctx: EvalContext, target: ast.expr, values: list[Handle]) -> None:
    """Assignment of evaluated values to one target expression."""
    idents = _type_handles(ctx, values)
    if isinstance(target, ast.Name):
        dst = _name_store_ident(ctx, target.id)
        for value in idents:
            ctx.relate(dst, value)
        return
    if isinstance(target, ast.Attribute):
        bases = eval_expr(ctx, target.value)
        pointees: list[IdentifierType] = []
        for base in _type_handles(ctx, bases):
            pointees.extend(ctx.pointees(base))
        if not pointees:
            ctx.diagnose("unresolved-store", f"cannot resolve receiver of .{target.attr} store")
        for pointee in sorted(set(pointees), key=IdentifierType.sort_key):
            if pointee.kind is Kind.FUNCTION:
                continue
            field_path = pointee.derive(target.attr)
            for value in idents:
                ctx.relate(field_path, value)
        return
    if isinstance(target, (ast.Tuple, ast.List)):
        return  # handled by the assign rule for literal-to-literal unpacking
    if isinstance(target, ast.Subscript):
        eval_expr(ctx, target.value)
        eval_expr(ctx, target.slice)
        return
    if isinstance(target, ast.Starred):
        _bind_target(ctx, target.value, values)


def _name_store_ident(ctx: EvalContext, name: str) -> IdentifierType:
    if not ctx.info.is_module_body and name in ctx.info.global_decls:
        return module_var(ctx.info.module, name)
    return ctx.local_ident(name)


def _bind_iteration_target(ctx: EvalContext, target: ast.expr, iter_handles: list[Handle]) -> None:
    """Bind a loop target to the element view of its iterable.

    Only callables with a known result type contribute; container element
    types are not tracked.
    """
    if not isinstance(target, ast.Name):
        return
    dst = _name_store_ident(ctx, target.id)
    for handle in _type_handles(ctx, iter_handles):
        if handle.kind is Kind.VARIABLE and handle.is_ret:
            ctx.relate(dst, handle)
        elif handle.kind is Kind.VARIABLE:
            for pointee in ctx.pointees(handle):
                if pointee.kind is Kind.FUNCTION:
                    ctx.relate(dst, pointee.ret())


# -- statement rules -----------------------------------------------------------


def apply_transfer_rule(
    engine: "Analysis",
    info: FunctionInfo,
    cfg_node: CfgNode,
    g: FunctionTypeGraph,
    run_state: dict,
    cfg=None,
) -> Delta:
    """Evaluate one statement-level expression and return its delta."""
    engine.counters["rule_applications"] += 1
    site = cfg_node.site
    ctx = EvalContext(engine=engine, info=info, g=g, site=site, delta=Delta(),
                      run_state=run_state, cfg=cfg)
    node = cfg_node.node
    if cfg_node.role == ROLE_EXCEPT:
        _rule_except(ctx, node)
    elif cfg_node.role == ROLE_WITH_EXIT:
        _rule_with_exit(ctx, node)
    else:
        _rule_stmt(ctx, node)
    return ctx.delta


def _rule_stmt(ctx: EvalContext, node: ast.AST) -> None:
    if isinstance(node, ast.Expr):
        eval_expr(ctx, node.value)
    elif isinstance(node, ast.Assign):
        values = eval_expr(ctx, node.value)
        for target in node.targets:
            if isinstance(target, (ast.Tuple, ast.List)):
                _assign_unpack(ctx, target, node.value, values)
            else:
                _bind_target(ctx, target, values)
    elif isinstance(node, ast.AnnAssign):
        if node.value is not None:
            values = eval_expr(ctx, node.value)
            _bind_target(ctx, node.target, values)
    elif isinstance(node, ast.AugAssign):
        eval_expr(ctx, node.value)
        _rule_aug(ctx, node)
    elif isinstance(node, ast.Return):
        if node.value is not None:
            values = eval_expr(ctx, node.value)
            ret = ctx.info.ident.ret()
            for value in _type_handles(ctx, values):
                ctx.relate(ret, value)
    elif isinstance(node, (ast.Import, ast.ImportFrom)):
        _rule_import(ctx, node)
    elif isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
        _rule_def(ctx, node)
    elif isinstance(node, ast.ClassDef):
        _rule_classdef(ctx, node)
    elif isinstance(node, ast.Raise):
        if node.exc is not None:
            eval_expr(ctx, node.exc)
        if node.cause is not None:
            eval_expr(ctx, node.cause)
    elif isinstance(node, ast.Assert):
        eval_expr(ctx, node.test)
        if node.msg is not None:
            eval_expr(ctx, node.msg)
    elif isinstance(node, ast.If):
        eval_expr(ctx, node.test)
    elif isinstance(node, ast.While):
        eval_expr(ctx, node.test)
    elif isinstance(node, (ast.For, ast.AsyncFor)):
        handles = eval_expr(ctx, node.iter)
        _bind_iteration_target(ctx, node.target, handles)
    elif isinstance(node, (ast.With, ast.AsyncWith)):
        _rule_with_enter(ctx, node)
    elif isinstance(node, ast.Match):
        eval_expr(ctx, node.subject)
    elif isinstance(node, ast.Delete):
        for target in node.targets:
            if isinstance(target, (ast.Attribute, ast.Subscript)):
                eval_expr(ctx, target.value)
    # Pass, Global, Nonlocal, Break, Continue need no rule.


def _assign_unpack(
    ctx: EvalContext,
    target: ast.Tuple | ast.List,
    value: ast.expr,
    values: list[Handle],
) -> None:
    """Pairwise unpacking for literal tuple/list right-hand sides."""
    if isinstance(value, (ast.Tuple, ast.List)) and len(value.elts) == len(target.elts):
        if not any(isinstance(e, ast.Starred) for e in target.elts):
            for tgt, val in zip(target.elts, value.elts):
                _bind_target(ctx, tgt, eval_expr(ctx, val))
            return
    # Opaque unpacking: element types of containers are not tracked.
    for tgt in target.elts:
        if not isinstance(tgt, ast.Name):
            _bind_target(ctx, tgt, [])


def _rule_aug(ctx: EvalContext, node: ast.AugAssign) -> None:
    method = _AUG_METHODS.get(type(node.op))
    if method is None or not isinstance(node.target, ast.Name):
        return
    for handle in resolve_name_read(ctx, node.target.id):
        if isinstance(handle, SuperHandle):
            continue
        for pointee in ctx.pointees(handle):
            if pointee.kind is Kind.CLASS:
                member = ctx.engine.lookup_member(pointee, method)
                if member is not None:
                    ctx.engine.record_call(ctx, member)


def _rule_import(ctx: EvalContext, node: ast.Import | ast.ImportFrom) -> None:
    for local, target in ctx.engine.import_bindings(ctx.info.module, node):
        src = _name_store_ident(ctx, local)
        ctx.relate(src, target)


def _rule_def(ctx: EvalContext, node: ast.FunctionDef | ast.AsyncFunctionDef) -> None:
    func = IdentifierType(
        Kind.FUNCTION,
        _scope_namespace(ctx.info),
        node.name,
    )
    info = ctx.engine.facts.functions.get(func)
    handles: list[Handle] = [func]
    if info is not None:
        ctx.engine.capture_closure(ctx, info)
    for default in list(node.args.defaults) + [d for d in node.args.kw_defaults if d]:
        eval_expr(ctx, default)
    handles = _apply_decorators(ctx, node.decorator_list, handles)
    dst = _name_store_ident(ctx, node.name)
    for value in _type_handles(ctx, handles):
        ctx.relate(dst, value)


def _apply_decorators(
    ctx: EvalContext, decorators: list[ast.expr], handles: list[Handle]
) -> list[Handle]:
    for deco in reversed(decorators):
        if isinstance(deco, ast.Name) and deco.id in BINDING_DECORATORS:
            continue
        targets = eval_expr(ctx, deco)
        if not targets:
            continue
        result = ctx.engine.invoke_handles(
            ctx, targets, [tuple(_decorated_types(ctx, handles))]
        )
        if result:
            handles = result
    return handles


def _decorated_types(ctx: EvalContext, handles: list[Handle]) -> list[IdentifierType]:
    out: list[IdentifierType] = []
    for handle in _type_handles(ctx, handles):
        out.extend(ctx.pointees(handle))
    return sorted(set(out), key=IdentifierType.sort_key)


def _scope_namespace(info: FunctionInfo):
    if info.is_module_body:
        return module_namespace(info.module)
    return info.ident.namespace + ((info.ident.name, Kind.FUNCTION),)


def _rule_classdef(ctx: EvalContext, node: ast.ClassDef) -> None:
    cls = IdentifierType(Kind.CLASS, _scope_namespace(ctx.info), node.name)
    _eval_class_body(ctx, cls, node)
    dst = _name_store_ident(ctx, node.name)
    ctx.relate(dst, cls)


def _eval_class_body(ctx: EvalContext, cls: IdentifierType, node: ast.ClassDef) -> None:
    """Class-body effects: attribute seeds and decorator calls."""
    for deco in node.decorator_list:
        targets = eval_expr(ctx, deco)
        if targets:
            ctx.engine.invoke_handles(ctx, targets, [(cls,)])
    for stmt in node.body:
        if isinstance(stmt, ast.Assign):
            values = eval_expr(ctx, stmt.value)
            for target in stmt.targets:
                if isinstance(target, ast.Name):
                    path = cls.derive(target.id)
                    for value in _type_handles(ctx, values):
                        ctx.relate(path, value)
        elif isinstance(stmt, ast.AnnAssign) and stmt.value is not None:
            values = eval_expr(ctx, stmt.value)
            if isinstance(stmt.target, ast.Name):
                path = cls.derive(stmt.target.id)
                for value in _type_handles(ctx, values):
                    ctx.relate(path, value)
        elif isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            member = IdentifierType(
                Kind.FUNCTION, cls.namespace + ((cls.name, Kind.CLASS),), stmt.name
            )
            _apply_decorators(ctx, stmt.decorator_list, [member])
        elif isinstance(stmt, ast.ClassDef):
            inner = IdentifierType(
                Kind.CLASS, cls.namespace + ((cls.name, Kind.CLASS),), stmt.name
            )
            _eval_class_body(ctx, inner, stmt)


def _rule_except(ctx: EvalContext, node: ast.AST) -> None:
    assert isinstance(node, ast.ExceptHandler)
    handles = eval_expr(ctx, node.type) if node.type is not None else []
    if node.name:
        dst = _name_store_ident(ctx, node.name)
        for handle in _decorated_types(ctx, handles):
            ctx.relate(dst, handle)


def _manager_classes(ctx: EvalContext, handles: list[Handle]) -> list[IdentifierType]:
    classes: list[IdentifierType] = []
    for handle in _type_handles(ctx, handles):
        classes.extend(p for p in ctx.pointees(handle) if p.kind is Kind.CLASS)
    return sorted(set(classes), key=IdentifierType.sort_key)


def _rule_with_enter(ctx: EvalContext, node: ast.With | ast.AsyncWith) -> None:
    is_async = isinstance(node, ast.AsyncWith)
    enter_name = "__aenter__" if is_async else "__enter__"
    managers: list[list[IdentifierType]] = []
    for item in node.items:
        handles = eval_expr(ctx, item.context_expr)
        classes = _manager_classes(ctx, handles)
        managers.append(classes)
        results: list[Handle] = []
        resolved = False
        for cls in classes:
            member = ctx.engine.lookup_member(cls, enter_name)
            if member is not None:
                resolved = True
                results.extend(ctx.engine.invoke_method(ctx, member, (cls,)))
        if not resolved:
            stub = builtin_func(enter_name)
            ctx.engine.record_call(ctx, stub)
            results.append(stub.ret())
        if item.optional_vars is not None:
            _bind_target(ctx, item.optional_vars, results)
    ctx.run_state[id(node)] = managers


def _rule_with_exit(ctx: EvalContext, node: ast.With | ast.AsyncWith) -> None:
    is_async = isinstance(node, ast.AsyncWith)
    exit_name = "__aexit__" if is_async else "__exit__"
    managers = ctx.run_state.get(id(node), [[] for _ in node.items])
    for classes in managers:
        resolved = False
        for cls in classes:
            member = ctx.engine.lookup_member(cls, exit_name)
            if member is not None:
                resolved = True
                ctx.engine.invoke_method(ctx, member, (cls,))
        if not resolved:
            ctx.engine.record_call(ctx, builtin_func(exit_name))

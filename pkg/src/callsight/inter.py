"""Inter-procedural analysis: resolve a call, descend, fold effects back.

Resolution follows the receiver's pointed-to types through the class
hierarchy, then module members, then import bindings, then builtin stubs.
Every resolved callee contributes a call edge; analyzable callees are
descended into with the argument slice of the caller's graph, and the
difference between their input and output graphs comes back as the call's
delta, rewritten into caller identifiers.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .identifiers import IdentifierType, Kind
from .intra import Theta
from .summaries import FunctionInfo
from .transfer import (
    OPAQUE,
    RECEIVER,
    Binding,
    EvalContext,
    Handle,
    SuperHandle,
    dedup_handles,
    eval_expr,
    kwargs_bind,
    scoped_var,
)
from .typegraph import FunctionTypeGraph, TypeRelation, points_of, relation_closure

if TYPE_CHECKING:  # pragma: no cover
    from .engine import Analysis


@dataclass
class ResolvedTarget:
    """One candidate callee with receiver information."""

    callee: IdentifierType
    receiver_types: tuple[IdentifierType, ...] = ()
    is_constructor: bool = False
    construct_class: IdentifierType | None = None


@dataclass
class CallArguments:
    """Evaluated arguments: either from syntax or direct type tuples."""

    call: ast.Call | None = None
    handle_map: dict[int, list[Handle]] = field(default_factory=dict)
    direct_positional: tuple[tuple[IdentifierType, ...], ...] = ()


def eval_call(ctx: EvalContext, node: ast.Call) -> list[Handle]:
    """Evaluate a call expression: resolve, descend, return value handles."""
    func = node.func

    if isinstance(func, ast.Name) and func.id == "super" and not node.args:
        cls = ctx.info.lexical_class
        if cls is not None and ctx.info.params.positional:
            receiver = scoped_var(ctx.info, ctx.info.params.positional[0])
            return [SuperHandle(cls, receiver)]
        return []

    if isinstance(func, ast.Attribute):
        receiver_handles = eval_expr(ctx, func.value)
        targets = resolve_method_targets(ctx, receiver_handles, func.attr)
        label = func.attr
    else:
        callee_handles = eval_expr(ctx, func)
        targets = resolve_plain_targets(ctx, callee_handles)
        label = getattr(func, "id", type(func).__name__)

    args = CallArguments(call=node)
    for arg in node.args:
        inner = arg.value if isinstance(arg, ast.Starred) else arg
        args.handle_map[id(inner)] = eval_expr(ctx, inner)
    for kw in node.keywords:
        args.handle_map[id(kw.value)] = eval_expr(ctx, kw.value)

    if not targets:
        ctx.diagnose("unresolved-call", f"cannot resolve call to {label!r}")
        return []

    results: list[Handle] = []
    for target in sorted(targets, key=lambda t: t.callee.render()):
        results.extend(call_target(ctx, target, args))
    return dedup_handles(results)


def _target_map_add(
    targets: dict[IdentifierType, ResolvedTarget], target: ResolvedTarget
) -> None:
    existing = targets.get(target.callee)
    if existing is None:
        targets[target.callee] = target
    else:
        merged = tuple(
            sorted(
                set(existing.receiver_types) | set(target.receiver_types),
                key=IdentifierType.sort_key,
            )
        )
        existing.receiver_types = merged


def resolve_method_targets(
    ctx: EvalContext, receiver_handles: list[Handle], name: str
) -> list[ResolvedTarget]:
    """Callees for an ``obj.name(...)`` form."""
    engine = ctx.engine
    targets: dict[IdentifierType, ResolvedTarget] = {}
    for handle in receiver_handles:
        if isinstance(handle, SuperHandle):
            member = engine.super_lookup(handle.cls, name)
            if member is not None:
                recv = tuple(ctx.pointees(handle.receiver)) or (handle.cls,)
                _target_map_add(targets, ResolvedTarget(member, recv))
            continue
        for pointee in ctx.pointees(handle):
            _resolve_on_pointee(ctx, targets, pointee, name)
    return list(targets.values())


def _resolve_on_pointee(
    ctx: EvalContext,
    targets: dict[IdentifierType, ResolvedTarget],
    pointee: IdentifierType,
    name: str,
) -> None:
    engine = ctx.engine
    if pointee.kind is Kind.CLASS:
        if pointee.namespace and pointee.namespace[0][0] == "builtins":
            stub = engine.builtins.method_stub(pointee.name, name)
            if stub is not None:
                _target_map_add(targets, ResolvedTarget(stub, (pointee,)))
            return
        member = engine.lookup_member(pointee, name)
        if member is not None:
            _target_map_add(targets, ResolvedTarget(member, (pointee,)))
            return
        # A callable stored on the class or instance.
        path = pointee.derive(name)
        for stored in ctx.pointees(path):
            if stored.kind is Kind.FUNCTION:
                _target_map_add(targets, ResolvedTarget(stored))
            elif stored.kind is Kind.CLASS:
                _target_map_add(
                    targets,
                    _constructor_target(ctx, stored),
                )
        return
    if pointee.kind in (Kind.MODULE, Kind.EXT_MODULE):
        resolved = engine.resolve_module_attr(pointee, name)
        if resolved is None:
            return
        if resolved.kind is Kind.FUNCTION:
            _target_map_add(targets, ResolvedTarget(resolved))
        elif resolved.kind is Kind.CLASS:
            _target_map_add(targets, _constructor_target(ctx, resolved))
        elif resolved.kind is Kind.EXT_MODULE:
            stub = IdentifierType(Kind.FUNCTION, resolved.namespace, resolved.name)
            _target_map_add(targets, ResolvedTarget(stub))
        elif resolved.kind is Kind.VARIABLE:
            for stored in ctx.pointees(resolved):
                if stored.kind is Kind.FUNCTION:
                    _target_map_add(targets, ResolvedTarget(stored))
                elif stored.kind is Kind.CLASS:
                    _target_map_add(targets, _constructor_target(ctx, stored))
        return
    if pointee.kind is Kind.FUNCTION:
        return


def _constructor_target(ctx: EvalContext, cls: IdentifierType) -> ResolvedTarget:
    init = ctx.engine.lookup_member(cls, "__init__")
    return ResolvedTarget(
        callee=init if init is not None else cls,
        receiver_types=(cls,),
        is_constructor=True,
        construct_class=cls,
    )


def resolve_plain_targets(
    ctx: EvalContext, callee_handles: list[Handle]
) -> list[ResolvedTarget]:
    """Callees for a bare ``name(...)`` form (or any non-attribute callee)."""
    targets: dict[IdentifierType, ResolvedTarget] = {}
    for handle in callee_handles:
        if isinstance(handle, SuperHandle):
            continue
        _plain_target_for(ctx, targets, handle)
    return list(targets.values())


def _plain_target_for(
    ctx: EvalContext,
    targets: dict[IdentifierType, ResolvedTarget],
    handle: IdentifierType,
) -> None:
    if handle.kind is Kind.FUNCTION:
        owner = handle.owner_class()
        recv = (owner,) if owner is not None else ()
        _target_map_add(targets, ResolvedTarget(handle, recv))
        return
    if handle.kind is Kind.CLASS:
        _target_map_add(targets, _constructor_target(ctx, handle))
        return
    if handle.kind is Kind.EXT_MODULE:
        stub = IdentifierType(Kind.FUNCTION, handle.namespace, handle.name)
        _target_map_add(targets, ResolvedTarget(stub))
        return
    if handle.kind is Kind.VARIABLE:
        for pointee in ctx.pointees(handle):
            _plain_target_for(ctx, targets, pointee)


def call_target(
    ctx: EvalContext, target: ResolvedTarget, args: CallArguments
) -> list[Handle]:
    """Record the edge, descend if analyzable, and bind the result."""
    engine = ctx.engine
    callee = target.callee

    if target.is_constructor and callee.kind is Kind.CLASS:
        # No reachable __init__: construction yields the class, no edge.
        return [target.construct_class] if target.construct_class else []

    engine.record_call(ctx, callee)

    info = engine.function_info(callee)
    if info is None or not engine.descendable(info):
        ret = callee.ret()
        if target.is_constructor and target.construct_class is not None:
            return [target.construct_class]
        return [ret]

    binding = _bind_arguments(info, args, bool(target.receiver_types))
    for error in binding.errors:
        ctx.diagnose("arity", f"{callee.render()}: {error}")
    theta = compute_theta(ctx, binding, args, target.receiver_types)
    ftg_in, ftg_out = engine.intra_analysis(callee, theta)
    delta_rels = compute_delta(ctx, info, ftg_in, ftg_out, binding, args)
    ctx.delta.relations.update(delta_rels)

    if target.is_constructor and target.construct_class is not None:
        return [target.construct_class]
    ret = callee.ret()
    results: list[Handle] = [ret]
    results.extend(points_of(ftg_out, ret))
    return dedup_handles(results)


def _bind_arguments(info: FunctionInfo, args: CallArguments, has_receiver: bool) -> Binding:
    if args.call is not None:
        return kwargs_bind(info.params, args.call, has_receiver)
    binding = Binding()
    slots = list(info.params.positional)
    if has_receiver and not info.params.skip_receiver and slots:
        binding.by_param[slots[0]] = RECEIVER
        slots = slots[1:]
    for name, types in zip(slots, args.direct_positional):
        binding.by_param[name] = types
    return binding


def compute_theta(
    ctx: EvalContext,
    binding: Binding,
    args: CallArguments,
    receiver_types: tuple[IdentifierType, ...],
) -> Theta:
    """Select the argument slice of the caller's graph for the callee."""
    param_types: list[tuple[str, tuple[IdentifierType, ...]]] = []
    roots: list[IdentifierType] = list(receiver_types)
    for name in sorted(binding.by_param):
        value = binding.by_param[name]
        types: list[IdentifierType] = []
        if value is RECEIVER:
            types = list(receiver_types)
        elif value is OPAQUE:
            types = []
        elif isinstance(value, tuple):
            types = [t for t in value if isinstance(t, IdentifierType)]
        elif isinstance(value, ast.expr):
            handles = args.handle_map.get(id(value))
            if handles is None:
                handles = eval_expr(ctx, value)
                args.handle_map[id(value)] = handles
            for handle in handles:
                if isinstance(handle, SuperHandle):
                    continue
                types.extend(ctx.pointees(handle))
        types = sorted(set(types), key=IdentifierType.sort_key)
        roots.extend(types)
        if types:
            param_types.append((name, tuple(types)))
    extra = relation_closure(ctx.g, roots)
    extra.update(_global_slice(ctx))
    return Theta(
        param_types=tuple(param_types),
        extra_relations=frozenset(extra),
        bound_params=tuple(sorted(binding.by_param)),
    )


_GLOBAL_PARENTS = (Kind.MODULE, Kind.CLASS, Kind.EXT_MODULE)


def _global_slice(ctx: EvalContext) -> set[TypeRelation]:
    """Live global state a callee could not otherwise see.

    A callee's initial graph is normally seeded from its module's settled
    globals.  While a module body is still being walked those globals do
    not exist yet, so relations rooted in any in-flight module are threaded
    through the call instead.  Destinations that are caller-local
    temporaries are closed to what they resolve to so the chain survives
    the namespace change.
    """
    in_flight = ctx.engine.modules_in_flight()
    if not in_flight:
        return set()
    out: set[TypeRelation] = set()
    for src, rels in ctx.g.relations.items():
        if src.parent_kind not in _GLOBAL_PARENTS:
            continue
        if src.root_module() not in in_flight:
            continue
        for rel in rels:
            dst = rel.dst
            if dst.kind is Kind.VARIABLE and dst.parent_kind not in _GLOBAL_PARENTS:
                for resolved in points_of(ctx.g, dst):
                    out.add(TypeRelation(src, resolved, rel.site))
            else:
                out.add(rel)
    return out


def _caller_ident_for(ctx: EvalContext, value: object) -> IdentifierType | None:
    """Caller-side identifier an argument expression names, if any."""
    if not isinstance(value, ast.expr):
        return None
    if isinstance(value, ast.Name):
        for handle in eval_expr(ctx, value):
            if isinstance(handle, IdentifierType) and handle.kind is Kind.VARIABLE:
                return handle
    if isinstance(value, ast.Attribute):
        for handle in eval_expr(ctx, value):
            if isinstance(handle, IdentifierType) and handle.kind is Kind.VARIABLE:
                return handle
    return None


def compute_delta(
    ctx: EvalContext,
    info: FunctionInfo,
    ftg_in: FunctionTypeGraph,
    ftg_out: FunctionTypeGraph,
    binding: Binding,
    args: CallArguments,
) -> set[TypeRelation]:
    """Changed relations between the callee's input and output graphs,
    rewritten into caller identifiers and labeled with the call site."""
    out: set[TypeRelation] = set()
    ret = info.ident.ret()

    for name, value in binding.by_param.items():
        param = scoped_var(info, name)
        before = points_of(ftg_in, param)
        after = points_of(ftg_out, param)
        if after and after != before:
            caller_src = _caller_ident_for(ctx, value)
            if caller_src is not None:
                for typ in sorted(after, key=IdentifierType.sort_key):
                    out.add(TypeRelation(caller_src, typ, ctx.site))

    for src in ftg_out.sources():
        if src == ret:
            for typ in sorted(points_of(ftg_out, ret), key=IdentifierType.sort_key):
                out.add(TypeRelation(ret, typ, ctx.site))
            continue
        if src.parent_kind in (Kind.CLASS, Kind.MODULE, Kind.EXT_MODULE):
            before = ftg_in.outgoing(src)
            after = ftg_out.outgoing(src)
            if before is after or before == after:
                continue
            before_pts = points_of(ftg_in, src)
            after_pts = points_of(ftg_out, src)
            if after_pts != before_pts:
                for typ in sorted(after_pts, key=IdentifierType.sort_key):
                    out.add(TypeRelation(src, typ, ctx.site))
            else:
                for rel in sorted(after - before, key=TypeRelation.sort_key):
                    dst = rel.dst
                    if dst.kind is Kind.VARIABLE and dst.parent_kind is Kind.FUNCTION:
                        continue
                    out.add(TypeRelation(src, dst, ctx.site))
    return out


def invoke_handles(
    ctx: EvalContext,
    callee_handles: list[Handle],
    positional: list[tuple[IdentifierType, ...]],
) -> list[Handle]:
    """Synthetic call with direct argument types (decorators, dunders)."""
    targets = resolve_plain_targets(ctx, callee_handles)
    args = CallArguments(direct_positional=tuple(positional))
    results: list[Handle] = []
    for target in sorted(targets, key=lambda t: t.callee.render()):
        results.extend(call_target(ctx, target, args))
    return dedup_handles(results)


def invoke_method(
    ctx: EvalContext,
    member: IdentifierType,
    receiver_types: tuple[IdentifierType, ...],
) -> list[Handle]:
    """Synthetic zero-argument method call on known receiver types."""
    target = ResolvedTarget(member, receiver_types)
    args = CallArguments()
    return call_target(ctx, target, args)

"""Scenario orchestration: entries, sessions, and the final call graph.

Four scenarios are supported.  Application-centered modes (``aa``/``aw``)
analyze on demand from entry functions and prune to what those entries
reach; exhaustive modes (``ea``/``ew``) take every function in scope as an
entry.  Application-program modes treat library sources as boundaries;
whole-program modes descend into them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

from .callgraph import CallGraph, prune_reachable
from .engine import Analysis
from .errors import ConfigurationError
from .identifiers import IdentifierType
from .sources import discover_modules


class Mode(str, enum.Enum):
    EA = "ea"  # exhaustive, application-program scope
    EW = "ew"  # exhaustive, whole-program scope
    AA = "aa"  # application-centered, application-program scope
    AW = "aw"  # application-centered, whole-program scope

    @property
    def descends_libraries(self) -> bool:
        return self in (Mode.EW, Mode.AW)

    @property
    def exhaustive(self) -> bool:
        return self in (Mode.EA, Mode.EW)


@dataclass
class ScenarioConfig:
    mode: Mode
    app_root: Path
    lib_roots: tuple[Path, ...] = ()
    entries: tuple[str, ...] = ()
    builtin_table: Path | None = None
    max_depth: int = 200


@dataclass
class ScenarioResult:
    callgraph: CallGraph
    entries: list[IdentifierType]
    analysis: Analysis
    warnings: list[str] = field(default_factory=list)

    @property
    def had_analysis_errors(self) -> bool:
        return any(d.category == "unanalyzable" for d in self.analysis.diagnostics)


def _app_modules(analysis: Analysis) -> list[str]:
    return [
        name
        for name in analysis.table.names()
        if not analysis.table.modules[name].is_library
    ]


def _resolve_entry_name(analysis: Analysis, name: str) -> IdentifierType | None:
    if name in analysis.table.modules:
        analysis.ensure_previsited(name)
        body = analysis.facts.module_bodies.get(name)
        return body.ident if body else None
    module = name
    while "." in module:
        module = module.rsplit(".", 1)[0]
        if module in analysis.table.modules:
            analysis.ensure_previsited(module)
            break
    ident = analysis.facts.function_named(name)
    if ident is not None:
        return ident
    return None


def _auto_entries(analysis: Analysis, exhaustive: bool) -> list[IdentifierType]:
    """Module bodies plus top-level functions; every function when exhaustive."""
    entries: list[IdentifierType] = []
    if exhaustive:
        # Every function in scope becomes an entry.
        scope_modules = (
            analysis.table.names()
            if analysis.descend_libraries
            else _app_modules(analysis)
        )
        for name in scope_modules:
            analysis.ensure_previsited(name)
        for ident, info in sorted(
            analysis.facts.functions.items(), key=lambda kv: kv[0].sort_key()
        ):
            module = analysis.table.get(info.module)
            if module is not None and analysis.module_visible(module):
                entries.append(ident)
        for name in scope_modules:
            body = analysis.facts.module_bodies.get(name)
            if body is not None:
                entries.append(body.ident)
        return entries
    # Application-centered: application module bodies and top-level functions.
    for name in _app_modules(analysis):
        analysis.ensure_previsited(name)
        body = analysis.facts.module_bodies.get(name)
        if body is not None:
            entries.append(body.ident)
        for _fname, ident in sorted(analysis.facts.module_level.get(name, {}).items()):
            if ident in analysis.facts.functions:
                entries.append(ident)
    return entries


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    """Discover, analyze and assemble the call graph for one scenario."""
    app_root = Path(cfg.app_root)
    if not app_root.exists():
        raise ConfigurationError(f"application root {app_root} does not exist")
    table = discover_modules(app_root, tuple(Path(p) for p in cfg.lib_roots))
    analysis = Analysis(
        table,
        descend_libraries=cfg.mode.descends_libraries,
        builtin_table=cfg.builtin_table,
        max_depth=cfg.max_depth,
    )
    warnings = list(table.warnings)

    if cfg.entries:
        entries = []
        for name in cfg.entries:
            ident = _resolve_entry_name(analysis, name)
            if ident is None:
                raise ConfigurationError(f"entry {name!r} not found in analysis scope")
            entries.append(ident)
    else:
        entries = _auto_entries(analysis, cfg.mode.exhaustive)
        if not entries:
            warnings.append("no entry functions found; call graph is empty")

    for entry in entries:
        analysis.analyze_entry(entry)

    graph = analysis.callgraph
    if not cfg.mode.exhaustive:
        graph = prune_reachable(graph, entries, warnings)
    warnings.extend(analysis.warnings[len(table.warnings):])
    return ScenarioResult(
        callgraph=graph, entries=entries, analysis=analysis, warnings=warnings
    )

"""Source discovery and parsing.

Maps ``*.py`` files under the application root and any library roots to
qualified module names, parses them on demand, and assigns every statement
a stable :class:`ExprSite` label used to anchor type relations and control
flow edges.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError


@dataclass(frozen=True, slots=True, order=True)
class ExprSite:
    """Stable label for one evaluated statement.

    ``ordinal`` is a per-function preorder index; together with module, line
    and column it uniquely identifies one expression in the program.
    """

    module: str
    line: int
    col: int
    ordinal: int

    def flow_key(self) -> tuple[str, int, int]:
        """Location without the ordinal; used when comparing graphs."""
        return (self.module, self.line, self.col)

    def render(self) -> str:
        return f"{self.module}:{self.line}:{self.col}"

    def __repr__(self) -> str:
        return f"@{self.module}:{self.line}:{self.col}#{self.ordinal}"


@dataclass
class SourceModule:
    """One discovered module and its parse state."""

    name: str
    path: Path | None
    is_library: bool = False
    ast_root: ast.Module | None = None
    unanalyzable: str | None = None
    _parsed: bool = False

    @property
    def kind(self) -> str:
        return "mod" if self.path is not None else "ext_mod"

    def parse(self) -> None:
        parse_module(self)


@dataclass
class ModuleTable:
    """Qualified name to module mapping for one analysis session."""

    modules: dict[str, SourceModule] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def get(self, name: str) -> SourceModule | None:
        return self.modules.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self.modules

    def add(self, module: SourceModule) -> None:
        if module.name in self.modules:
            self.warnings.append(
                f"duplicate module name {module.name!r}; keeping first occurrence"
            )
            return
        self.modules[module.name] = module

    def names(self) -> list[str]:
        return sorted(self.modules)


def _qualified_name(root: Path, file: Path) -> str | None:
    rel = file.relative_to(root)
    parts = list(rel.parts)
    parts[-1] = parts[-1][: -len(".py")]
    if parts[-1] == "__init__":
        parts.pop()
    if not parts:
        return None
    if not all(p.isidentifier() for p in parts):
        return None
    return ".".join(parts)


def _scan_root(root: Path, table: ModuleTable, is_library: bool) -> None:
    if not root.is_dir():
        raise ConfigurationError(f"source root {root} is not a readable directory")
    files = sorted(p for p in root.rglob("*.py") if not _hidden(p, root))
    for file in files:
        name = _qualified_name(root, file)
        if name is None:
            continue
        table.add(SourceModule(name=name, path=file, is_library=is_library))


def _hidden(path: Path, root: Path) -> bool:
    rel = path.relative_to(root)
    return any(part.startswith(".") or part == "__pycache__" for part in rel.parts)


def discover_modules(app_root: Path, lib_roots: tuple[Path, ...] = ()) -> ModuleTable:
    """Index every ``*.py`` file under the given roots.

    Application files win over library files on name collisions; collisions
    between any two roots keep the first root's file and record a warning.
    """
    table = ModuleTable()
    _scan_root(Path(app_root), table, is_library=False)
    for lib in lib_roots:
        _scan_root(Path(lib), table, is_library=True)
    return table


def parse_module(module: SourceModule) -> None:
    """Parse a module's source, marking it unanalyzable on failure."""
    if module._parsed or module.path is None:
        return
    module._parsed = True
    try:
        raw = module.path.read_bytes()
    except OSError as exc:
        module.unanalyzable = f"unreadable: {exc}"
        return
    if raw.startswith(b"\xef\xbb\xbf"):
        raw = raw[3:]
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        module.unanalyzable = "not UTF-8"
        return
    try:
        module.ast_root = ast.parse(text, filename=str(module.path))
    except (SyntaxError, ValueError) as exc:
        module.unanalyzable = f"syntax error: {exc}"

"""Stub table for builtin callables.

Method calls on builtin value types and calls to bare builtin names resolve
to stub function identifiers under the ``builtins`` namespace.  The table is
shipped as a data file and can be overridden from the command line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigurationError
from .identifiers import IdentifierType, builtin_class, builtin_func

#: Builtin value types literals map to.
LITERAL_CLASSES = {
    "str",
    "int",
    "float",
    "complex",
    "bool",
    "bytes",
    "list",
    "dict",
    "tuple",
    "set",
    "frozenset",
    "NoneType",
    "object",
}


@dataclass
class BuiltinTable:
    """(receiver kind, method) and bare-name lookups for builtin stubs."""

    methods: dict[tuple[str, str], IdentifierType] = field(default_factory=dict)
    functions: dict[str, IdentifierType] = field(default_factory=dict)

    def method_stub(self, receiver_kind: str, method: str) -> IdentifierType | None:
        return self.methods.get((receiver_kind, method))

    def function_stub(self, name: str) -> IdentifierType | None:
        return self.functions.get(name)

    @staticmethod
    def literal_class(kind: str) -> IdentifierType:
        return builtin_class(kind)


def _parse_line(line: str) -> tuple[str | None, str, str] | None:
    line = line.strip()
    if not line or line.startswith("#"):
        return None
    lhs, sep, rhs = line.partition("->")
    if not sep:
        raise ConfigurationError(f"malformed builtin table line: {line!r}")
    lhs = lhs.strip()
    rhs = rhs.strip()
    if not rhs.startswith("builtins."):
        raise ConfigurationError(f"builtin stub must live under builtins: {line!r}")
    stub = rhs[len("builtins."):]
    if "." in lhs:
        receiver, method = lhs.split(".", 1)
        return receiver, method, stub
    return None, lhs, stub


def load_builtin_table(path: Path | None = None) -> BuiltinTable:
    """Load the stub table from ``path`` or the packaged default."""
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigurationError(f"cannot read builtin table {path}: {exc}") from exc
    else:
        text = (
            resources.files("callsight").joinpath("data/builtins.table").read_text("utf-8")
        )
    table = BuiltinTable()
    for line in text.splitlines():
        parsed = _parse_line(line)
        if parsed is None:
            continue
        receiver, name, stub = parsed
        ident = builtin_func(stub)
        if receiver is None:
            table.functions[name] = ident
        else:
            table.methods[(receiver, name)] = ident
    return table

"""Identifier types: the names the analysis reasons about.

Every module, class, function and variable is represented by an
:class:`IdentifierType`, a triple of (kind, namespace, name).  The rendered
dotted form is globally unique per program entity and doubles as the node
name in emitted call graphs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class Kind(str, enum.Enum):
    """What an identifier denotes."""

    MODULE = "mod"
    EXT_MODULE = "ext_mod"
    CLASS = "cls"
    FUNCTION = "func"
    VARIABLE = "var"

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return self.value


#: Namespace path: ordered (name, kind) segments from the root down.
Namespace = tuple[tuple[str, Kind], ...]

RET_FIELD = "ret"


@dataclass(frozen=True, slots=True)
class IdentifierType:
    """A (kind, namespace, name) triple naming one program entity."""

    kind: Kind
    namespace: Namespace
    name: str
    _render: str | None = field(default=None, compare=False, repr=False)
    _hash: int | None = field(default=None, compare=False, repr=False)

    def __hash__(self) -> int:
        cached = self._hash
        if cached is None:
            cached = hash((self.kind, self.namespace, self.name))
            object.__setattr__(self, "_hash", cached)
        return cached

    def render(self) -> str:
        """Dotted form, e.g. ``pkg.module.Class.func``."""
        cached = self._render
        if cached is None:
            parts = [seg for seg, _ in self.namespace]
            parts.append(self.name)
            cached = ".".join(parts)
            object.__setattr__(self, "_render", cached)
        return cached

    def root_module(self) -> str:
        """Dotted name of the module namespace this identifier lives under."""
        parts = []
        for seg, kind in self.namespace:
            if kind in (Kind.MODULE, Kind.EXT_MODULE):
                parts.append(seg)
            else:
                break
        if not parts and self.kind in (Kind.MODULE, Kind.EXT_MODULE):
            return self.render()
        return ".".join(parts)

    def derive(self, field: str, kind: Kind = Kind.VARIABLE) -> "IdentifierType":
        """Extend this identifier with an attribute segment (``self.f`` paths)."""
        return IdentifierType(kind, self.namespace + ((self.name, self.kind),), field)

    def ret(self) -> "IdentifierType":
        """The pseudo-field holding a callable's returned types."""
        return self.derive(RET_FIELD)

    def is_path_under(self, base: "IdentifierType") -> bool:
        """True if this identifier is a field path rooted at ``base``."""
        depth = len(base.namespace)
        return (
            len(self.namespace) > depth
            and self.namespace[:depth] == base.namespace
            and self.namespace[depth] == (base.name, base.kind)
        )

    @property
    def parent_kind(self) -> Kind | None:
        return self.namespace[-1][1] if self.namespace else None

    @property
    def is_ret(self) -> bool:
        return self.name == RET_FIELD and self.parent_kind in (
            Kind.FUNCTION,
            Kind.EXT_MODULE,
        )

    def owner_class(self) -> "IdentifierType | None":
        """For a method, the class identifier it is defined on."""
        if self.kind is not Kind.FUNCTION or self.parent_kind is not Kind.CLASS:
            return None
        name, kind = self.namespace[-1]
        return IdentifierType(kind, self.namespace[:-1], name)

    def sort_key(self) -> tuple[str, str]:
        return (self.render(), self.kind.value)

    def __repr__(self) -> str:
        return f"<{self.kind.value}:{self.render()}>"


def module_ident(dotted: str, external: bool = False) -> IdentifierType:
    """Identifier for a module given its dotted name."""
    kind = Kind.EXT_MODULE if external else Kind.MODULE
    *pkgs, leaf = dotted.split(".")
    ns: Namespace = tuple((p, kind) for p in pkgs)
    return IdentifierType(kind, ns, leaf)


def ext_stub(dotted: str, kind: Kind = Kind.FUNCTION) -> IdentifierType:
    """Stub identifier for an entity whose source is unavailable."""
    *pkgs, leaf = dotted.split(".")
    ns: Namespace = tuple((p, Kind.EXT_MODULE) for p in pkgs)
    return IdentifierType(kind, ns, leaf)


BUILTINS_NS: Namespace = (("builtins", Kind.MODULE),)


def builtin_func(name: str) -> IdentifierType:
    return IdentifierType(Kind.FUNCTION, BUILTINS_NS, name)


def builtin_class(name: str) -> IdentifierType:
    return IdentifierType(Kind.CLASS, BUILTINS_NS, name)

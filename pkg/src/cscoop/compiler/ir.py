"""Static control-flow part of a configuration.

Each method is a small transition system: integer states connected by
edges that each carry exactly one action. Expressions hanging off actions
are immutable trees, so whole programs are hashable and shareable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

from ..frontend.source import NOWHERE, Pos
from ..frontend.syntax import DeclaredType


class MethKey(NamedTuple):
    cls: str
    name: str

    def __str__(self) -> str:
        return f"{self.cls}.{self.name}"


class VarRef(NamedTuple):
    """A frame variable (``local``: formals, locals, Result, temporaries) or
    an attribute of the frame's current object (``attr``)."""

    kind: str
    name: str

    def __str__(self) -> str:
        return self.name if self.kind == "local" else f"Current.{self.name}"


# ----------------------------------------------------------------- expressions

@dataclass(frozen=True)
class Const:
    value: Union[int, bool, None]


@dataclass(frozen=True)
class CurrentObj:
    pass


@dataclass(frozen=True)
class Read:
    ref: VarRef


@dataclass(frozen=True)
class AttrOf:
    """Attribute read on another object; ``separate`` only inside assertions."""

    target: "Expr"
    name: str
    separate: bool = False


@dataclass(frozen=True)
class QueryCall:
    """Inline call of a side-effect-free query (target None means Current)."""

    target: Optional["Expr"]
    method: MethKey
    args: tuple["Expr", ...]
    separate: bool = False


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class UnOp:
    op: str
    operand: "Expr"


Expr = Union[Const, CurrentObj, Read, AttrOf, QueryCall, BinOp, UnOp]


# --------------------------------------------------------------------- actions

@dataclass(frozen=True)
class Assign:
    target: VarRef
    expr: Expr


@dataclass(frozen=True)
class Branch:
    cond: Expr
    when: bool


@dataclass(frozen=True)
class CreateSeparate:
    target: VarRef
    cls: str
    method: Optional[MethKey]
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class CreateLocal:
    target: VarRef
    cls: str
    method: Optional[MethKey]
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class Command:
    target: VarRef
    method: MethKey
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class Query:
    result: VarRef
    target: VarRef
    method: MethKey
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class LocalCall:
    """Synchronous call on a non-separate object; ``target`` None is Current."""

    target: Optional[VarRef]
    method: MethKey
    args: tuple[Expr, ...]
    result: Optional[VarRef] = None


@dataclass(frozen=True)
class Lock:
    targets: tuple[str, ...]
    guard: Optional[Expr] = None


@dataclass(frozen=True)
class Unlock:
    targets: tuple[str, ...]


@dataclass(frozen=True)
class PostCheck:
    expr: Expr


@dataclass(frozen=True)
class Noop:
    note: str = ""


Action = Union[Assign, Branch, CreateSeparate, CreateLocal, Command, Query,
               LocalCall, Lock, Unlock, PostCheck, Noop]

ACTION_NAMES = {
    Assign: "assign", Branch: "branch", CreateSeparate: "create_separate",
    CreateLocal: "create_local", Command: "command", Query: "query",
    LocalCall: "local_call", Lock: "lock", Unlock: "unlock",
    PostCheck: "postcheck", Noop: "noop",
}


def action_name(a: Action) -> str:
    return ACTION_NAMES[type(a)]


@dataclass(frozen=True)
class ActionEdge:
    src: int
    dst: int
    action: Action
    pos: Pos = field(default=NOWHERE, compare=False)


@dataclass
class MethodGraph:
    key: MethKey
    kind: str
    formals: tuple[tuple[str, DeclaredType], ...]
    locals: tuple[tuple[str, DeclaredType], ...]
    result_type: Optional[DeclaredType]
    init: int
    finals: frozenset[int]
    edges: tuple[ActionEdge, ...]
    pure: bool = False
    synthetic: bool = False
    pos: Pos = NOWHERE
    out: dict[int, tuple[ActionEdge, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        out: dict[int, list[ActionEdge]] = {}
        for e in self.edges:
            out.setdefault(e.src, []).append(e)
        self.out = {s: tuple(es) for s, es in out.items()}

    @property
    def states(self) -> set[int]:
        s = {self.init} | set(self.finals)
        for e in self.edges:
            s.add(e.src)
            s.add(e.dst)
        return s

    def outgoing(self, state: int) -> tuple[ActionEdge, ...]:
        return self.out.get(state, ())


@dataclass
class Program:
    methods: dict[MethKey, MethodGraph]
    classes: dict[str, tuple[tuple[str, DeclaredType], ...]]
    root: MethKey
    postconditions: bool = False

    def graph(self, key: MethKey) -> MethodGraph:
        return self.methods[key]


def default_value(t: DeclaredType):
    if t.base == "INTEGER":
        return 0
    if t.base == "BOOLEAN":
        return False
    return None

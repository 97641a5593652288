"""Syntax tree for the CoreSCOOP subset.

Positions and checker annotations are excluded from equality so that a
re-parsed tree compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .source import NOWHERE, Pos

INTEGER = "INTEGER"
BOOLEAN = "BOOLEAN"
PRIMITIVES = (INTEGER, BOOLEAN)


@dataclass(frozen=True)
class DeclaredType:
    base: str
    separate: bool = False

    @property
    def is_reference(self) -> bool:
        return self.base not in PRIMITIVES

    def __str__(self) -> str:
        return f"separate {self.base}" if self.separate else self.base


# Type of the Void literal; conforms to every reference type.
NONE_TYPE = DeclaredType("NONE")


# ---------------------------------------------------------------- expressions

@dataclass
class IntLit:
    value: int
    pos: Pos = field(default=NOWHERE, compare=False)
    type: Optional[DeclaredType] = field(default=None, compare=False, repr=False)


@dataclass
class BoolLit:
    value: bool
    pos: Pos = field(default=NOWHERE, compare=False)
    type: Optional[DeclaredType] = field(default=None, compare=False, repr=False)


@dataclass
class VoidLit:
    pos: Pos = field(default=NOWHERE, compare=False)
    type: Optional[DeclaredType] = field(default=None, compare=False, repr=False)


@dataclass
class CurrentRef:
    pos: Pos = field(default=NOWHERE, compare=False)
    type: Optional[DeclaredType] = field(default=None, compare=False, repr=False)


@dataclass
class Call:
    """Identifier use, attribute access or feature call.

    ``target`` is None for unqualified names. After checking, ``binding`` is
    one of local, formal, result, attribute (plain variable reads) or
    query / command (feature calls, possibly on a separate target).
    """

    target: Optional["Expr"]
    name: str
    args: list["Expr"] = field(default_factory=list)
    parens: bool = False
    pos: Pos = field(default=NOWHERE, compare=False)
    type: Optional[DeclaredType] = field(default=None, compare=False, repr=False)
    binding: Optional[str] = field(default=None, compare=False, repr=False)
    separate: bool = field(default=False, compare=False, repr=False)
    target_class: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = field(default=NOWHERE, compare=False)
    type: Optional[DeclaredType] = field(default=None, compare=False, repr=False)


@dataclass
class Unary:
    op: str
    operand: "Expr"
    pos: Pos = field(default=NOWHERE, compare=False)
    type: Optional[DeclaredType] = field(default=None, compare=False, repr=False)


Expr = Union[IntLit, BoolLit, VoidLit, CurrentRef, Call, Binary, Unary]


# ----------------------------------------------------------------- statements

@dataclass
class Assign:
    target: str
    value: Expr
    pos: Pos = field(default=NOWHERE, compare=False)
    binding: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class CallStmt:
    call: Call
    pos: Pos = field(default=NOWHERE, compare=False)


@dataclass
class Create:
    target: str
    method: Optional[str] = None
    args: list[Expr] = field(default_factory=list)
    pos: Pos = field(default=NOWHERE, compare=False)
    binding: Optional[str] = field(default=None, compare=False, repr=False)
    type: Optional[DeclaredType] = field(default=None, compare=False, repr=False)


@dataclass
class If:
    branches: list[tuple[Expr, list["Stmt"]]]
    orelse: list["Stmt"] = field(default_factory=list)
    pos: Pos = field(default=NOWHERE, compare=False)


@dataclass
class Loop:
    init: list["Stmt"]
    until: Expr
    body: list["Stmt"]
    pos: Pos = field(default=NOWHERE, compare=False)


@dataclass
class Print:
    text: str
    pos: Pos = field(default=NOWHERE, compare=False)


Stmt = Union[Assign, CallStmt, Create, If, Loop, Print]


# --------------------------------------------------------------- declarations

@dataclass
class VarDecl:
    name: str
    type: DeclaredType
    pos: Pos = field(default=NOWHERE, compare=False)


@dataclass
class MethodDecl:
    name: str
    formals: list[VarDecl] = field(default_factory=list)
    locals: list[VarDecl] = field(default_factory=list)
    require: Optional[Expr] = None
    body: list[Stmt] = field(default_factory=list)
    ensure: Optional[Expr] = None
    result_type: Optional[DeclaredType] = None
    pos: Pos = field(default=NOWHERE, compare=False)
    end_pos: Pos = field(default=NOWHERE, compare=False)

    @property
    def kind(self) -> str:
        return "query" if self.result_type is not None else "command"


@dataclass
class ClassDecl:
    name: str
    attributes: list[VarDecl] = field(default_factory=list)
    methods: list[MethodDecl] = field(default_factory=list)
    is_root: bool = False
    pos: Pos = field(default=NOWHERE, compare=False)

    def method(self, name: str) -> Optional[MethodDecl]:
        for m in self.methods:
            if m.name == name:
                return m
        return None


@dataclass
class SyntaxTree:
    classes: list[ClassDecl]

    @property
    def root_class(self) -> str:
        roots = [c.name for c in self.classes if c.is_root]
        return roots[0] if roots else ""

    def cls(self, name: str) -> Optional[ClassDecl]:
        for c in self.classes:
            if c.name == name:
                return c
        return None

"""First pass: gather class layouts and method signatures."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import syntax as S
from .source import Diagnostic, Pos, TypeCheckError


@dataclass
class MethodSig:
    cls: str
    name: str
    formals: list[S.VarDecl]
    locals: list[S.VarDecl]
    result_type: Optional[S.DeclaredType]
    pos: Pos

    @property
    def kind(self) -> str:
        return "query" if self.result_type is not None else "command"


@dataclass
class ClassInfo:
    name: str
    attributes: dict[str, S.DeclaredType] = field(default_factory=dict)
    methods: dict[str, MethodSig] = field(default_factory=dict)


@dataclass
class TypeEnv:
    classes: dict[str, ClassInfo]
    root: str

    def method(self, cls: str, name: str) -> MethodSig:
        return self.classes[cls].methods[name]


def _check_type(t: S.DeclaredType, known: set[str], pos: Pos, diags: list[Diagnostic]) -> None:
    if t.base in S.PRIMITIVES:
        if t.separate:
            diags.append(Diagnostic(pos, f"separate {t.base} declaration: primitive types are never separate"))
    elif t.base not in known:
        diags.append(Diagnostic(pos, f"unknown type {t.base}"))


def collect_types(tree: S.SyntaxTree) -> TypeEnv:
    diags: list[Diagnostic] = []
    known: set[str] = set()
    for c in tree.classes:
        if c.name in known or c.name in S.PRIMITIVES:
            diags.append(Diagnostic(c.pos, f"duplicate declaration of class {c.name}"))
        known.add(c.name)

    classes: dict[str, ClassInfo] = {}
    for c in tree.classes:
        info = classes.setdefault(c.name, ClassInfo(c.name))
        for a in c.attributes:
            _check_type(a.type, known, a.pos, diags)
            if a.name in info.attributes:
                diags.append(Diagnostic(a.pos, f"duplicate declaration of {c.name}.{a.name}"))
            info.attributes[a.name] = a.type
        for m in c.methods:
            if m.name in info.methods or m.name in info.attributes:
                diags.append(Diagnostic(m.pos, f"duplicate declaration of {c.name}.{m.name}"))
                continue
            seen: set[str] = set()
            for d in m.formals + m.locals:
                _check_type(d.type, known, d.pos, diags)
                if d.name in seen or d.name == "Result":
                    diags.append(Diagnostic(d.pos, f"duplicate declaration of {d.name} in {c.name}.{m.name}"))
                seen.add(d.name)
            if m.result_type is not None:
                _check_type(m.result_type, known, m.pos, diags)
            info.methods[m.name] = MethodSig(c.name, m.name, m.formals, m.locals, m.result_type, m.pos)

    roots = [c for c in tree.classes if c.is_root]
    if len(roots) != 1:
        pos = roots[1].pos if len(roots) > 1 else tree.classes[0].pos
        diags.append(Diagnostic(pos, "exactly one class must be marked root"))
    else:
        make = classes[roots[0].name].methods.get("make")
        if make is None or make.formals or make.kind != "command":
            diags.append(Diagnostic(roots[0].pos, f"root class {roots[0].name} needs a parameterless command make"))
    if diags:
        raise TypeCheckError(diags)
    return TypeEnv(classes, roots[0].name)

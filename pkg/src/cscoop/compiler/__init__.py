"""Lowering of checked programs to per-method control-flow graphs."""

from __future__ import annotations

from ..model.config import Configuration, Frame, ObjectRec, Processor
from . import ir
from .ir import ActionEdge, MethKey, MethodGraph, Program, VarRef, default_value
from .lower import lower_method, lower_program, pure_queries

__all__ = [
    "ActionEdge", "MethKey", "MethodGraph", "Program", "VarRef", "compile_sources",
    "initial_configuration", "ir", "lower_method", "lower_program", "new_frame", "new_object",
    "pure_queries",
]


def new_frame(program: Program, key: MethKey, target: int, args: tuple, caller=None, ret=None) -> Frame:
    """A frame at the init state of ``key`` with formals bound to ``args``."""
    g = program.methods[key]
    vars = {name: v for (name, _), v in zip(g.formals, args)}
    for name, t in g.locals:
        vars[name] = default_value(t)
    return Frame(key, g.init, vars, target, caller, ret)


def new_object(program: Program, oid: int, cls: str, handler: int) -> ObjectRec:
    return ObjectRec(oid, cls, handler, {n: default_value(t) for n, t in program.classes[cls]})


def initial_configuration(program: Program) -> Configuration:
    """One root processor running ``make`` on a fresh root object."""
    root = new_object(program, 0, program.root.cls, 0)
    p = Processor(0, stack=[new_frame(program, program.root, 0, ())], handled=frozenset({0}))
    return Configuration({0: p}, {0: root}, root=0, next_pid=1, next_oid=1)


def compile_sources(*units, postconditions: bool = False) -> Program:
    """Frontend plus lowering in one call."""
    from ..frontend import analyze

    tree, env = analyze(*units)
    return lower_program(tree, env, postconditions=postconditions)

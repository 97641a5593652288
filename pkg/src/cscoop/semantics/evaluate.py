"""Side-effect-free expression evaluation.

Pure queries run inline by interpreting their method graph to completion.
An inline read or query on a separate object only makes sense once its
handler has drained every earlier request; until then evaluation reports
:class:`NotReady` and the enclosing action simply is not enabled yet.
"""

from __future__ import annotations

from typing import NamedTuple

from ..compiler import ir
from ..compiler.ir import Program, default_value
from ..model.config import INT_MAX, INT_MIN, Configuration, Ref

INLINE_STEP_LIMIT = 100_000


class NotReady(Exception):
    """A separate handler must become quiescent before this can be evaluated."""


class EvalError(Exception):
    def __init__(self, kind: str, detail: str):
        super().__init__(f"{kind}: {detail}")
        self.kind = kind
        self.detail = detail


class Env(NamedTuple):
    c: Configuration
    program: Program
    pid: int  # processor doing the evaluation
    obj: int  # current object
    vars: dict


def quiescent(c: Configuration, pid: int) -> bool:
    p = c.procs[pid]
    return not p.stack and not p.queue and not p.outbox


def _int(n: int) -> int:
    if n < INT_MIN or n > INT_MAX:
        raise EvalError("runtime_error", "integer overflow")
    return n


def _div(a: int, b: int) -> int:
    if b == 0:
        raise EvalError("runtime_error", "division by zero")
    q = abs(a) // abs(b)
    return _int(q if (a < 0) == (b < 0) else -q)


def _mod(a: int, b: int) -> int:
    if b == 0:
        raise EvalError("runtime_error", "division by zero")
    r = abs(a) % abs(b)
    return -r if a < 0 else r


def read(env: Env, ref: ir.VarRef):
    if ref.kind == "local":
        return env.vars[ref.name]
    return env.c.objs[env.obj].attrs[ref.name]


def _target(env: Env, e, separate: bool) -> int:
    v = evaluate(e, env)
    if v is None:
        raise EvalError("void_call", "call on Void target")
    h = env.c.objs[v.obj].handler
    if separate and h != env.pid and not quiescent(env.c, h):
        raise NotReady()
    return v.obj


def evaluate(e: ir.Expr, env: Env):
    t = type(e)
    if t is ir.Read:
        return read(env, e.ref)
    if t is ir.Const:
        return e.value
    if t is ir.BinOp:
        return _binop(e, env)
    if t is ir.UnOp:
        v = evaluate(e.operand, env)
        return (not v) if e.op == "not" else _int(-v)
    if t is ir.CurrentObj:
        return Ref(env.c.objs[env.obj].handler, env.obj)
    if t is ir.AttrOf:
        oid = _target(env, e.target, e.separate)
        return env.c.objs[oid].attrs[e.name]
    if t is ir.QueryCall:
        oid = env.obj if e.target is None else _target(env, e.target, e.separate)
        args = tuple(evaluate(a, env) for a in e.args)
        return run_query(env.c, env.program, e.method, oid, args)
    raise AssertionError(e)


def _binop(e: ir.BinOp, env: Env):
    op = e.op
    if op in ("and", "and then"):
        return evaluate(e.left, env) and evaluate(e.right, env)
    if op in ("or", "or else"):
        return evaluate(e.left, env) or evaluate(e.right, env)
    if op == "implies":
        return (not evaluate(e.left, env)) or evaluate(e.right, env)
    a = evaluate(e.left, env)
    b = evaluate(e.right, env)
    if op == "+":
        return _int(a + b)
    if op == "-":
        return _int(a - b)
    if op == "*":
        return _int(a * b)
    if op == "//":
        return _div(a, b)
    if op == "\\\\":
        return _mod(a, b)
    if op == "=":
        return a == b and type(a) is type(b)
    if op == "/=":
        return not (a == b and type(a) is type(b))
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "xor":
        return a != b
    raise AssertionError(op)


def run_query(c: Configuration, program: Program, key: ir.MethKey, oid: int, args: tuple):
    """Interpret a pure query on object ``oid`` and return its Result."""
    g = program.methods[key]
    vars = {name: v for (name, _), v in zip(g.formals, args)}
    for name, t in g.locals:
        vars[name] = default_value(t)
    env = Env(c, program, c.objs[oid].handler, oid, vars)
    state = g.init
    for _ in range(INLINE_STEP_LIMIT):
        if state in g.finals:
            return vars.get("Result")
        edges = g.outgoing(state)
        a = edges[0].action
        if type(a) is ir.Branch:
            v = bool(evaluate(a.cond, env))
            state = next(e.dst for e in edges if e.action.when == v)
            continue
        if type(a) is ir.Assign:
            assert a.target.kind == "local", "pure query writes an attribute"
            vars[a.target.name] = evaluate(a.expr, env)
        elif type(a) is ir.PostCheck:
            if not evaluate(a.expr, env):
                raise EvalError("postcondition", f"ensure of {key} violated")
        elif type(a) is not ir.Noop:
            raise AssertionError(f"impure action {a} in inline query {key}")
        state = edges[0].dst
    raise EvalError("runtime_error", f"inline query {key} exceeded {INLINE_STEP_LIMIT} steps")

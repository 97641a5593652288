"""Lower checked syntax trees to method graphs.

Separate queries inside expressions are hoisted into explicit Query
actions writing compiler temporaries (named ``$tN``), so evaluation of
what remains is always local and side-effect free.
"""

from __future__ import annotations

from collections import deque
from typing import Optional

from ..frontend import syntax as S
from ..frontend.source import CompileError, Diagnostic, Pos
from ..frontend.types import TypeEnv
from . import ir

Pre = list[tuple[ir.Action, Pos]]


def _walk_exprs(stmts: list[S.Stmt]):
    for s in stmts:
        if isinstance(s, S.Assign):
            yield s.value
        elif isinstance(s, S.CallStmt):
            yield s.call
        elif isinstance(s, S.Create):
            yield from s.args
        elif isinstance(s, S.If):
            for cond, body in s.branches:
                yield cond
                yield from _walk_exprs(body)
            yield from _walk_exprs(s.orelse)
        elif isinstance(s, S.Loop):
            yield from _walk_exprs(s.init)
            yield s.until
            yield from _walk_exprs(s.body)


def _walk_stmts(stmts: list[S.Stmt]):
    for s in stmts:
        yield s
        if isinstance(s, S.If):
            for _, body in s.branches:
                yield from _walk_stmts(body)
            yield from _walk_stmts(s.orelse)
        elif isinstance(s, S.Loop):
            yield from _walk_stmts(s.init)
            yield from _walk_stmts(s.body)


def _subexprs(e: S.Expr):
    yield e
    if isinstance(e, S.Call):
        if e.target is not None:
            yield from _subexprs(e.target)
        for a in e.args:
            yield from _subexprs(a)
    elif isinstance(e, S.Binary):
        yield from _subexprs(e.left)
        yield from _subexprs(e.right)
    elif isinstance(e, S.Unary):
        yield from _subexprs(e.operand)


def pure_queries(tree: S.SyntaxTree) -> set[ir.MethKey]:
    """Queries that may be evaluated inline: no locking, no writes to
    attributes, no separate calls, and only calls to other pure queries.
    Computed as a greatest fixpoint so recursive queries qualify."""
    candidates: dict[ir.MethKey, S.MethodDecl] = {}
    for c in tree.classes:
        for m in c.methods:
            if m.kind != "query" or m.require is not None:
                continue
            if any(f.type.separate for f in m.formals):
                continue
            ok = True
            for s in _walk_stmts(m.body):
                if isinstance(s, (S.CallStmt, S.Create)):
                    ok = False
                elif isinstance(s, S.Assign) and s.binding == "attribute":
                    ok = False
            if ok:
                candidates[ir.MethKey(c.name, m.name)] = m
    pure = set(candidates)

    def needs_queue(e: S.Expr) -> bool:
        if not isinstance(e, S.Call):
            return False
        if e.binding == "attribute":
            return e.separate
        if e.binding == "query":
            return e.separate or ir.MethKey(e.target_class, e.name) not in pure
        return False

    changed = True
    while changed:
        changed = False
        for key in sorted(pure):
            m = candidates[key]
            roots = list(_walk_exprs(m.body)) + ([m.ensure] if m.ensure is not None else [])
            if any(needs_queue(e) for r in roots for e in _subexprs(r)):
                pure.discard(key)
                changed = True
    return pure


class _GraphBuilder:
    def __init__(self, lowerer: "_Lowerer", cls: str, method: S.MethodDecl):
        self.lw = lowerer
        self.cls = cls
        self.method = method
        self.n = 0
        self.edges: list[ir.ActionEdge] = []
        self.temps: list[tuple[str, S.DeclaredType]] = []

    def state(self) -> int:
        self.n += 1
        return self.n - 1

    def edge(self, src: int, dst: int, action: ir.Action, pos: Pos) -> None:
        self.edges.append(ir.ActionEdge(src, dst, action, pos))

    def temp(self, t: S.DeclaredType) -> ir.VarRef:
        name = f"$t{len(self.temps)}"
        self.temps.append((name, t))
        return ir.VarRef("local", name)

    def chain(self, pre: Pre, end: int) -> int:
        for action, pos in reversed(pre):
            s = self.state()
            self.edge(s, end, action, pos)
            end = s
        return end

    # -- expressions

    def expr(self, e: S.Expr, pre: Pre, inline: bool = False) -> ir.Expr:
        """Lower ``e``; calls that must go through a queue are appended to
        ``pre`` unless ``inline`` (assertions), where they run in place."""
        if isinstance(e, S.IntLit):
            return ir.Const(e.value)
        if isinstance(e, S.BoolLit):
            return ir.Const(e.value)
        if isinstance(e, S.VoidLit):
            return ir.Const(None)
        if isinstance(e, S.CurrentRef):
            return ir.CurrentObj()
        if isinstance(e, S.Unary):
            return ir.UnOp(e.op, self.expr(e.operand, pre, inline))
        if isinstance(e, S.Binary):
            return ir.BinOp(e.op, self.expr(e.left, pre, inline), self.expr(e.right, pre, inline))
        assert isinstance(e, S.Call)
        if e.binding in ("local", "formal", "result"):
            return ir.Read(ir.VarRef("local", e.name))
        if e.binding == "attribute" and e.target is None:
            return ir.Read(ir.VarRef("attr", e.name))
        key = ir.MethKey(e.target_class, e.name)
        if e.binding == "attribute":
            target = self.expr(e.target, pre, inline)
            if inline or not e.separate:
                return ir.AttrOf(target, e.name, e.separate)
            ref = self.as_var(target, e.target.type, pre, e.pos)
            tmp = self.temp(e.type)
            pre.append((ir.Query(tmp, ref, key, ()), e.pos))
            return ir.Read(tmp)
        # query call
        target = None if e.target is None else self.expr(e.target, pre, inline)
        args = tuple(self.expr(a, pre, inline) for a in e.args)
        pure = key in self.lw.pure
        if inline:
            if not pure:
                raise CompileError([Diagnostic(e.pos, f"query {key} in an assertion must be side-effect free")])
            return ir.QueryCall(target, key, args, e.separate)
        if e.separate:
            ref = self.as_var(target, e.target.type, pre, e.pos)
            tmp = self.temp(e.type)
            pre.append((ir.Query(tmp, ref, key, args), e.pos))
            return ir.Read(tmp)
        if pure:
            return ir.QueryCall(target, key, args)
        ref = None if target is None or isinstance(target, ir.CurrentObj) else self.as_var(target, e.target.type, pre, e.pos)
        tmp = self.temp(e.type)
        pre.append((ir.LocalCall(ref, key, args, tmp), e.pos))
        return ir.Read(tmp)

    def as_var(self, e: ir.Expr, t: S.DeclaredType, pre: Pre, pos: Pos) -> ir.VarRef:
        if isinstance(e, ir.Read):
            return e.ref
        tmp = self.temp(t)
        pre.append((ir.Assign(tmp, e), pos))
        return tmp

    # -- statements

    def block(self, stmts: list[S.Stmt], exit_: int) -> int:
        for s in reversed(stmts):
            exit_ = self.stmt(s, exit_)
        return exit_

    def stmt(self, s: S.Stmt, exit_: int) -> int:
        pre: Pre = []
        if isinstance(s, S.Assign):
            value = self.expr(s.value, pre)
            kind = "attr" if s.binding == "attribute" else "local"
            entry = self.state()
            self.edge(entry, exit_, ir.Assign(ir.VarRef(kind, s.target), value), s.pos)
            return self.chain(pre, entry)
        if isinstance(s, S.Print):
            entry = self.state()
            self.edge(entry, exit_, ir.Noop(f"print {s.text}"), s.pos)
            return entry
        if isinstance(s, S.CallStmt):
            c = s.call
            key = ir.MethKey(c.target_class, c.name)
            target = None if c.target is None else self.expr(c.target, pre)
            args = tuple(self.expr(a, pre) for a in c.args)
            if c.separate:
                action: ir.Action = ir.Command(self.as_var(target, c.target.type, pre, c.pos), key, args)
            elif target is None or isinstance(target, ir.CurrentObj):
                action = ir.LocalCall(None, key, args)
            else:
                action = ir.LocalCall(self.as_var(target, c.target.type, pre, c.pos), key, args)
            entry = self.state()
            self.edge(entry, exit_, action, s.pos)
            return self.chain(pre, entry)
        if isinstance(s, S.Create):
            args = tuple(self.expr(a, pre) for a in s.args)
            kind = "attr" if s.binding == "attribute" else "local"
            ref = ir.VarRef(kind, s.target)
            method = None if s.method is None else ir.MethKey(s.type.base, s.method)
            ctor = ir.CreateSeparate if s.type.separate else ir.CreateLocal
            entry = self.state()
            self.edge(entry, exit_, ctor(ref, s.type.base, method, args), s.pos)
            return self.chain(pre, entry)
        if isinstance(s, S.If):
            else_entry = self.block(s.orelse, exit_)
            for cond, body in reversed(s.branches):
                then_entry = self.block(body, exit_)
                cpre: Pre = []
                c = self.expr(cond, cpre)
                test = self.state()
                self.edge(test, then_entry, ir.Branch(c, True), cond.pos)
                self.edge(test, else_entry, ir.Branch(c, False), cond.pos)
                else_entry = self.chain(cpre, test)
            return else_entry
        if isinstance(s, S.Loop):
            head = self.state()
            cpre = []
            c = self.expr(s.until, cpre)
            test = head if not cpre else self.state()
            body_entry = self.block(s.body, head)
            self.edge(test, exit_, ir.Branch(c, True), s.until.pos)
            self.edge(test, body_entry, ir.Branch(c, False), s.until.pos)
            if cpre:
                # Hoisted queries run from the loop head up to the test.
                cur = head
                for i, (action, pos) in enumerate(cpre):
                    nxt = test if i == len(cpre) - 1 else self.state()
                    self.edge(cur, nxt, action, pos)
                    cur = nxt
            return self.block(s.init, head)
        raise AssertionError(s)


class _Lowerer:
    def __init__(self, tree: S.SyntaxTree, env: TypeEnv, postconditions: bool):
        self.tree = tree
        self.env = env
        self.postconditions = postconditions
        self.pure = pure_queries(tree) | {
            ir.MethKey(c.name, a.name) for c in tree.classes for a in c.attributes
        }

    def method(self, cls: str, m: S.MethodDecl) -> ir.MethodGraph:
        b = _GraphBuilder(self, cls, m)
        final = b.state()
        tail = final
        targets = tuple(f.name for f in m.formals if f.type.separate)
        guard = None
        if m.require is not None:
            guard = b.expr(m.require, [], inline=True)
        locking = bool(targets) or guard is not None
        if targets:
            u = b.state()
            b.edge(u, tail, ir.Unlock(targets), m.end_pos)
            tail = u
        if m.ensure is not None and self.postconditions:
            p = b.state()
            b.edge(p, tail, ir.PostCheck(b.expr(m.ensure, [], inline=True)), m.ensure.pos)
            tail = p
        entry = b.block(m.body, tail)
        if locking:
            init = b.state()
            b.edge(init, entry, ir.Lock(targets, guard), m.pos)
        elif entry == final:
            init = b.state()
            b.edge(init, final, ir.Noop("empty"), m.pos)
        else:
            init = entry
        locals_ = [(d.name, d.type) for d in m.locals] + b.temps
        if m.result_type is not None:
            locals_.append(("Result", m.result_type))
        key = ir.MethKey(cls, m.name)
        return _renumbered(ir.MethodGraph(
            key=key, kind=m.kind,
            formals=tuple((f.name, f.type) for f in m.formals),
            locals=tuple(locals_), result_type=m.result_type,
            init=init, finals=frozenset({final}), edges=tuple(b.edges),
            pure=key in self.pure, pos=m.pos,
        ))

    def getter(self, cls: str, a: S.VarDecl) -> ir.MethodGraph:
        edge = ir.ActionEdge(0, 1, ir.Assign(ir.VarRef("local", "Result"), ir.Read(ir.VarRef("attr", a.name))), a.pos)
        return ir.MethodGraph(
            key=ir.MethKey(cls, a.name), kind="query", formals=(),
            locals=(("Result", a.type),), result_type=a.type, init=0,
            finals=frozenset({1}), edges=(edge,), pure=True, synthetic=True, pos=a.pos,
        )


def _renumbered(g: ir.MethodGraph) -> ir.MethodGraph:
    """Number states breadth-first from init (init = 0) for stable output."""
    order = {g.init: 0}
    queue = deque([g.init])
    while queue:
        s = queue.popleft()
        for e in g.outgoing(s):
            if e.dst not in order:
                order[e.dst] = len(order)
                queue.append(e.dst)
    for s in sorted(g.states):
        order.setdefault(s, len(order))
    edges = tuple(
        ir.ActionEdge(order[e.src], order[e.dst], e.action, e.pos)
        for e in sorted(g.edges, key=lambda e: (order[e.src], order[e.dst], not getattr(e.action, "when", True)))
    )
    return ir.MethodGraph(
        key=g.key, kind=g.kind, formals=g.formals, locals=g.locals,
        result_type=g.result_type, init=0, finals=frozenset(order[f] for f in g.finals),
        edges=edges, pure=g.pure, synthetic=g.synthetic, pos=g.pos,
    )


def lower_method(m: S.MethodDecl, env: TypeEnv, cls: str, tree: Optional[S.SyntaxTree] = None,
                 postconditions: bool = False) -> ir.MethodGraph:
    tree = tree if tree is not None else S.SyntaxTree([])
    return _Lowerer(tree, env, postconditions).method(cls, m)


def lower_program(tree: S.SyntaxTree, env: TypeEnv, postconditions: bool = False) -> ir.Program:
    lw = _Lowerer(tree, env, postconditions)
    methods: dict[ir.MethKey, ir.MethodGraph] = {}
    classes: dict[str, tuple[tuple[str, S.DeclaredType], ...]] = {}
    for c in tree.classes:
        classes[c.name] = tuple((a.name, a.type) for a in c.attributes)
        for a in c.attributes:
            methods[ir.MethKey(c.name, a.name)] = lw.getter(c.name, a)
        for m in c.methods:
            methods[ir.MethKey(c.name, m.name)] = lw.method(c.name, m)
    root = ir.MethKey(env.root, "make")
    if root not in methods:
        raise CompileError([Diagnostic(tree.classes[0].pos, "missing root creation procedure make")])
    return ir.Program(methods, classes, root, postconditions)

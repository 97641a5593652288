"""Second pass: annotate every expression and call site with its type."""

from __future__ import annotations

import copy
from typing import Optional

from . import syntax as S
from .source import Diagnostic, Pos, TypeCheckError
from .types import ClassInfo, MethodSig, TypeEnv

ARITH = {"+", "-", "*", "//", "\\\\"}
ORDER = {"<", "<=", ">", ">="}
EQUALITY = {"=", "/="}
LOGIC = {"and", "or", "xor", "implies", "and then", "or else"}

INT_T = S.DeclaredType(S.INTEGER)
BOOL_T = S.DeclaredType(S.BOOLEAN)


def conforms(src: S.DeclaredType, dst: S.DeclaredType) -> bool:
    if src == S.NONE_TYPE:
        return dst.is_reference
    if not src.is_reference or not dst.is_reference:
        return src.base == dst.base
    # A non-separate reference may flow into a separate entity, not the reverse.
    return src.base == dst.base and (dst.separate or not src.separate)


def _arg_conforms(src: S.DeclaredType, dst: S.DeclaredType) -> bool:
    # Separateness of actual vs formal is a run-time concern.
    if src == S.NONE_TYPE:
        return dst.is_reference
    return src.base == dst.base


class _MethodChecker:
    def __init__(self, env: TypeEnv, cls: ClassInfo, sig: MethodSig, diags: list[Diagnostic]):
        self.env = env
        self.cls = cls
        self.sig = sig
        self.diags = diags
        self.formals = {d.name: d.type for d in sig.formals}
        self.locals = {d.name: d.type for d in sig.locals}
        self.in_assertion = False

    def error(self, pos: Pos, msg: str) -> None:
        self.diags.append(Diagnostic(pos, msg))

    def lookup_var(self, name: str) -> Optional[tuple[str, S.DeclaredType]]:
        if name == "Result":
            if self.sig.result_type is None:
                return None
            return "result", self.sig.result_type
        if name in self.formals:
            return "formal", self.formals[name]
        if name in self.locals:
            return "local", self.locals[name]
        if name in self.cls.attributes:
            return "attribute", self.cls.attributes[name]
        return None

    # -- expressions

    def expr(self, e: S.Expr) -> S.DeclaredType:
        t = self._expr(e)
        e.type = t
        return t

    def _expr(self, e: S.Expr) -> S.DeclaredType:
        if isinstance(e, S.IntLit):
            return INT_T
        if isinstance(e, S.BoolLit):
            return BOOL_T
        if isinstance(e, S.VoidLit):
            return S.NONE_TYPE
        if isinstance(e, S.CurrentRef):
            return S.DeclaredType(self.cls.name)
        if isinstance(e, S.Unary):
            t = self.expr(e.operand)
            want = BOOL_T if e.op == "not" else INT_T
            if t != want:
                self.error(e.pos, f"type mismatch: {e.op} applied to {t}")
            return want
        if isinstance(e, S.Binary):
            lt, rt = self.expr(e.left), self.expr(e.right)
            if e.op in ARITH or e.op in ORDER:
                if lt != INT_T or rt != INT_T:
                    self.error(e.pos, f"type mismatch: {lt} {e.op} {rt}")
                return INT_T if e.op in ARITH else BOOL_T
            if e.op in LOGIC:
                if lt != BOOL_T or rt != BOOL_T:
                    self.error(e.pos, f"type mismatch: {lt} {e.op} {rt}")
                return BOOL_T
            if e.op in EQUALITY:
                ok = (lt.base == rt.base or (lt.is_reference and rt.is_reference
                      and S.NONE_TYPE in (lt, rt)))
                if not ok:
                    self.error(e.pos, f"type mismatch: {lt} {e.op} {rt}")
                return BOOL_T
            raise AssertionError(e.op)
        if isinstance(e, S.Call):
            return self.call(e, as_statement=False)
        raise AssertionError(e)

    def call(self, c: S.Call, as_statement: bool) -> S.DeclaredType:
        if c.target is None:
            var = None if c.parens else self.lookup_var(c.name)
            if var is not None:
                if as_statement:
                    self.error(c.pos, f"{c.name} is not a command")
                c.binding, t = var
                return t
            target_info = self.cls
            separate = False
        else:
            tt = self.expr(c.target)
            if not tt.is_reference or tt.base not in self.env.classes:
                self.error(c.pos, f"call on non-reference {tt}")
                return INT_T
            target_info = self.env.classes[tt.base]
            separate = tt.separate
        c.target_class = target_info.name
        c.separate = separate

        if c.name in target_info.attributes and c.target is not None and not c.parens:
            if as_statement:
                self.error(c.pos, f"attribute {c.name} used as an instruction")
            c.binding = "attribute"
            return self._through(target_info.attributes[c.name], separate)

        sig = target_info.methods.get(c.name)
        if sig is None:
            self.error(c.pos, f"unknown identifier {c.name}")
            for a in c.args:
                self.expr(a)
            return INT_T
        c.binding = sig.kind
        if len(c.args) != len(sig.formals):
            self.error(c.pos, f"{sig.cls}.{sig.name} expects {len(sig.formals)} arguments, got {len(c.args)}")
        for a, f in zip(c.args, sig.formals):
            at = self.expr(a)
            if not _arg_conforms(at, f.type):
                self.error(a.pos, f"type mismatch: argument {f.name} expects {f.type}, got {at}")
        for a in c.args[len(sig.formals):]:
            self.expr(a)
        if as_statement and sig.kind == "query":
            self.error(c.pos, f"query {sig.name} used as an instruction")
        if not as_statement and sig.kind == "command":
            self.error(c.pos, f"command {sig.name} used in an expression")
            return INT_T
        if self.in_assertion and separate:
            tgt = c.target
            if not (isinstance(tgt, S.Call) and tgt.binding == "formal" and tgt.target is None):
                self.error(c.pos, "separate calls in assertions must target a separate formal")
        return self._through(sig.result_type, separate) if sig.result_type else INT_T

    @staticmethod
    def _through(t: S.DeclaredType, separate: bool) -> S.DeclaredType:
        # A reference obtained from a separate object is itself separate.
        if separate and t.is_reference:
            return S.DeclaredType(t.base, True)
        return t

    # -- statements

    def block(self, stmts: list[S.Stmt]) -> None:
        for s in stmts:
            self.stmt(s)

    def condition(self, e: S.Expr) -> None:
        t = self.expr(e)
        if t != BOOL_T:
            self.error(e.pos, f"type mismatch: condition has type {t}")

    def stmt(self, s: S.Stmt) -> None:
        if isinstance(s, S.Assign):
            dst = self.writable(s.target, s.pos)
            src = self.expr(s.value)
            if dst is not None:
                s.binding = dst[0]
                if not conforms(src, dst[1]):
                    self.error(s.pos, f"type mismatch: cannot assign {src} to {s.target}: {dst[1]}")
        elif isinstance(s, S.CallStmt):
            self.call(s.call, as_statement=True)
        elif isinstance(s, S.Create):
            dst = self.writable(s.target, s.pos)
            for a in s.args:
                self.expr(a)
            if dst is None:
                return
            s.binding, s.type = dst
            if not s.type.is_reference:
                self.error(s.pos, f"cannot create {s.target}: {s.type} is not a class type")
                return
            info = self.env.classes[s.type.base]
            if s.method is None:
                if s.args:
                    self.error(s.pos, "creation arguments without a creation procedure")
                return
            sig = info.methods.get(s.method)
            if sig is None or sig.kind != "command":
                self.error(s.pos, f"{info.name}.{s.method} is not a creation procedure")
                return
            if len(s.args) != len(sig.formals):
                self.error(s.pos, f"{info.name}.{s.method} expects {len(sig.formals)} arguments, got {len(s.args)}")
            for a, f in zip(s.args, sig.formals):
                if not _arg_conforms(a.type, f.type):
                    self.error(a.pos, f"type mismatch: argument {f.name} expects {f.type}, got {a.type}")
        elif isinstance(s, S.If):
            for cond, body in s.branches:
                self.condition(cond)
                self.block(body)
            self.block(s.orelse)
        elif isinstance(s, S.Loop):
            self.block(s.init)
            self.condition(s.until)
            self.block(s.body)
        elif isinstance(s, S.Print):
            pass
        else:
            raise AssertionError(s)

    def writable(self, name: str, pos: Pos) -> Optional[tuple[str, S.DeclaredType]]:
        var = self.lookup_var(name)
        if var is None:
            self.error(pos, f"unknown identifier {name}")
            return None
        if var[0] == "formal":
            self.error(pos, f"cannot assign to formal argument {name}")
            return None
        return var


def check(tree: S.SyntaxTree, env: TypeEnv) -> S.SyntaxTree:
    """Return an annotated copy of ``tree``; raise TypeCheckError on any error."""
    tree = copy.deepcopy(tree)
    diags: list[Diagnostic] = []
    for c in tree.classes:
        info = env.classes[c.name]
        for m in c.methods:
            mc = _MethodChecker(env, info, info.methods[m.name], diags)
            if m.require is not None:
                mc.in_assertion = True
                mc.condition(m.require)
                mc.in_assertion = False
            mc.block(m.body)
            if m.ensure is not None:
                mc.in_assertion = True
                mc.condition(m.ensure)
                mc.in_assertion = False
    if diags:
        raise TypeCheckError(diags)
    return tree

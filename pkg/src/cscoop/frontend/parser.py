from __future__ import annotations

from typing import Optional

from . import syntax as S
from .lexer import Token
from .source import NOWHERE, CompileError, Diagnostic, ParseError, Pos

STMT_END = {"END", "ELSE", "ELSEIF", "UNTIL", "LOOP", "ENSURE"}
ASSERTION_END = {"LOCAL", "DO", "END", "ENSURE"}
COMPARISONS = {"EQ": "=", "NE": "/=", "LT": "<", "LE": "<=", "GT": ">", "GE": ">="}
ADDITIVE = {"PLUS": "+", "MINUS": "-"}
MULTIPLICATIVE = {"STAR": "*", "DIV": "//", "MOD": "\\\\"}


class Parser:
    def __init__(self, tokens: list[Token]):
        end = tokens[-1].pos if tokens else NOWHERE
        self.toks = list(tokens) + [Token("EOF", "<end of input>", end)]
        self.i = 0

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *kinds: str) -> bool:
        return self.tok.kind in kinds

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "EOF":
            self.i += 1
        return t

    def accept(self, kind: str) -> Optional[Token]:
        if self.tok.kind == kind:
            return self.advance()
        return None

    def expect(self, *kinds: str) -> Token:
        if self.tok.kind in kinds:
            return self.advance()
        raise self.error(set(kinds))

    def error(self, expected: set[str]) -> ParseError:
        t = self.tok
        found = t.kind if t.kind not in ("IDENT", "INT") else f"{t.kind} {t.text}"
        return ParseError(t.pos, expected, found)

    # -- declarations

    def program(self) -> S.SyntaxTree:
        if self.at("EOF"):
            raise CompileError([Diagnostic(self.tok.pos, "no classes")])
        classes = []
        while not self.at("EOF"):
            classes.append(self.class_decl())
        return S.SyntaxTree(classes)

    def class_decl(self) -> S.ClassDecl:
        start = self.expect("CLASS")
        name = self.expect("IDENT").text
        decl = S.ClassDecl(name, pos=start.pos)
        decl.is_root = self.accept("ROOT") is not None
        while not self.at("END"):
            if self.accept("FEATURE") or self.accept("SEMI"):
                continue
            if self.accept("CREATE"):
                # Creation clause ("create make"): informational only.
                self.expect("IDENT")
                while self.accept("COMMA"):
                    self.expect("IDENT")
                continue
            if not self.at("IDENT"):
                raise self.error({"IDENT", "FEATURE", "CREATE", "END"})
            self.feature(decl)
        self.expect("END")
        return decl

    def feature(self, decl: S.ClassDecl) -> None:
        first = self.expect("IDENT")
        if self.at("COMMA"):
            names = [first]
            while self.accept("COMMA"):
                names.append(self.expect("IDENT"))
            self.expect("COLON")
            t = self.type_ref()
            decl.attributes.extend(S.VarDecl(n.text, t, n.pos) for n in names)
            return
        formals: list[S.VarDecl] = []
        if self.accept("LPAR"):
            if not self.at("RPAR"):
                formals = self.decl_group(separator="SEMI")
            self.expect("RPAR")
        result_type = None
        if self.accept("COLON"):
            result_type = self.type_ref()
            if not formals and not self.at("REQUIRE", "LOCAL", "DO"):
                decl.attributes.append(S.VarDecl(first.text, result_type, first.pos))
                return
        decl.methods.append(self.method_rest(first, formals, result_type))

    def method_rest(self, name: Token, formals, result_type) -> S.MethodDecl:
        m = S.MethodDecl(name.text, formals=formals, result_type=result_type, pos=name.pos)
        if self.accept("REQUIRE"):
            m.require = self.assertions()
        if self.accept("LOCAL"):
            m.locals = self.decl_group(separator=None)
        self.expect("DO")
        m.body = self.stmts()
        if self.accept("ENSURE"):
            m.ensure = self.assertions()
        m.end_pos = self.expect("END").pos
        # Also accept a trailing ensure after "end".
        if m.ensure is None and self.accept("ENSURE"):
            m.ensure = self.expr()
        return m

    def decl_group(self, separator: Optional[str]) -> list[S.VarDecl]:
        out: list[S.VarDecl] = []
        while self.at("IDENT") and self.peek().kind in ("COLON", "COMMA"):
            names = [self.expect("IDENT")]
            while self.accept("COMMA"):
                names.append(self.expect("IDENT"))
            self.expect("COLON")
            t = self.type_ref()
            out.extend(S.VarDecl(n.text, t, n.pos) for n in names)
            if not self.accept("SEMI") and separator == "SEMI":
                break
        if separator == "SEMI" and not out:
            raise self.error({"IDENT"})
        return out

    def type_ref(self) -> S.DeclaredType:
        sep = self.accept("SEPARATE") is not None
        return S.DeclaredType(self.expect("IDENT").text, sep)

    def assertions(self) -> S.Expr:
        parts = []
        while True:
            if self.at("IDENT") and self.peek().kind == "COLON":
                self.advance()
                self.advance()
            parts.append(self.expr())
            self.accept("SEMI")
            if self.at(*ASSERTION_END) or self.at("EOF"):
                break
        result = parts[0]
        for p in parts[1:]:
            result = S.Binary("and", result, p, pos=p.pos)
        return result

    # -- statements

    def stmts(self) -> list[S.Stmt]:
        out: list[S.Stmt] = []
        while True:
            if self.accept("SEMI"):
                continue
            if self.at(*STMT_END) or self.at("EOF"):
                return out
            out.append(self.stmt())

    def stmt(self) -> S.Stmt:
        t = self.tok
        if self.accept("CREATE"):
            target = self.expect("IDENT", "RESULT").text
            c = S.Create(target, pos=t.pos)
            if self.accept("DOT"):
                c.method = self.expect("IDENT").text
                c.args = self.args() if self.at("LPAR") else []
            return c
        if self.accept("IF"):
            branches = [(self.expr(), self._then_block())]
            orelse: list[S.Stmt] = []
            while True:
                if self.accept("ELSEIF"):
                    branches.append((self.expr(), self._then_block()))
                    continue
                if self.accept("ELSE"):
                    orelse = self.stmts()
                self.expect("END")
                break
            return S.If(branches, orelse, pos=t.pos)
        if self.accept("FROM"):
            init = self.stmts()
            self.expect("UNTIL")
            until = self.expr()
            self.expect("LOOP")
            body = self.stmts()
            self.expect("END")
            return S.Loop(init, until, body, pos=t.pos)
        if self.accept("PRINT"):
            return S.Print(self.balanced(), pos=t.pos)
        if self.at("IDENT", "RESULT") and self.peek().kind == "ASSIGN":
            name = self.advance().text
            self.advance()
            return S.Assign(name, self.expr(), pos=t.pos)
        if self.at("IDENT", "CURRENT", "LPAR"):
            e = self.postfix()
            if isinstance(e, S.Call):
                return S.CallStmt(e, pos=t.pos)
            raise ParseError(t.pos, {"call"}, "expression")
        raise self.error({"CREATE", "IF", "FROM", "PRINT", "IDENT", "RESULT", "CURRENT"})

    def _then_block(self) -> list[S.Stmt]:
        self.expect("THEN")
        return self.stmts()

    def balanced(self) -> str:
        self.expect("LPAR")
        depth = 1
        parts = []
        while True:
            t = self.tok
            if t.kind == "EOF":
                raise self.error({"RPAR"})
            self.advance()
            if t.kind == "LPAR":
                depth += 1
            elif t.kind == "RPAR":
                depth -= 1
                if depth == 0:
                    return " ".join(parts)
            parts.append(t.text)

    # -- expressions

    def expr(self) -> S.Expr:
        left = self.disjunction()
        while self.at("IMPLIES"):
            pos = self.advance().pos
            left = S.Binary("implies", left, self.disjunction(), pos=pos)
        return left

    def disjunction(self) -> S.Expr:
        left = self.conjunction()
        while self.at("OR", "XOR"):
            t = self.advance()
            op = t.text.lower()
            if op == "or" and self.accept("ELSE"):
                op = "or else"
            left = S.Binary(op, left, self.conjunction(), pos=t.pos)
        return left

    def conjunction(self) -> S.Expr:
        left = self.comparison()
        while self.at("AND"):
            t = self.advance()
            op = "and then" if self.accept("THEN") else "and"
            left = S.Binary(op, left, self.comparison(), pos=t.pos)
        return left

    def comparison(self) -> S.Expr:
        left = self.additive()
        if self.tok.kind in COMPARISONS:
            t = self.advance()
            left = S.Binary(COMPARISONS[t.kind], left, self.additive(), pos=t.pos)
        return left

    def additive(self) -> S.Expr:
        left = self.term()
        while self.tok.kind in ADDITIVE:
            t = self.advance()
            left = S.Binary(ADDITIVE[t.kind], left, self.term(), pos=t.pos)
        return left

    def term(self) -> S.Expr:
        left = self.unary()
        while self.tok.kind in MULTIPLICATIVE:
            t = self.advance()
            left = S.Binary(MULTIPLICATIVE[t.kind], left, self.unary(), pos=t.pos)
        return left

    def unary(self) -> S.Expr:
        t = self.tok
        if self.accept("NOT"):
            return S.Unary("not", self.unary(), pos=t.pos)
        if self.accept("MINUS"):
            return S.Unary("-", self.unary(), pos=t.pos)
        if self.accept("PLUS"):
            return self.unary()
        return self.postfix()

    def postfix(self) -> S.Expr:
        e = self.primary()
        while self.at("DOT"):
            self.advance()
            name = self.expect("IDENT")
            parens = self.at("LPAR")
            args = self.args() if parens else []
            e = S.Call(e, name.text, args, parens, pos=name.pos)
        return e

    def primary(self) -> S.Expr:
        t = self.tok
        if self.accept("INT"):
            return S.IntLit(int(t.text), pos=t.pos)
        if self.accept("TRUE"):
            return S.BoolLit(True, pos=t.pos)
        if self.accept("FALSE"):
            return S.BoolLit(False, pos=t.pos)
        if self.accept("VOID"):
            return S.VoidLit(pos=t.pos)
        if self.accept("CURRENT"):
            return S.CurrentRef(pos=t.pos)
        if self.accept("RESULT"):
            return S.Call(None, "Result", pos=t.pos)
        if self.accept("IDENT"):
            parens = self.at("LPAR")
            args = self.args() if parens else []
            return S.Call(None, t.text, args, parens, pos=t.pos)
        if self.accept("LPAR"):
            e = self.expr()
            self.expect("RPAR")
            return e
        raise self.error({"INT", "TRUE", "FALSE", "VOID", "CURRENT", "RESULT", "IDENT", "LPAR"})

    def args(self) -> list[S.Expr]:
        self.expect("LPAR")
        out: list[S.Expr] = []
        if not self.at("RPAR"):
            out.append(self.expr())
            while self.accept("COMMA"):
                out.append(self.expr())
        self.expect("RPAR")
        return out


def parse(tokens: list[Token]) -> S.SyntaxTree:
    return Parser(tokens).program()


def parse_expr(tokens: list[Token]) -> S.Expr:
    p = Parser(tokens)
    e = p.expr()
    if not p.at("EOF"):
        raise p.error({"EOF"})
    return e

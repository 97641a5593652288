"""Render a syntax tree back to source text."""

from __future__ import annotations

from . import syntax as S

# Binding strength used to decide where parentheses are required.
PRECEDENCE = {
    "implies": 1, "or": 2, "or else": 2, "xor": 2, "and": 3, "and then": 3,
    "=": 4, "/=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5, "*": 6, "//": 6, "\\\\": 6,
}


def format_expr(e: S.Expr, ctx: int = 0) -> str:
    if isinstance(e, S.IntLit):
        return str(e.value) if e.value >= 0 else f"({e.value})"
    if isinstance(e, S.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, S.VoidLit):
        return "Void"
    if isinstance(e, S.CurrentRef):
        return "Current"
    if isinstance(e, S.Call):
        head = "" if e.target is None else format_expr(e.target, 8) + "."
        args = ""
        if e.parens or e.args:
            args = " (" + ", ".join(format_expr(a) for a in e.args) + ")"
        return head + e.name + args
    if isinstance(e, S.Unary):
        inner = format_expr(e.operand, 7)
        if e.op == "not":
            text = f"not {inner}"
        else:
            text = f"- {inner}" if inner.startswith("-") else f"-{inner}"
        return f"({text})" if ctx > 7 else text
    if isinstance(e, S.Binary):
        p = PRECEDENCE[e.op]
        # Comparisons do not chain; everything else is left-associative.
        right_ctx = p + 1
        left_ctx = p + 1 if p == 4 else p
        text = f"{format_expr(e.left, left_ctx)} {e.op} {format_expr(e.right, right_ctx)}"
        return f"({text})" if p < ctx else text
    raise TypeError(f"not an expression: {e!r}")


def _type(t: S.DeclaredType) -> str:
    return str(t)


def _decls(ds: list[S.VarDecl], sep: str) -> str:
    return sep.join(f"{d.name}: {_type(d.type)}" for d in ds)


def format_stmts(stmts: list[S.Stmt], indent: int) -> list[str]:
    pad = "  " * indent
    out: list[str] = []
    for s in stmts:
        if isinstance(s, S.Assign):
            out.append(f"{pad}{s.target} := {format_expr(s.value)}")
        elif isinstance(s, S.CallStmt):
            out.append(pad + format_expr(s.call))
        elif isinstance(s, S.Create):
            text = f"{pad}create {s.target}"
            if s.method is not None:
                text += f".{s.method}"
                if s.args:
                    text += " (" + ", ".join(format_expr(a) for a in s.args) + ")"
            out.append(text)
        elif isinstance(s, S.Print):
            out.append(f"{pad}print ({s.text})")
        elif isinstance(s, S.If):
            for i, (cond, body) in enumerate(s.branches):
                kw = "if" if i == 0 else "elseif"
                out.append(f"{pad}{kw} {format_expr(cond)} then")
                out.extend(format_stmts(body, indent + 1))
            if s.orelse:
                out.append(f"{pad}else")
                out.extend(format_stmts(s.orelse, indent + 1))
            out.append(f"{pad}end")
        elif isinstance(s, S.Loop):
            out.append(f"{pad}from")
            out.extend(format_stmts(s.init, indent + 1))
            out.append(f"{pad}until")
            out.append(f"{pad}  {format_expr(s.until)}")
            out.append(f"{pad}loop")
            out.extend(format_stmts(s.body, indent + 1))
            out.append(f"{pad}end")
        else:
            raise TypeError(f"not a statement: {s!r}")
    return out


def format_method(m: S.MethodDecl) -> list[str]:
    head = f"  {m.name}"
    if m.formals:
        head += f" ({_decls(m.formals, '; ')})"
    if m.result_type is not None:
        head += f": {_type(m.result_type)}"
    out = [head]
    if m.require is not None:
        out += ["    require", f"      {format_expr(m.require)}"]
    if m.locals:
        out += ["    local"] + [f"      {d.name}: {_type(d.type)}" for d in m.locals]
    out.append("    do")
    out.extend(format_stmts(m.body, 3))
    if m.ensure is not None:
        out += ["    ensure", f"      {format_expr(m.ensure)}"]
    out.append("    end")
    return out


def format_tree(tree: S.SyntaxTree) -> str:
    lines: list[str] = []
    for c in tree.classes:
        lines.append(f"class {c.name}" + (" root" if c.is_root else ""))
        lines.append("feature")
        for a in c.attributes:
            lines.append(f"  {a.name}: {_type(a.type)}")
        for m in c.methods:
            lines.extend(format_method(m))
        lines.append("end")
        lines.append("")
    return "\n".join(lines)

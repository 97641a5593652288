from __future__ import annotations

from dataclasses import dataclass

from .source import Diagnostic, LexError, Pos, SourceUnit

KEYWORDS = {
    "class", "root", "feature", "create", "end", "do", "local", "require",
    "ensure", "separate", "if", "then", "elseif", "else", "from", "until",
    "loop", "and", "or", "not", "xor", "implies", "true", "false", "print",
}
# Eiffel spells these with a capital letter; they behave as keywords.
SPECIAL_NAMES = {"Void": "VOID", "Current": "CURRENT", "Result": "RESULT"}

OPERATORS = [
    (":=", "ASSIGN"), ("//", "DIV"), ("\\\\", "MOD"), ("<=", "LE"), (">=", "GE"),
    ("/=", "NE"), ("(", "LPAR"), (")", "RPAR"), (",", "COMMA"), (":", "COLON"),
    (";", "SEMI"), (".", "DOT"), ("+", "PLUS"), ("-", "MINUS"), ("*", "STAR"),
    ("<", "LT"), (">", "GT"), ("=", "EQ"),
]


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: Pos

    def __repr__(self) -> str:
        if self.kind in ("IDENT", "INT", "STRING"):
            return f"{self.kind} {self.text}"
        return self.kind


def tokenize(unit: SourceUnit) -> list[Token]:
    """Split a source unit into tokens; comments and whitespace are dropped."""
    src = unit.text
    n = len(src)
    i = 0
    out: list[Token] = []
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if src.startswith("--", i):
            j = src.find("\n", i)
            i = n if j < 0 else j
            continue
        start = i
        if ch.isalpha() or ch == "_":
            while i < n and (src[i].isalnum() or src[i] == "_"):
                i += 1
            word = src[start:i]
            if word in SPECIAL_NAMES:
                kind = SPECIAL_NAMES[word]
            elif word.lower() in KEYWORDS:
                kind = word.upper()
            else:
                kind = "IDENT"
            out.append(Token(kind, word, unit.pos(start)))
            continue
        if ch.isdigit():
            while i < n and (src[i].isdigit() or src[i] == "_"):
                i += 1
            out.append(Token("INT", src[start:i].replace("_", ""), unit.pos(start)))
            continue
        if ch == '"':
            # Eiffel strings escape with '%'; content is never interpreted.
            i += 1
            while i < n and src[i] != '"' and src[i] != "\n":
                i += 2 if src[i] == "%" else 1
            if i >= n or src[i] != '"':
                raise LexError([Diagnostic(unit.pos(start), "unterminated string literal")])
            i += 1
            out.append(Token("STRING", src[start:i], unit.pos(start)))
            continue
        for lit, kind in OPERATORS:
            if src.startswith(lit, i):
                out.append(Token(kind, lit, unit.pos(start)))
                i += len(lit)
                break
        else:
            raise LexError([Diagnostic(unit.pos(start), f"illegal character {ch!r}")])
    return out

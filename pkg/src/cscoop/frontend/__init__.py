"""Lexing, parsing and type checking of CoreSCOOP sources."""

from __future__ import annotations

from .checker import check
from .lexer import Token, tokenize
from .parser import parse
from .source import CompileError, Diagnostic, LexError, ParseError, Pos, SourceUnit, TypeCheckError
from .syntax import SyntaxTree
from .types import TypeEnv, collect_types

__all__ = [
    "CompileError", "Diagnostic", "LexError", "ParseError", "Pos", "SourceUnit",
    "SyntaxTree", "Token", "TypeCheckError", "TypeEnv", "analyze", "check",
    "collect_types", "parse", "tokenize",
]


def analyze(*units: SourceUnit) -> tuple[SyntaxTree, TypeEnv]:
    """Run the whole frontend over one or more units forming a single program."""
    classes = []
    for unit in units:
        classes.extend(parse(tokenize(unit)).classes)
    tree = SyntaxTree(classes)
    env = collect_types(tree)
    return check(tree, env), env

"""Source units and diagnostics shared by every frontend pass."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class Pos:
    path: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.path}:{self.line}:{self.col}"


NOWHERE = Pos("<builtin>", 0, 0)


@dataclass
class SourceUnit:
    path: str
    text: str
    line_index: list[int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise CompileError([Diagnostic(Pos(self.path, 1, 1), "no classes")])
        self.line_index = [0]
        for i, ch in enumerate(self.text):
            if ch == "\n":
                self.line_index.append(i + 1)

    @classmethod
    def from_file(cls, path: str | Path) -> "SourceUnit":
        p = Path(path)
        return cls(str(p), p.read_text(encoding="utf-8"))

    def pos(self, offset: int) -> Pos:
        """Map a character offset to a 1-based line/column position."""
        offset = max(0, min(offset, len(self.text)))
        line = bisect.bisect_right(self.line_index, offset) - 1
        return Pos(self.path, line + 1, offset - self.line_index[line] + 1)


@dataclass(frozen=True)
class Diagnostic:
    pos: Pos
    message: str

    def __str__(self) -> str:
        return f"{self.pos}: {self.message}"


class CompileError(Exception):
    """Raised by any frontend or lowering pass; carries one or more diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class LexError(CompileError):
    pass


class ParseError(CompileError):
    def __init__(self, pos: Pos, expected: set[str] | frozenset[str], found: str):
        self.expected = frozenset(expected)
        self.found = found
        exp = ", ".join(sorted(self.expected))
        super().__init__([Diagnostic(pos, f"syntax error: expected one of {{{exp}}}, found {found}")])


class TypeCheckError(CompileError):
    pass

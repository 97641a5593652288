"""Benchmark programs shipped with the package.

Integer constants tagged ``-- @param NAME`` in a source are the benchmark's
parameters; :func:`load` rewrites them before compiling.
"""

from __future__ import annotations

import re
from importlib import resources

from ..compiler import compile_sources
from ..compiler.ir import Program
from ..frontend import SourceUnit

NAMES = ("dpe", "dpb", "pc", "ds", "cs")

_PARAM = re.compile(r"(-?\d+)(\s*--\s*@param\s+(\w+))")


def source(name: str) -> str:
    return resources.files(__package__).joinpath(f"{name}.cscoop").read_text(encoding="utf-8")


def params(name: str) -> dict[str, int]:
    return {m.group(3): int(m.group(1)) for m in _PARAM.finditer(source(name))}


def instantiate(text: str, **values: int) -> str:
    known = {m.group(3) for m in _PARAM.finditer(text)}
    unknown = set(values) - known
    if unknown:
        raise KeyError(f"unknown parameters: {', '.join(sorted(unknown))}")

    def sub(m: re.Match) -> str:
        name = m.group(3)
        return f"{values[name]}{m.group(2)}" if name in values else m.group(0)

    return _PARAM.sub(sub, text)


def unit(name: str, **values: int) -> SourceUnit:
    return SourceUnit(f"{name}.cscoop", instantiate(source(name), **values))


def load(name: str, postconditions: bool = False, **values: int) -> Program:
    """Compile benchmark ``name`` with parameters overridden by ``values``."""
    return compile_sources(unit(name, **values), postconditions=postconditions)

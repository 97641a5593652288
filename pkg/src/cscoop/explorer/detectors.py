"""Violation detectors, run on every newly discovered configuration."""

from __future__ import annotations

from typing import NamedTuple, Optional

from ..compiler import ir
from ..model.config import Configuration
from ..semantics import Semantics

# Highest priority first; the verdict names the first kind that fired.
CHECKS = ("deadlock", "stuck", "void_call", "postcondition", "runtime_error")
# Stuck detection is opt-in: a blocked void call also leaves nothing enabled
# and would otherwise always be reported as the higher-ranked stuck state.
DEFAULT_CHECKS = frozenset({"deadlock", "void_call", "postcondition"})


class Violation(NamedTuple):
    kind: str
    detail: str


def _pending(c: Configuration, sem: Semantics, pid: int):
    """Outgoing edges of a running, non-waiting processor's current state."""
    p = c.procs[pid]
    if not p.stack or p.waiting is not None:
        return ()
    f = p.stack[-1]
    return sem.program.methods[f.method].outgoing(f.state)


def wait_for_edges(c: Configuration, sem: Semantics) -> dict[int, set[int]]:
    """p -> q when p waits at a Lock on a processor that q has locked."""
    edges: dict[int, set[int]] = {}
    for pid in c.procs:
        for e in _pending(c, sem, pid):
            if type(e.action) is not ir.Lock:
                continue
            f = c.procs[pid].stack[-1]
            for name in e.action.targets:
                v = f.vars[name]
                if v is None:
                    continue
                holder = c.procs[c.objs[v.obj].handler].locked_by
                if holder is not None and holder != pid:
                    edges.setdefault(pid, set()).add(holder)
    return edges


def detect_lock_cycle(c: Configuration, sem: Semantics) -> Optional[list[int]]:
    """A cycle of processors, each blocked at a Lock on a processor held by
    the next; rotated so the lowest id comes first."""
    edges = wait_for_edges(c, sem)
    state: dict[int, int] = {}  # 1 on the DFS path, 2 finished
    path: list[int] = []

    def dfs(u: int) -> Optional[list[int]]:
        state[u] = 1
        path.append(u)
        for v in sorted(edges.get(u, ())):
            if state.get(v) == 1:
                return path[path.index(v):]
            if v not in state:
                found = dfs(v)
                if found:
                    return found
        path.pop()
        state[u] = 2
        return None

    for start in sorted(edges):
        if start not in state:
            cycle = dfs(start)
            if cycle:
                i = cycle.index(min(cycle))
                return cycle[i:] + cycle[:i]
    return None


def detect_void_call(c: Configuration, sem: Semantics) -> Optional[tuple[int, str]]:
    for flag in sorted(c.errors):
        if flag.kind == "void_call":
            return flag.pid, flag.detail
    for pid in c.procs:
        for e in _pending(c, sem, pid):
            a = e.action
            f = c.procs[pid].stack[-1]
            if type(a) is ir.Lock:
                names = [ir.VarRef("local", n) for n in a.targets]
            elif type(a) in (ir.Command, ir.Query) or (type(a) is ir.LocalCall and a.target is not None):
                names = [a.target]
            else:
                continue
            for ref in names:
                v = f.vars[ref.name] if ref.kind == "local" else c.objs[f.target].attrs[ref.name]
                if v is None:
                    return pid, f"{e.pos.path}:{e.pos.line}"
    return None


def detect_stuck(c: Configuration, sem: Semantics) -> bool:
    if c.errors or c.is_terminal():
        return False
    return not sem.enabled(c)


def detect_flag(c: Configuration, kind: str) -> Optional[tuple[int, str]]:
    for flag in sorted(c.errors):
        if flag.kind == kind:
            return flag.pid, flag.detail
    return None


def run_detectors(c: Configuration, sem: Semantics, checks) -> list[Violation]:
    """All enabled detectors that fire on ``c``, in priority order."""
    out: list[Violation] = []
    for kind in CHECKS:
        if kind not in checks:
            continue
        if kind == "deadlock":
            cycle = detect_lock_cycle(c, sem)
            if cycle:
                out.append(Violation(kind, "lock cycle " + " -> ".join(map(str, cycle + cycle[:1]))))
        elif kind == "stuck":
            if detect_stuck(c, sem):
                out.append(Violation(kind, "no action enabled"))
        elif kind == "void_call":
            hit = detect_void_call(c, sem)
            if hit:
                out.append(Violation(kind, f"processor {hit[0]} at {hit[1]}"))
        else:
            hit = detect_flag(c, kind)
            if hit:
                out.append(Violation(kind, f"processor {hit[0]} at {hit[1]}"))
    return out

"""Counterexample traces: reconstruction, replay and the text format."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from ..model.config import Configuration
from ..semantics import Firing, Semantics


class TraceEvent(NamedTuple):
    step: int
    processor: str
    action: str
    method: str
    pos: str

    def line(self) -> str:
        return "\t".join((str(self.step), self.processor, self.action, self.method, self.pos))


@dataclass
class Trace:
    events: list[TraceEvent]
    firings: list[Firing]
    final: Configuration
    footer: str = ""
    states: list[Configuration] = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return len(self.events)

    def format(self) -> str:
        lines = [e.line() for e in self.events]
        if self.footer:
            lines.append(f"# {self.footer}")
        return "\n".join(lines) + "\n"


def processor_label(c: Configuration, pid: int) -> str:
    p = c.procs.get(pid)
    if p is None or not p.handled:
        return str(pid)
    return f"{c.objs[min(p.handled)].cls}#{pid}"


def make_event(sem: Semantics, c: Configuration, step: int, f: Firing) -> TraceEvent:
    info = sem.describe(f)
    return TraceEvent(step, processor_label(c, f.pid), info.action, info.method, info.pos)


def trace_from_firings(sem: Semantics, start: Configuration, firings: list[Firing], footer: str = "") -> Trace:
    c = start
    events = []
    states = [c]
    for i, f in enumerate(firings, 1):
        events.append(make_event(sem, c, i, f))
        c = sem.fire(c, f)
        states.append(c)
    return Trace(events, list(firings), c, footer, states)


def reconstruct_trace(space, sid: int, footer: str = "") -> Trace:
    """Shortest firing sequence from the initial state to state ``sid``."""
    firings: list[Firing] = []
    cur: Optional[int] = sid
    guard = 0
    while cur != 0:
        link = space.parent[cur]
        if link is None or guard > len(space.parent):
            raise RuntimeError(f"state {sid} is not connected to the initial state")
        cur, f = link
        firings.append(f)
        guard += 1
    firings.reverse()
    return trace_from_firings(space.sem, space.configs[0], firings, footer)


def replay(sem: Semantics, start: Configuration, firings: list[Firing]) -> Configuration:
    c = start
    for f in firings:
        c = sem.fire(c, f)
    return c

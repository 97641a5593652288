"""Breadth-first state-space exploration over macro-steps."""

from __future__ import annotations

import resource
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

from ..compiler import initial_configuration
from ..compiler.ir import Program
from ..model import canonical_form, graph_size, raw_form
from ..model.config import Configuration
from ..semantics import Firing, Semantics
from .detectors import CHECKS, DEFAULT_CHECKS, Violation, run_detectors
from .trace import Trace, reconstruct_trace


@dataclass
class ExploreOptions:
    checks: frozenset = DEFAULT_CHECKS
    bound: Optional[int] = None
    queue: str = "fifo"
    gc: bool = False
    first: bool = False
    max_states: Optional[int] = None

    def __post_init__(self) -> None:
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise ValueError(f"unknown checks: {', '.join(sorted(unknown))}")
        self.checks = frozenset(self.checks)


@dataclass
class Stats:
    states: int = 0
    transitions: int = 0
    elapsed: float = 0.0
    peak_rss_kb: int = 0
    start_graph: tuple[int, int] = (0, 0)
    final_graph: tuple[int, int] = (0, 0)
    max_depth: int = 0

    def format(self) -> str:
        return (f"states: {self.states}\ntransitions: {self.transitions}\n"
                f"max depth: {self.max_depth}\n"
                f"start graph: {self.start_graph[0]} nodes, {self.start_graph[1]} edges\n"
                f"final graph: {self.final_graph[0]} nodes, {self.final_graph[1]} edges\n"
                f"time: {self.elapsed:.3f} s\npeak memory: {self.peak_rss_kb} KiB")


@dataclass
class Safe:
    pass


@dataclass
class CounterexampleFound:
    kind: str
    trace: Trace
    state: int = 0


@dataclass
class BoundReached:
    frontier: int


Verdict = Union[Safe, CounterexampleFound, BoundReached]


class ResourceExhausted(Exception):
    def __init__(self, message: str, stats: Stats):
        super().__init__(message)
        self.stats = stats


@dataclass
class StateSpace:
    sem: Semantics
    keys: dict[tuple, int] = field(default_factory=dict)  # canonical form -> state id
    raw: dict[tuple, int] = field(default_factory=dict)  # raw form -> state id (shortcut)
    configs: list[Configuration] = field(default_factory=list)
    depth: list[int] = field(default_factory=list)
    parent: list[Optional[tuple[int, Firing]]] = field(default_factory=list)
    transitions: list[tuple[int, Firing, int]] = field(default_factory=list)
    violations: dict[int, list[Violation]] = field(default_factory=dict)
    stats: Stats = field(default_factory=Stats)

    def add(self, c: Configuration, key: tuple, depth: int, parent) -> int:
        sid = len(self.configs)
        self.keys[key] = sid
        self.configs.append(c)
        self.depth.append(depth)
        self.parent.append(parent)
        return sid

    def __len__(self) -> int:
        return len(self.configs)


def explore(program: Program, opts: Optional[ExploreOptions] = None, **kw) -> tuple[StateSpace, Verdict]:
    """Explore every macro-step interleaving of ``program`` breadth first.

    New states are checked before expansion and violating states are not
    expanded. With ``first`` the search stops at the first violation."""
    opts = opts or ExploreOptions(**kw)
    sem = Semantics(program, queue=opts.queue, gc=opts.gc)
    space = StateSpace(sem)
    t0 = time.perf_counter()
    init = sem.stabilize(initial_configuration(program))
    space.stats.start_graph = graph_size(init)

    def discover(c: Configuration, key: tuple, depth: int, parent) -> tuple[int, bool]:
        sid = space.add(c, key, depth, parent)
        found = run_detectors(c, sem, opts.checks)
        if found:
            space.violations[sid] = found
        return sid, bool(found)

    def finish(verdict: Verdict) -> tuple[StateSpace, Verdict]:
        st = space.stats
        st.states = len(space)
        st.transitions = len(space.transitions)
        st.elapsed = time.perf_counter() - t0
        st.peak_rss_kb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
        st.max_depth = max(space.depth, default=0)
        finals = [c for c in space.configs if c.is_terminal()] or space.configs[-1:]
        st.final_graph = max((graph_size(c) for c in finals), default=(0, 0))
        return space, verdict

    _, bad = discover(init, canonical_form(init), 0, None)
    space.raw[raw_form(init)] = 0
    if bad and opts.first:
        return finish(_counterexample(space))
    todo = deque([0])
    cut = 0
    while todo:
        sid = todo.popleft()
        if sid in space.violations:
            continue
        d = space.depth[sid]
        c = space.configs[sid]
        if opts.bound is not None and d >= opts.bound:
            if sem.enabled(c):
                cut += 1
            continue
        for f, s in sem.successors(c):
            raw = raw_form(s)
            tid = space.raw.get(raw)
            if tid is None:
                key = canonical_form(s)
                tid = space.keys.get(key)
                if tid is not None:
                    space.raw[raw] = tid
            if tid is None:
                tid, bad = discover(s, key, d + 1, (sid, f))
                space.raw[raw] = tid
                if bad and opts.first:
                    space.transitions.append((sid, f, tid))
                    return finish(_counterexample(space))
                todo.append(tid)
            space.transitions.append((sid, f, tid))
        if opts.max_states is not None and len(space) > opts.max_states:
            finish(Safe())
            raise ResourceExhausted(f"state limit {opts.max_states} exceeded", space.stats)
    if space.violations:
        return finish(_counterexample(space))
    if cut:
        return finish(BoundReached(cut))
    return finish(Safe())


def _counterexample(space: StateSpace) -> CounterexampleFound:
    """Name the highest-priority kind seen; trace to its shallowest state."""
    best = None
    for sid, vs in space.violations.items():
        rank = min(CHECKS.index(v.kind) for v in vs)
        cand = (rank, space.depth[sid], sid)
        if best is None or cand < best:
            best = cand
    rank, _, sid = best
    kind = CHECKS[rank]
    detail = next(v.detail for v in space.violations[sid] if v.kind == kind)
    return CounterexampleFound(kind, reconstruct_trace(space, sid, f"{kind}: {detail}"), sid)

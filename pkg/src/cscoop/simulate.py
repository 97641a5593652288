"""Single pseudo-random executions."""

from __future__ import annotations

import random

from .compiler import initial_configuration
from .compiler.ir import Program
from .explorer.detectors import DEFAULT_CHECKS, run_detectors
from .explorer.trace import Trace, make_event
from .semantics import Semantics

MAX_STEPS = 10_000


def run_single(program: Program, seed: int = 0, max_steps: int = MAX_STEPS, queue: str = "fifo",
               gc: bool = False, checks=DEFAULT_CHECKS) -> Trace:
    """Resolve nondeterminism with ``random.Random(seed)`` until the run
    terminates, gets stuck, trips a detector or hits ``max_steps``.

    The footer says which: ``terminated``, ``<kind>: <detail>`` or
    ``step limit <n> reached``."""
    rng = random.Random(seed)
    sem = Semantics(program, queue=queue, gc=gc)
    c = sem.stabilize(initial_configuration(program))
    events, firings, states = [], [], [c]
    footer = f"step limit {max_steps} reached"
    for step in range(1, max_steps + 2):
        found = run_detectors(c, sem, checks)
        if found:
            footer = f"{found[0].kind}: {found[0].detail}"
            break
        enabled = sem.enabled(c)
        if not enabled:
            if c.errors:
                e = min(c.errors)
                footer = f"{e.kind}: processor {e.pid} at {e.detail}"
            else:
                footer = "terminated" if c.is_terminal() else "stuck: no enabled action"
            break
        if step > max_steps:
            break
        f = rng.choice(enabled)
        events.append(make_event(sem, c, step, f))
        firings.append(f)
        c = sem.fire(c, f, check=False)
        states.append(c)
    return Trace(events, firings, c, footer, states)

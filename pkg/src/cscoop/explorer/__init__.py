"""State-space exploration, error detection and counterexample traces."""

from .detectors import (
    CHECKS, DEFAULT_CHECKS, Violation, detect_lock_cycle, detect_stuck, detect_void_call,
    run_detectors, wait_for_edges,
)
from .search import (
    BoundReached, CounterexampleFound, ExploreOptions, ResourceExhausted, Safe, StateSpace, Stats,
    Verdict, explore,
)
from .trace import Trace, TraceEvent, reconstruct_trace, replay, trace_from_firings

__all__ = [
    "CHECKS", "DEFAULT_CHECKS", "BoundReached", "CounterexampleFound", "ExploreOptions",
    "ResourceExhausted", "Safe", "StateSpace", "Stats", "Trace", "TraceEvent", "Verdict",
    "Violation", "detect_lock_cycle", "detect_stuck", "detect_void_call", "explore",
    "reconstruct_trace", "replay", "run_detectors", "trace_from_firings", "wait_for_edges",
]

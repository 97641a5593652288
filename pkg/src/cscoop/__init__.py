"""Explicit-state verification of CoreSCOOP programs.

A program is compiled to per-method control-flow graphs, executed by a
prioritized rule semantics over processor/object configurations, and
explored breadth first with deadlock, stuck, void-call and postcondition
detectors.
"""

__version__ = "0.1.0"

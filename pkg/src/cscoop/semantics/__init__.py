"""Operational semantics: expression evaluation, actions and scheduling."""

from .engine import DEQUEUE, ContractViolation, Firing, FiringInfo, Semantics
from .evaluate import Env, EvalError, NotReady, evaluate, quiescent, run_query

__all__ = [
    "DEQUEUE", "ContractViolation", "Env", "EvalError", "Firing", "FiringInfo",
    "NotReady", "Semantics", "evaluate", "quiescent", "run_query",
]

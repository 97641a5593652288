"""Run-time configuration: processors, their queues, call stacks and objects.

Configurations are treated as immutable once published. Transitions work on
a *draft* obtained from :meth:`Configuration.draft`, which shares every
processor and object with its parent until :meth:`Configuration.proc` or
:meth:`Configuration.obj` copies one for writing. Records reachable from a
published configuration must never be mutated in place: they carry cached
serialization fragments.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, NamedTuple, Optional, Union

if TYPE_CHECKING:
    from ..compiler.ir import MethKey, VarRef


class Ref(NamedTuple):
    proc: int
    obj: int


Value = Union[int, bool, Ref, None]

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1


class Request(NamedTuple):
    method: "MethKey"
    target: int
    args: tuple
    caller: Optional[int] = None  # pid of a processor blocked on this query


class Waiting(NamedTuple):
    callee: int
    result: "VarRef"


class ErrorFlag(NamedTuple):
    kind: str
    pid: int
    detail: str


class Frame:
    __slots__ = ("method", "state", "vars", "target", "caller", "ret", "eval")

    def __init__(self, method: MethKey, state: int, vars: dict, target: int,
                 caller: Optional[int] = None, ret: Optional[VarRef] = None, eval=None):
        self.method = method
        self.state = state
        self.vars = vars
        self.target = target
        self.caller = caller
        self.ret = ret
        self.eval = eval

    def copy(self) -> "Frame":
        return Frame(self.method, self.state, dict(self.vars), self.target, self.caller, self.ret, self.eval)

    def __repr__(self) -> str:
        return f"Frame({self.method}@{self.state}, obj={self.target}, vars={self.vars})"


class Processor:
    __slots__ = ("pid", "locked_by", "holds", "queue", "stack", "waiting", "handled", "outbox", "canon")

    def __init__(self, pid: int, locked_by: Optional[int] = None, holds: Optional[dict] = None,
                 queue: tuple = (), stack: Optional[list] = None, waiting: Optional[Waiting] = None,
                 handled: frozenset = frozenset(), outbox: tuple = ()):
        self.pid = pid
        self.locked_by = locked_by
        self.holds = holds if holds is not None else {}
        self.queue = queue
        self.stack = stack if stack is not None else []
        self.waiting = waiting
        self.handled = handled
        self.outbox = outbox  # (target pid, Request) pairs awaiting delivery
        self.canon = None  # serialization cache, valid while the record is shared

    @property
    def status(self) -> str:
        if not self.stack:
            return "idle"
        return "waiting" if self.waiting is not None else "running"

    @property
    def top(self) -> Optional[Frame]:
        return self.stack[-1] if self.stack else None

    def copy(self) -> "Processor":
        return Processor(self.pid, self.locked_by, dict(self.holds), self.queue,
                         [f.copy() for f in self.stack], self.waiting, self.handled, self.outbox)

    def __repr__(self) -> str:
        return (f"Processor({self.pid}, {self.status}, locked_by={self.locked_by}, "
                f"holds={self.holds}, queue={len(self.queue)}, stack={self.stack})")


class ObjectRec:
    __slots__ = ("oid", "cls", "handler", "attrs", "canon")

    def __init__(self, oid: int, cls: str, handler: int, attrs: dict):
        self.oid = oid
        self.cls = cls
        self.handler = handler
        self.attrs = attrs
        self.canon = None

    def copy(self) -> "ObjectRec":
        return ObjectRec(self.oid, self.cls, self.handler, dict(self.attrs))

    def __repr__(self) -> str:
        return f"ObjectRec({self.oid}:{self.cls}@{self.handler}, {self.attrs})"


class Configuration:
    __slots__ = ("procs", "objs", "root", "next_pid", "next_oid", "errors", "_own_p", "_own_o")

    def __init__(self, procs: dict[int, Processor], objs: dict[int, ObjectRec], root: int,
                 next_pid: int, next_oid: int, errors: frozenset = frozenset()):
        self.procs = procs
        self.objs = objs
        self.root = root
        self.next_pid = next_pid
        self.next_oid = next_oid
        self.errors = errors
        self._own_p: Optional[set] = None
        self._own_o: Optional[set] = None

    # -- drafting

    def draft(self) -> "Configuration":
        c = Configuration(dict(self.procs), dict(self.objs), self.root,
                          self.next_pid, self.next_oid, self.errors)
        c._own_p = set()
        c._own_o = set()
        return c

    def publish(self) -> "Configuration":
        self._own_p = None
        self._own_o = None
        return self

    @property
    def is_draft(self) -> bool:
        return self._own_p is not None

    def proc(self, pid: int) -> Processor:
        """Writable processor (drafts only)."""
        if pid not in self._own_p:
            self.procs[pid] = self.procs[pid].copy()
            self._own_p.add(pid)
        return self.procs[pid]

    def obj(self, oid: int) -> ObjectRec:
        """Writable object (drafts only)."""
        if oid not in self._own_o:
            self.objs[oid] = self.objs[oid].copy()
            self._own_o.add(oid)
        return self.objs[oid]

    def add_proc(self, p: Processor) -> None:
        self.procs[p.pid] = p
        self._own_p.add(p.pid)

    def add_obj(self, o: ObjectRec) -> None:
        self.objs[o.oid] = o
        self._own_o.add(o.oid)

    def deep_copy(self) -> "Configuration":
        return Configuration({k: p.copy() for k, p in self.procs.items()},
                             {k: o.copy() for k, o in self.objs.items()},
                             self.root, self.next_pid, self.next_oid, self.errors)

    # -- queries

    def handler_of(self, v: Value) -> Optional[int]:
        return self.objs[v.obj].handler if isinstance(v, Ref) else None

    def is_terminal(self) -> bool:
        return all(not p.stack and not p.queue and not p.outbox for p in self.procs.values())

    def __repr__(self) -> str:
        return f"Configuration(root={self.root}, procs={list(self.procs.values())}, objs={list(self.objs.values())}, errors={set(self.errors)})"

"""Action rules, prioritized scheduling and macro-steps.

A macro-step fires one enabled action and then *stabilizes*: scheduling
rules are applied, one at a time and always restarting from the highest
priority tier, until none applies. Tiers in priority order:

1. deliver requests waiting in a processor's outbox to the target queue
2. write a finished separate query's Result back to the waiting caller
3. pop frames that reached a final state (passing local-call results down)
4. dequeue the head request into an idle processor (FIFO discipline only)
5. evaluate the guard of a pending Branch into the frame's ``eval`` slot
6. collect unreachable idle processors (only when garbage collection is on)

Within a tier the lowest processor id goes first.
"""

from __future__ import annotations

import os
import random
from typing import NamedTuple, Optional

from ..compiler import ir, new_frame, new_object
from ..compiler.ir import MethKey, Program
from ..model.config import Configuration, ErrorFlag, Processor, Ref, Request, Waiting
from .evaluate import Env, EvalError, NotReady, evaluate

DEQUEUE = -1


class Firing(NamedTuple):
    """One enabled action: ``edge`` indexes the method graph's edges, or is
    DEQUEUE for taking queue item ``targets[0]`` under the bag discipline.
    For Lock, Command and Query ``targets`` are the resolved handlers."""

    pid: int
    method: MethKey
    edge: int
    targets: tuple = ()


class FiringInfo(NamedTuple):
    action: str
    method: str
    pos: str


class ContractViolation(Exception):
    pass


def _where(pos) -> str:
    return f"{os.path.basename(pos.path)}:{pos.line}"


class Semantics:
    def __init__(self, program: Program, queue: str = "fifo", gc: bool = False,
                 rng: Optional[random.Random] = None):
        if queue not in ("fifo", "bag"):
            raise ValueError(f"unknown queue discipline {queue!r}")
        self.program = program
        self.bag = queue == "bag"
        self.gc = gc
        self.rng = rng  # test hook: shuffles tie-breaks inside a tier
        self._out: dict[MethKey, dict[int, tuple]] = {}
        for key, g in program.methods.items():
            out: dict[int, list] = {}
            for i, e in enumerate(g.edges):
                out.setdefault(e.src, []).append((i, e))
            self._out[key] = {s: tuple(es) for s, es in out.items()}

    # ------------------------------------------------------------ helpers

    def _order(self, c: Configuration) -> list[int]:
        pids = list(c.procs)
        if self.rng is not None:
            self.rng.shuffle(pids)
        return pids

    def _env(self, c: Configuration, pid: int) -> Env:
        f = c.procs[pid].stack[-1]
        return Env(c, self.program, pid, f.target, f.vars)

    def _handlers(self, c: Configuration, pid: int, names: tuple) -> Optional[tuple]:
        """Handlers of the objects named by ``names``, excluding ``pid``;
        None if any of them is Void."""
        f = c.procs[pid].stack[-1]
        hs = set()
        for n in names:
            v = f.vars[n]
            if v is None:
                return None
            hs.add(c.objs[v.obj].handler)
        hs.discard(pid)
        return tuple(sorted(hs))

    @staticmethod
    def _write(c: Configuration, pid: int, ref: ir.VarRef, value) -> None:
        p = c.proc(pid)
        f = p.stack[-1]
        if ref.kind == "local":
            f.vars[ref.name] = value
        else:
            c.obj(f.target).attrs[ref.name] = value

    @staticmethod
    def _flag(c: Configuration, kind: str, pid: int, detail: str) -> None:
        c.errors = c.errors | {ErrorFlag(kind, pid, detail)}

    # ---------------------------------------------------------- stabilize

    def initial(self, c: Configuration) -> Configuration:
        return self.stabilize(c)

    def stabilize(self, c: Configuration) -> Configuration:
        d = c if c.is_draft else c.draft()
        self._stabilize(d)
        return d.publish()

    def _stabilize(self, c: Configuration) -> None:
        tiers = [self._deliver, self._write_back, self._pop]
        if not self.bag:
            tiers.append(self._dequeue)
        tiers.append(self._reduce)
        if self.gc:
            tiers.append(self._collect)
        while not c.errors:
            for tier in tiers:
                if tier(c):
                    break
            else:
                return

    def _deliver(self, c: Configuration) -> bool:
        for pid in self._order(c):
            p = c.procs[pid]
            if p.outbox:
                p = c.proc(pid)
                dst, req = p.outbox[0]
                p.outbox = p.outbox[1:]
                q = c.proc(dst)
                q.queue = q.queue + (req,)
                return True
        return False

    def _write_back(self, c: Configuration) -> bool:
        for pid in self._order(c):
            p = c.procs[pid]
            f = p.top
            if f is None or f.caller is None:
                continue
            g = self.program.methods[f.method]
            if f.state not in g.finals:
                continue
            caller = c.proc(f.caller)
            self._write(c, f.caller, caller.waiting.result, f.vars.get("Result"))
            caller.waiting = None
            c.proc(pid).stack[-1].caller = None
            return True
        return False

    def _pop(self, c: Configuration) -> bool:
        for pid in self._order(c):
            p = c.procs[pid]
            f = p.top
            if f is None or f.caller is not None:
                continue
            if f.state not in self.program.methods[f.method].finals:
                continue
            p = c.proc(pid)
            done = p.stack.pop()
            if done.ret is not None:
                self._write(c, pid, done.ret, done.vars.get("Result"))
            return True
        return False

    def _start(self, c: Configuration, pid: int, index: int) -> None:
        p = c.proc(pid)
        req = p.queue[index]
        p.queue = p.queue[:index] + p.queue[index + 1:]
        p.stack.append(new_frame(self.program, req.method, req.target, req.args, caller=req.caller))

    def _dequeue(self, c: Configuration) -> bool:
        for pid in self._order(c):
            p = c.procs[pid]
            if not p.stack and p.queue:
                self._start(c, pid, 0)
                return True
        return False

    def _reduce(self, c: Configuration) -> bool:
        for pid in self._order(c):
            p = c.procs[pid]
            f = p.top
            if f is None or p.waiting is not None or f.eval is not None:
                continue
            edges = self.program.methods[f.method].outgoing(f.state)
            if not edges or type(edges[0].action) is not ir.Branch:
                continue
            try:
                v = bool(evaluate(edges[0].action.cond, self._env(c, pid)))
            except EvalError as err:
                self._flag(c, err.kind, pid, _where(edges[0].pos))
                return True
            c.proc(pid).stack[-1].eval = v
            return True
        return False

    def _collect(self, c: Configuration) -> bool:
        live = set()
        todo = []

        def mark(pid: int) -> None:
            if pid not in live:
                live.add(pid)
                todo.append(pid)

        def mark_value(v) -> None:
            if isinstance(v, Ref):
                mark(v.proc)

        for pid, p in c.procs.items():
            if pid == c.root or p.stack or p.queue or p.outbox or p.holds or p.locked_by is not None:
                mark(pid)
        while todo:
            p = c.procs[todo.pop()]
            for f in p.stack:
                for v in f.vars.values():
                    mark_value(v)
                if f.caller is not None:
                    mark(f.caller)
            for r in list(p.queue) + [r for _, r in p.outbox]:
                for v in r.args:
                    mark_value(v)
            for oid in p.handled:
                for v in c.objs[oid].attrs.values():
                    mark_value(v)
        dead = [pid for pid in c.procs if pid not in live]
        if not dead:
            return False
        for pid in dead:
            for oid in c.procs[pid].handled:
                del c.objs[oid]
            del c.procs[pid]
        return True

    # ---------------------------------------------------------- enabledness

    def enabled(self, c: Configuration) -> list[Firing]:
        if c.errors:
            return []
        out: list[Firing] = []
        for pid, p in c.procs.items():
            if not p.stack:
                if self.bag and p.queue:
                    seen = set()
                    for i, r in enumerate(p.queue):
                        if r not in seen:
                            seen.add(r)
                            out.append(Firing(pid, r.method, DEQUEUE, (i,)))
                continue
            if p.waiting is not None:
                continue
            f = p.stack[-1]
            for i, e in self._out[f.method].get(f.state, ()):
                targets = self._enabled_edge(c, pid, f, e)
                if targets is not None:
                    out.append(Firing(pid, f.method, i, targets))
        return out

    def _enabled_edge(self, c: Configuration, pid: int, f, e: ir.ActionEdge) -> Optional[tuple]:
        """Resolved targets if ``e`` is enabled, else None."""
        a = e.action
        t = type(a)
        if t is ir.Branch:
            return () if f.eval is a.when else None
        if t in (ir.Command, ir.Query, ir.LocalCall):
            if t is ir.LocalCall and a.target is None:
                return ()
            v = f.vars[a.target.name] if a.target.kind == "local" else c.objs[f.target].attrs[a.target.name]
            if v is None:
                return None
            h = c.objs[v.obj].handler
            if h == pid:
                return ()
            return (h,) if c.procs[pid].holds.get(h, 0) > 0 else None
        if t is ir.Lock:
            hs = self._handlers(c, pid, a.targets)
            if hs is None:
                return None
            for h in hs:
                if c.procs[h].locked_by not in (None, pid):
                    return None
            if a.guard is not None:
                try:
                    if not evaluate(a.guard, self._env(c, pid)):
                        return None
                except NotReady:
                    return None
                except EvalError:
                    pass  # firing raises the flag
            return hs
        if t is ir.PostCheck:
            try:
                evaluate(a.expr, self._env(c, pid))
            except NotReady:
                return None
            except EvalError:
                pass
            return ()
        return ()

    # --------------------------------------------------------------- firing

    def edge_of(self, f: Firing) -> Optional[ir.ActionEdge]:
        if f.edge == DEQUEUE:
            return None
        return self.program.methods[f.method].edges[f.edge]

    def describe(self, f: Firing) -> FiringInfo:
        e = self.edge_of(f)
        if e is None:
            return FiringInfo("dequeue", str(f.method), "-")
        return FiringInfo(ir.action_name(e.action), str(f.method), _where(e.pos))

    def fire(self, c: Configuration, f: Firing, check: bool = True) -> Configuration:
        if check and f not in self.enabled(c):
            raise ContractViolation(f"firing {f} is not enabled")
        d = c.draft()
        if f.edge == DEQUEUE:
            self._start(d, f.pid, f.targets[0])
        else:
            try:
                self._apply(d, f)
            except EvalError as err:
                self._flag(d, err.kind, f.pid, _where(self.edge_of(f).pos))
        self._stabilize(d)
        return d.publish()

    def _apply(self, c: Configuration, f: Firing) -> None:
        e = self.edge_of(f)
        a = e.action
        t = type(a)
        pid = f.pid
        env = self._env(c, pid)
        p = c.proc(pid)
        frame = p.stack[-1]

        def advance() -> None:
            frame.state = e.dst
            frame.eval = None

        if t is ir.Assign:
            v = evaluate(a.expr, env)
            advance()
            self._write(c, pid, a.target, v)
        elif t is ir.Branch or t is ir.Noop:
            advance()
        elif t is ir.PostCheck:
            if not evaluate(a.expr, env):
                raise EvalError("postcondition", "ensure clause violated")
            advance()
        elif t is ir.Lock:
            if a.guard is not None:
                evaluate(a.guard, env)
            advance()
            for h in f.targets:
                p.holds[h] = p.holds.get(h, 0) + 1
                c.proc(h).locked_by = pid
        elif t is ir.Unlock:
            hs = self._handlers(c, pid, a.targets)
            advance()
            for h in hs:
                n = p.holds[h] - 1
                if n:
                    p.holds[h] = n
                else:
                    del p.holds[h]
                    c.proc(h).locked_by = None
        elif t is ir.CreateSeparate or t is ir.CreateLocal:
            args = tuple(evaluate(x, env) for x in a.args)
            oid = c.next_oid
            c.next_oid += 1
            if t is ir.CreateSeparate:
                h = c.next_pid
                c.next_pid += 1
                c.add_proc(Processor(h, handled=frozenset({oid})))
            else:
                h = pid
                p.handled = p.handled | {oid}
            c.add_obj(new_object(self.program, oid, a.cls, h))
            advance()
            self._write(c, pid, a.target, Ref(h, oid))
            if a.method is not None:
                if t is ir.CreateSeparate:
                    p.outbox = p.outbox + ((h, Request(a.method, oid, args)),)
                else:
                    p.stack.append(new_frame(self.program, a.method, oid, args))
        else:  # Command, Query, LocalCall
            if t is ir.LocalCall and a.target is None:
                v = Ref(pid, frame.target)
            else:
                v = evaluate(ir.Read(a.target), env)
            args = tuple(evaluate(x, env) for x in a.args)
            result = a.result if t is ir.Query or t is ir.LocalCall else None
            advance()
            h = c.objs[v.obj].handler
            if h == pid:
                p.stack.append(new_frame(self.program, a.method, v.obj, args, ret=result))
            elif result is None:
                p.outbox = p.outbox + ((h, Request(a.method, v.obj, args)),)
            else:
                p.outbox = p.outbox + ((h, Request(a.method, v.obj, args, caller=pid)),)
                p.waiting = Waiting(h, result)

    # ----------------------------------------------------------- macro-step

    def successors(self, c: Configuration) -> list[tuple[Firing, Configuration]]:
        return [(f, self.fire(c, f, check=False)) for f in self.enabled(c)]

    def macro_step(self, c: Configuration) -> list[Configuration]:
        return [s for _, s in self.successors(c)]

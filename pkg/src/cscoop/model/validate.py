"""Structural invariants of configurations, reported as readable diagnostics."""

from __future__ import annotations

from typing import Optional

from ..compiler.ir import Program
from .config import Configuration, Ref


def validate(c: Configuration, program: Optional[Program] = None) -> list[str]:
    """Return one message per violated invariant; empty means well-formed.

    With ``program`` also check frames against their method graphs."""
    out: list[str] = []

    def check_value(v, where: str) -> None:
        if isinstance(v, Ref):
            o = c.objs.get(v.obj)
            if o is None or v.proc not in c.procs:
                out.append(f"unresolved reference {v} in {where}")
            elif o.handler != v.proc:
                out.append(f"reference {v} in {where} disagrees with handler {o.handler}")
        elif v is not None and not isinstance(v, int):
            out.append(f"bad value {v!r} in {where}")

    if c.root not in c.procs:
        out.append(f"root processor {c.root} missing")

    for pid, p in c.procs.items():
        if p.pid != pid:
            out.append(f"processor {pid}: id mismatch {p.pid}")
        if p.locked_by is not None:
            if p.locked_by not in c.procs:
                out.append(f"processor {pid}: unresolved locker {p.locked_by}")
            elif c.procs[p.locked_by].holds.get(pid, 0) < 1:
                out.append(f"processor {pid}: locked by {p.locked_by} which does not hold it")
        lockers = [q for q, other in c.procs.items() if other.holds.get(pid, 0) >= 1]
        if len(lockers) > 1:
            out.append(f"processor {pid}: multiple lockers {sorted(lockers)}")
        elif lockers and p.locked_by != lockers[0]:
            out.append(f"processor {pid}: held by {lockers[0]} but locked_by is {p.locked_by}")
        for q, n in p.holds.items():
            if q == pid:
                out.append(f"processor {pid}: holds itself")
            if n < 1:
                out.append(f"processor {pid}: non-positive hold count on {q}")
            if q not in c.procs:
                out.append(f"processor {pid}: holds unresolved processor {q}")
        if p.waiting is not None:
            if not p.stack:
                out.append(f"processor {pid}: waiting while idle")
            if p.waiting.callee not in c.procs:
                out.append(f"processor {pid}: waits on unresolved processor {p.waiting.callee}")
        for oid in p.handled:
            o = c.objs.get(oid)
            if o is None:
                out.append(f"processor {pid}: handles unresolved object {oid}")
            elif o.handler != pid:
                out.append(f"processor {pid}: handles object {oid} owned by {o.handler}")
        for i, f in enumerate(p.stack):
            where = f"processor {pid} frame {i}"
            if f.target not in c.objs:
                out.append(f"{where}: unresolved target object {f.target}")
            elif c.objs[f.target].handler != pid:
                out.append(f"{where}: target object {f.target} handled elsewhere")
            if f.caller is not None and f.caller not in c.procs:
                out.append(f"{where}: unresolved caller {f.caller}")
            for name, v in f.vars.items():
                check_value(v, f"{where} var {name}")
            if program is not None:
                g = program.methods.get(f.method)
                if g is None:
                    out.append(f"{where}: unknown method {f.method}")
                    continue
                if f.state not in g.states:
                    out.append(f"{where}: state {f.state} not in {f.method}")
                expected = {n for n, _ in g.formals} | {n for n, _ in g.locals}
                if set(f.vars) != expected:
                    out.append(f"{where}: bound variables {sorted(f.vars)} differ from {sorted(expected)}")
        requests = list(p.queue) + [r for _, r in p.outbox]
        for r in requests:
            where = f"processor {pid} request {r.method}"
            if r.target not in c.objs:
                out.append(f"{where}: unresolved target object {r.target}")
            for a in r.args:
                check_value(a, where)
            if r.caller is not None and r.caller not in c.procs:
                out.append(f"{where}: unresolved caller {r.caller}")
            if program is not None:
                g = program.methods.get(r.method)
                if g is None:
                    out.append(f"{where}: unknown method")
                else:
                    if len(r.args) != len(g.formals):
                        out.append(f"{where}: arity {len(r.args)} differs from {len(g.formals)}")
                    if (r.caller is not None) != (g.kind == "query"):
                        out.append(f"{where}: caller present iff query violated")
        for dst, _ in p.outbox:
            if dst not in c.procs:
                out.append(f"processor {pid}: delivery to unresolved processor {dst}")

    for oid, o in c.objs.items():
        if o.handler not in c.procs:
            out.append(f"object {oid}: unresolved handler {o.handler}")
        elif oid not in c.procs[o.handler].handled:
            out.append(f"object {oid}: missing from handler {o.handler}")
        for name, v in o.attrs.items():
            check_value(v, f"object {oid} attribute {name}")
        if program is not None:
            layout = program.classes.get(o.cls)
            if layout is None:
                out.append(f"object {oid}: unknown class {o.cls}")
            elif set(o.attrs) != {n for n, _ in layout}:
                out.append(f"object {oid}: attributes differ from class {o.cls}")
    return out


def graph_size(c: Configuration) -> tuple[int, int]:
    """Node and edge counts of the configuration viewed as a graph.

    Nodes are processors, objects, frames and requests; edges are handler,
    lock, stack, queue, target and reference links."""
    nodes = len(c.procs) + len(c.objs)
    edges = len(c.objs)  # handler
    for p in c.procs.values():
        nodes += len(p.stack) + len(p.queue) + len(p.outbox)
        edges += len(p.holds) + len(p.stack) * 2 + (len(p.queue) + len(p.outbox)) * 2
        edges += 1 if p.waiting is not None else 0
        for f in p.stack:
            edges += sum(isinstance(v, Ref) for v in f.vars.values())
        for r in list(p.queue) + [r for _, r in p.outbox]:
            edges += sum(isinstance(v, Ref) for v in r.args)
    for o in c.objs.values():
        edges += sum(isinstance(v, Ref) for v in o.attrs.values())
    return nodes, edges

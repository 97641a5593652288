"""Renaming-invariant serialization of configurations.

Processor and object ids are allocation artifacts, so two configurations
that differ only by a consistent renaming must map to the same key. Ids are
renumbered in breadth-first discovery order starting at the root processor.
Inside a processor the walk visits stack frames bottom to top (target
object, then variables), then queued requests, pending deliveries, the
processor a query waits for, and finally its handled objects ordered by
class. An object leads to its handler and to its attributes. Variables and
attributes are visited in declaration order, which is fixed per method and
per class.

Whatever the walk never reaches is garbage. Garbage is numbered afterwards:
each round starts a walk from the unnumbered processor whose reachable part
serializes smallest, so the result stays independent of raw ids.

:func:`canonical_form` returns the serialization as a flat tuple (cheap to
hash and compare); :func:`canonical_key` encodes the same items as
length-prefixed, tagged big-endian bytes.

Each processor and object record caches a *fragment*: its serialization
with id positions left open, plus the ids it leads to in walk order.
Records are shared between a configuration and its successors, so most
fragments are reused across a whole exploration.
"""

from __future__ import annotations

import struct
from collections import deque

from .config import Configuration, ObjectRec, Processor, Ref

_Q = struct.Struct(">q")
_I = struct.Struct(">I")


class _Fragment:
    __slots__ = ("template", "slots", "visit", "raw", "signature")

    def __init__(self):
        self.template: list = []
        self.slots: list[tuple[int, bool, int]] = []  # (index, is processor, raw id)
        self.visit: list[tuple[bool, int]] = []  # walk order, (is processor, raw id)
        self.raw = None
        self.signature = None

    def with_raw_ids(self) -> tuple:
        items = self.template[:]
        for i, _, raw in self.slots:
            items[i] = raw
        return tuple(items)

    def lit(self, x) -> None:
        self.template.append(x)

    def pid(self, raw: int, walk: bool = True) -> None:
        self.slots.append((len(self.template), True, raw))
        self.template.append(None)
        if walk:
            self.visit.append((True, raw))

    def oid(self, raw: int, walk: bool = True) -> None:
        self.slots.append((len(self.template), False, raw))
        self.template.append(None)
        if walk:
            self.visit.append((False, raw))

    def value(self, v) -> None:
        if v is None:
            self.template.append("V")
        elif v is True:
            self.template.append("T")
        elif v is False:
            self.template.append("F")
        elif type(v) is int:
            self.template.append("I")
            self.template.append(v)
        else:
            # The walk reaches the processor through the object's handler.
            self.template.append("R")
            self.pid(v.proc, walk=False)
            self.oid(v.obj)

    def request(self, r) -> None:
        self.lit(r.method)
        self.oid(r.target)
        self.lit(len(r.args))
        for a in r.args:
            self.value(a)
        if r.caller is None:
            self.lit(-1)
        else:
            self.pid(r.caller)

    def emit(self, out: list, pmap: dict, omap: dict) -> None:
        items = self.template[:]
        pget, oget = pmap.get, omap.get
        for i, is_proc, raw in self.slots:
            items[i] = pget(raw, -2) if is_proc else oget(raw, -2)
        out.extend(items)


def _proc_fragment(c: Configuration, p: Processor) -> _Fragment:
    fr = p.canon
    if fr is not None:
        return fr
    fr = _Fragment()
    fr.lit("P")
    # Lock links are not followed by the walk; they may point outside a
    # garbage component still being numbered and then get a placeholder.
    if p.locked_by is None:
        fr.lit(-1)
    else:
        fr.pid(p.locked_by, walk=False)
    fr.lit(len(p.stack))
    for f in p.stack:
        fr.lit(f.method)
        fr.lit(f.state)
        fr.oid(f.target)
        if f.ret is None:
            fr.lit("-")
        else:
            fr.lit(f.ret.kind)
            fr.lit(f.ret.name)
        fr.value(f.eval)
        fr.lit(len(f.vars))
        for name, v in f.vars.items():
            fr.lit(name)
            fr.value(v)
        if f.caller is None:
            fr.lit(-1)
        else:
            fr.pid(f.caller)
    fr.lit(len(p.queue))
    for r in p.queue:
        fr.request(r)
    fr.lit(len(p.outbox))
    for dst, r in p.outbox:
        fr.pid(dst)
        fr.request(r)
    if p.waiting is None:
        fr.lit("-")
    else:
        fr.lit("W")
        fr.lit(p.waiting.result.kind)
        fr.lit(p.waiting.result.name)
        fr.pid(p.waiting.callee)
    # Objects only reachable through their handler (e.g. the root object of
    # an idle root processor) come last, by class.
    for oid in sorted(p.handled, key=lambda o: (c.objs[o].cls, o)):
        fr.visit.append((False, oid))
    p.canon = fr
    return fr


def _obj_fragment(o: ObjectRec) -> _Fragment:
    fr = o.canon
    if fr is not None:
        return fr
    fr = _Fragment()
    fr.lit("O")
    fr.lit(o.cls)
    fr.pid(o.handler)
    fr.lit(len(o.attrs))
    for name, v in o.attrs.items():
        fr.lit(name)
        fr.value(v)
    o.canon = fr
    return fr


def _emit_proc(out: list, c: Configuration, p: Processor, pmap: dict, omap: dict) -> None:
    _proc_fragment(c, p).emit(out, pmap, omap)
    if p.holds:
        holds = sorted((pmap.get(q, -2), n) for q, n in p.holds.items())
        out.append(len(holds))
        for q, n in holds:
            out.append(q)
            out.append(n)
    else:
        out.append(0)
    out.append(len(p.handled))
    if len(p.handled) == 1:
        for o in p.handled:
            out.append(omap[o])
    else:
        out.extend(sorted(omap[o] for o in p.handled))


class _Walk:
    __slots__ = ("c", "pmap", "omap", "porder", "oorder")

    def __init__(self, c: Configuration):
        self.c = c
        self.pmap: dict[int, int] = {}
        self.omap: dict[int, int] = {}
        self.porder: list[int] = []
        self.oorder: list[int] = []

    def fork(self) -> "_Walk":
        w = _Walk(self.c)
        w.pmap = dict(self.pmap)
        w.omap = dict(self.omap)
        w.porder = list(self.porder)
        w.oorder = list(self.oorder)
        return w

    def run(self, start: int) -> None:
        c = self.c
        procs, objs = c.procs, c.objs
        pmap, omap = self.pmap, self.omap
        porder, oorder = self.porder, self.oorder
        todo = deque()
        pmap[start] = len(pmap)
        porder.append(start)
        todo.append((True, start))
        while todo:
            is_proc, ident = todo.popleft()
            if is_proc:
                visit = _proc_fragment(c, procs[ident]).visit
            else:
                visit = _obj_fragment(objs[ident]).visit
            for is_p, raw in visit:
                if is_p:
                    if raw not in pmap:
                        pmap[raw] = len(pmap)
                        porder.append(raw)
                        todo.append((True, raw))
                elif raw not in omap:
                    omap[raw] = len(omap)
                    oorder.append(raw)
                    todo.append((False, raw))

    def number(self) -> None:
        c = self.c
        self.run(c.root)
        while len(self.pmap) < len(c.procs):
            rest = [pid for pid in c.procs if pid not in self.pmap]
            if len(rest) > 1:
                sigs = {pid: _local_signature(c, pid) for pid in rest}
                low = min(sigs.values())
                rest = [pid for pid in rest if sigs[pid] == low]
            if len(rest) == 1:
                self.run(rest[0])
                continue
            best = None
            for pid in rest:
                trial = self.fork()
                start_p, start_o = len(trial.porder), len(trial.oorder)
                trial.run(pid)
                out: list = []
                for q in trial.porder[start_p:]:
                    _emit_proc(out, c, c.procs[q], trial.pmap, trial.omap)
                for o in trial.oorder[start_o:]:
                    _obj_fragment(c.objs[o]).emit(out, trial.pmap, trial.omap)
                sig = tuple(_sortable(x) for x in out)
                if best is None or sig < best[0]:
                    best = (sig, trial)
            trial = best[1]
            self.pmap, self.omap = trial.pmap, trial.omap
            self.porder, self.oorder = trial.porder, trial.oorder


def _sortable(x):
    # Items mix ints, strings and method keys; make them mutually orderable.
    return (0, x, "") if type(x) is int else (1, 0, str(x))


def _local_signature(c: Configuration, pid: int) -> tuple:
    """Id-free summary of a processor used to order garbage roots."""
    p = c.procs[pid]
    fr = _proc_fragment(c, p)
    if fr.signature is None:
        fr.signature = (
            tuple((str(f.method), f.state) for f in p.stack),
            tuple(str(r.method) for r in p.queue),
            tuple(sorted(c.objs[o].cls for o in p.handled)),
            len(p.holds),
            p.locked_by is None,
        )
    return fr.signature


def raw_form(c: Configuration) -> tuple:
    """Serialization keeping raw ids: equal raw forms imply equal canonical
    forms, so it is a cheap first-level index for deduplication."""
    procs = []
    for p in c.procs.values():
        fr = _proc_fragment(c, p)
        if fr.raw is None:
            fr.raw = (p.pid, fr.with_raw_ids(), tuple(sorted(p.holds.items())), p.handled)
        procs.append(fr.raw)
    objs = []
    for o in c.objs.values():
        fr = _obj_fragment(o)
        if fr.raw is None:
            fr.raw = (o.oid, fr.with_raw_ids())
        objs.append(fr.raw)
    return (c.root, c.errors, tuple(procs), tuple(objs))


def canonical_numbering(c: Configuration) -> tuple[dict[int, int], dict[int, int]]:
    """Canonical processor and object numbering (raw id to canonical index)."""
    w = _Walk(c)
    w.number()
    return w.pmap, w.omap


def canonical_form(c: Configuration) -> tuple:
    w = _Walk(c)
    w.number()
    pmap, omap = w.pmap, w.omap
    out: list = ["C", len(c.procs), len(c.objs)]
    if c.errors:
        errors = sorted((e.kind, pmap[e.pid], e.detail) for e in c.errors)
        out.append(len(errors))
        for kind, pid, detail in errors:
            out.append(kind)
            out.append(pid)
            out.append(detail)
    else:
        out.append(0)
    procs = c.procs
    for pid in w.porder:
        _emit_proc(out, c, procs[pid], pmap, omap)
    objs = c.objs
    for oid in w.oorder:
        _obj_fragment(objs[oid]).emit(out, pmap, omap)
    return tuple(out)


def encode(form: tuple) -> bytes:
    """Tagged, length-prefixed, big-endian byte encoding of a canonical form."""
    buf = bytearray()
    for x in form:
        if type(x) is int:
            buf += b"i"
            buf += _Q.pack(x)
        elif type(x) is str:
            b = x.encode()
            buf += b"s"
            buf += _I.pack(len(b))
            buf += b
        else:  # method key
            buf += b"m"
            for part in x:
                b = part.encode()
                buf += _I.pack(len(b))
                buf += b
    return bytes(buf)


def canonical_key(c: Configuration) -> bytes:
    return encode(canonical_form(c))

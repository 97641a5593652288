"""Independent reference implementations used to cross-check the explorer.

``enumerate_configs`` walks every interleaving recursively with no
deduplication at all. It only stops a path when the exact configuration
(raw ids included) repeats on that path, so it is only suitable for tiny
programs. ``to_graph`` turns a configuration into a labelled networkx graph
so that isomorphism can be decided by VF2 instead of by canonical keys.
"""

from __future__ import annotations

import networkx as nx

from cscoop.compiler import initial_configuration
from cscoop.model.config import Configuration, Ref
from cscoop.semantics import Semantics

MAX_DEPTH = 200


def snapshot(c: Configuration) -> tuple:
    """Exact structural value of a configuration, raw ids included."""
    procs = tuple(
        (pid, p.locked_by, tuple(sorted(p.holds.items())), p.queue, p.outbox, p.waiting,
         tuple(sorted(p.handled)),
         tuple((f.method, f.state, tuple(f.vars.items()), f.target, f.caller, f.ret, f.eval) for f in p.stack))
        for pid, p in sorted(c.procs.items())
    )
    objs = tuple((oid, o.cls, o.handler, tuple(o.attrs.items())) for oid, o in sorted(c.objs.items()))
    return (c.root, procs, objs, tuple(sorted(c.errors)))


def enumerate_configs(program, queue: str = "fifo") -> list[Configuration]:
    """Every configuration met by a depth-first walk of all interleavings."""
    sem = Semantics(program, queue=queue)
    out: list[Configuration] = []

    def walk(c: Configuration, path: set, depth: int) -> None:
        if depth > MAX_DEPTH:
            raise RecursionError("program too large for the brute-force enumerator")
        out.append(c)
        here = snapshot(c)
        if here in path:
            return
        path.add(here)
        for f in sem.enabled(c):
            walk(sem.fire(c, f), path, depth + 1)
        path.discard(here)

    walk(sem.stabilize(initial_configuration(program)), set(), 0)
    return out


def _plain(v):
    return "REF" if isinstance(v, Ref) else v


def to_graph(c: Configuration) -> nx.DiGraph:
    """Id-free labelled graph of a configuration."""
    g = nx.DiGraph()

    def edge(a, b, label) -> None:
        if g.has_edge(a, b):
            g[a][b]["label"] = g[a][b]["label"] | {label}
        else:
            g.add_edge(a, b, label=frozenset({label}))

    def value_edges(src, prefix, items) -> None:
        for name, v in items:
            if isinstance(v, Ref):
                edge(src, ("O", v.obj), (prefix, name))
                edge(src, ("P", v.proc), (prefix + "_proc", name))

    def request(node, r, kind, index) -> None:
        g.add_node(node, label=(kind, str(r.method), index, tuple(_plain(a) for a in r.args)))
        edge(node, ("O", r.target), "target")
        if r.caller is not None:
            edge(node, ("P", r.caller), "caller")
        value_edges(node, "arg", enumerate(r.args))

    for pid, p in c.procs.items():
        waiting = None if p.waiting is None else tuple(p.waiting.result)
        g.add_node(("P", pid), label=("P", pid == c.root, waiting))
    for oid, o in c.objs.items():
        g.add_node(("O", oid), label=("O", o.cls, tuple((k, _plain(v)) for k, v in o.attrs.items())))
        edge(("O", oid), ("P", o.handler), "handler")
        value_edges(("O", oid), "attr", o.attrs.items())
    for pid, p in c.procs.items():
        for h, n in p.holds.items():
            edge(("P", pid), ("P", h), ("holds", n))
        if p.locked_by is not None:
            edge(("P", p.locked_by), ("P", pid), "locks")
        for oid in p.handled:
            edge(("P", pid), ("O", oid), "handles")
        for i, f in enumerate(p.stack):
            node = ("F", pid, i)
            g.add_node(node, label=("F", str(f.method), f.state, f.ret, f.eval,
                                    tuple((k, _plain(v)) for k, v in f.vars.items())))
            edge(("P", pid), node, ("frame", i))
            edge(node, ("O", f.target), "target")
            if f.caller is not None:
                edge(node, ("P", f.caller), "caller")
            value_edges(node, "var", f.vars.items())
        for i, r in enumerate(p.queue):
            request(("Q", pid, i), r, "queued", i)
            edge(("P", pid), ("Q", pid, i), "queue")
        for i, (dst, r) in enumerate(p.outbox):
            request(("X", pid, i), r, "outgoing", i)
            edge(("P", pid), ("X", pid, i), "outbox")
            edge(("X", pid, i), ("P", dst), "deliver")
        if p.waiting is not None:
            edge(("P", pid), ("P", p.waiting.callee), "waits")
    for i, e in enumerate(sorted(c.errors)):
        g.add_node(("E", i), label=("E", e.kind, e.detail))
        edge(("E", i), ("P", e.pid), "flag")
    return g


def _same(a: dict, b: dict) -> bool:
    return a["label"] == b["label"]


def isomorphic(a: Configuration, b: Configuration) -> bool:
    return nx.is_isomorphic(to_graph(a), to_graph(b), node_match=_same, edge_match=_same)


def iso_classes(configs: list[Configuration]) -> list[list[Configuration]]:
    """Partition configurations into isomorphism classes (VF2, bucketed by
    a Weisfeiler-Lehman hash to keep the number of comparisons small)."""
    buckets: dict[str, list[list[tuple[Configuration, nx.DiGraph]]]] = {}
    for c in configs:
        g = to_graph(c)
        for n, d in g.nodes(data=True):
            d["wl"] = repr(d["label"])
        for _, _, d in g.edges(data=True):
            d["wl"] = repr(sorted(map(repr, d["label"])))
        h = nx.weisfeiler_lehman_graph_hash(g, node_attr="wl", edge_attr="wl")
        for cls in buckets.setdefault(h, []):
            if nx.is_isomorphic(cls[0][1], g, node_match=_same, edge_match=_same):
                cls.append((c, g))
                break
        else:
            buckets[h].append([(c, g)])
    return [[c for c, _ in cls] for group in buckets.values() for cls in group]

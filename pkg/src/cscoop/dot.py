"""Graphviz DOT rendering of programs, configurations and state spaces."""

from __future__ import annotations

from .compiler import ir
from .compiler.ir import MethodGraph, Program
from .model.config import Configuration, Ref


def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _action_label(a) -> str:
    t = type(a)
    name = ir.action_name(a)
    if t is ir.Lock or t is ir.Unlock:
        return f"{name} {{{', '.join(a.targets)}}}" + (" when ..." if t is ir.Lock and a.guard else "")
    if t in (ir.Command, ir.Query, ir.LocalCall):
        target = "Current" if a.target is None else str(a.target)
        return f"{name} {target}.{a.method.name}"
    if t is ir.Assign or t is ir.CreateSeparate or t is ir.CreateLocal:
        return f"{name} {a.target}"
    if t is ir.Branch:
        return f"{name} [{'true' if a.when else 'false'}]"
    if t is ir.Noop and a.note:
        return f"{name} {a.note}"
    return name


def method_dot(g: MethodGraph) -> str:
    lines = [f"digraph {_q(g.key)} {{", "  rankdir=TB;"]
    for s in sorted(g.states):
        shape = "doublecircle" if s in g.finals else "circle"
        style = ", style=bold" if s == g.init else ""
        lines.append(f"  s{s} [label={_q(s)}, shape={shape}{style}];")
    for e in g.edges:
        lines.append(f"  s{e.src} -> s{e.dst} [label={_q(_action_label(e.action))}];")
    lines.append("}")
    return "\n".join(lines)


def program_dot(program: Program) -> str:
    """One digraph per method graph, in one document."""
    return "\n\n".join(method_dot(g) for g in program.methods.values()) + "\n"


def configuration_dot(c: Configuration) -> str:
    lines = ["digraph configuration {", "  node [fontname=monospace];"]
    for pid, p in c.procs.items():
        label = f"P{pid} {p.status}"
        if p.stack:
            label += "\n" + "\n".join(f"{f.method}@{f.state}" for f in reversed(p.stack))
        if p.queue:
            label += f"\nqueue: {', '.join(str(r.method) for r in p.queue)}"
        lines.append(f"  p{pid} [shape=box, label={_q(label)}];")
    for oid, o in c.objs.items():
        fields = "\n".join(f"{k} = {_fmt(v)}" for k, v in o.attrs.items())
        label = f"{o.cls}#{oid}" + (f"\n{fields}" if fields else "")
        lines.append(f"  o{oid} [shape=ellipse, label={_q(label)}];")
        lines.append(f"  o{oid} -> p{o.handler} [label=handler, style=dashed];")
    for pid, p in c.procs.items():
        for h in sorted(p.holds):
            lines.append(f"  p{pid} -> p{h} [label=lock, color=blue];")
        if p.waiting is not None:
            lines.append(f"  p{pid} -> p{p.waiting.callee} [label=waits_for, color=gray];")
    for e in sorted(c.errors):
        lines.append(f"  err_{e.kind}_{e.pid} [shape=octagon, color=red, label={_q(e.kind + ' ' + e.detail)}];")
        lines.append(f"  err_{e.kind}_{e.pid} -> p{e.pid} [color=red];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if v is None:
        return "Void"
    if isinstance(v, Ref):
        return f"#{v.obj}@P{v.proc}"
    if isinstance(v, bool):
        return "True" if v else "False"
    return str(v)


def space_dot(space) -> str:
    """The explored state space; violating states are filled red and
    labelled with their violation kinds."""
    lines = ["digraph statespace {", "  node [shape=circle, fontsize=10];"]
    for sid in range(len(space.configs)):
        vs = space.violations.get(sid)
        attrs = [f"label={_q(sid)}"]
        if sid == 0:
            attrs.append("shape=doublecircle")
        if vs:
            kinds = ",".join(sorted({v.kind for v in vs}))
            attrs = [f"label={_q(f'{sid} {kinds}')}", "style=filled", "fillcolor=red", "violation=true"]
        lines.append(f"  s{sid} [{', '.join(attrs)}];")
    for src, f, dst in space.transitions:
        info = space.sem.describe(f)
        lines.append(f"  s{src} -> s{dst} [label={_q(f'P{f.pid} {info.action}')}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(obj) -> str:
    """DOT document for a Program, a Configuration or a StateSpace."""
    if isinstance(obj, Program):
        return program_dot(obj)
    if isinstance(obj, Configuration):
        return configuration_dot(obj)
    return space_dot(obj)

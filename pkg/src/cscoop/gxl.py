"""GXL export and import of configurations.

The document holds one directed graph. Node types:

* ``Processor`` (attr ``pid``)
* ``Object`` (attrs ``oid``, ``cls``, then one ``a:<name>`` attr per attribute)
* ``Frame`` (attrs ``method``, ``ret``, ``eval``, then ``v:<name>`` per variable)
* ``ControlState`` (attrs ``method``, ``state``)
* ``Request`` (attrs ``method``, ``args``)
* ``Error`` (attrs ``kind``, ``detail``)

Edge types: ``handler`` (object to processor), ``lock`` (holder to locked
processor, attr ``count``), ``frame`` (processor to frame, attr ``index``),
``target`` (frame or request to object), ``current_state`` (frame to
control state), ``caller`` (frame or request to the querying processor),
``queue`` and ``outbox`` (processor to request, attr ``index``),
``deliver_to`` (outbox request to destination), ``waits_for`` (processor to
callee, attr ``result``) and ``flagged`` (error to processor).

Values: ``<int>``, ``<bool>``, ``<enum>Void</enum>`` and, for references,
``<tup>`` of two locators (processor, object). Attribute and variable attrs
keep their declaration order, so :func:`read_gxl` rebuilds a configuration
with the same canonical key.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Optional

from .compiler.ir import MethKey, VarRef
from .model.config import Configuration, ErrorFlag, Frame, ObjectRec, Processor, Ref, Request, Waiting

XLINK = "http://www.w3.org/1999/xlink"
HREF = f"{{{XLINK}}}href"

ET.register_namespace("xlink", XLINK)


def _value(v) -> ET.Element:
    if v is None:
        el = ET.Element("enum")
        el.text = "Void"
    elif v is True or v is False:
        el = ET.Element("bool")
        el.text = "true" if v else "false"
    elif type(v) is int:
        el = ET.Element("int")
        el.text = str(v)
    else:
        el = ET.Element("tup")
        ET.SubElement(el, "locator", {HREF: f"#p{v.proc}"})
        ET.SubElement(el, "locator", {HREF: f"#o{v.obj}"})
    return el


def _attr(parent: ET.Element, name: str, value) -> None:
    a = ET.SubElement(parent, "attr", name=name)
    if isinstance(value, str):
        ET.SubElement(a, "string").text = value
    elif isinstance(value, ET.Element):
        a.append(value)
    else:
        a.append(_value(value))


def _varref(r: Optional[VarRef]) -> str:
    return "-" if r is None else f"{r.kind}:{r.name}"


class _Writer:
    def __init__(self) -> None:
        self.root = ET.Element("gxl")
        self.graph = ET.SubElement(self.root, "graph", id="configuration", edgeids="true",
                                   edgemode="directed")
        self.edges = 0

    def node(self, ident: str, kind: str) -> ET.Element:
        n = ET.SubElement(self.graph, "node", id=ident)
        ET.SubElement(n, "type", {HREF: f"#{kind}"})
        return n

    def edge(self, src: str, dst: str, kind: str, **attrs) -> None:
        e = ET.SubElement(self.graph, "edge", id=f"e{self.edges}", to=dst)
        e.set("from", src)
        self.edges += 1
        ET.SubElement(e, "type", {HREF: f"#{kind}"})
        for k, v in attrs.items():
            _attr(e, k, v)

    def request(self, ident: str, r: Request) -> None:
        n = self.node(ident, "Request")
        _attr(n, "method", str(r.method))
        args = ET.Element("seq")
        for a in r.args:
            args.append(_value(a))
        _attr(n, "args", args)
        self.edge(ident, f"o{r.target}", "target")
        if r.caller is not None:
            self.edge(ident, f"p{r.caller}", "caller")


def to_gxl(c: Configuration) -> ET.ElementTree:
    w = _Writer()
    g = w.graph
    _attr(g, "root", c.root)
    _attr(g, "next_pid", c.next_pid)
    _attr(g, "next_oid", c.next_oid)
    for pid, p in c.procs.items():
        _attr(w.node(f"p{pid}", "Processor"), "pid", pid)
    for oid, o in c.objs.items():
        n = w.node(f"o{oid}", "Object")
        _attr(n, "oid", oid)
        _attr(n, "cls", o.cls)
        for name, v in o.attrs.items():
            _attr(n, f"a:{name}", v)
        w.edge(f"o{oid}", f"p{o.handler}", "handler")
    for pid, p in c.procs.items():
        src = f"p{pid}"
        for h, n in sorted(p.holds.items()):
            w.edge(src, f"p{h}", "lock", count=n)
        for i, f in enumerate(p.stack):
            fid = f"f{pid}_{i}"
            n = w.node(fid, "Frame")
            _attr(n, "method", str(f.method))
            _attr(n, "ret", _varref(f.ret))
            if f.eval is not None:
                _attr(n, "eval", f.eval)
            for name, v in f.vars.items():
                _attr(n, f"v:{name}", v)
            s = w.node(f"s{pid}_{i}", "ControlState")
            _attr(s, "method", str(f.method))
            _attr(s, "state", f.state)
            w.edge(src, fid, "frame", index=i)
            w.edge(fid, f"s{pid}_{i}", "current_state")
            w.edge(fid, f"o{f.target}", "target")
            if f.caller is not None:
                w.edge(fid, f"p{f.caller}", "caller")
        for i, r in enumerate(p.queue):
            rid = f"q{pid}_{i}"
            w.request(rid, r)
            w.edge(src, rid, "queue", index=i)
        for i, (dst, r) in enumerate(p.outbox):
            rid = f"x{pid}_{i}"
            w.request(rid, r)
            w.edge(src, rid, "outbox", index=i)
            w.edge(rid, f"p{dst}", "deliver_to")
        if p.waiting is not None:
            w.edge(src, f"p{p.waiting.callee}", "waits_for", result=_varref(p.waiting.result))
    for i, e in enumerate(sorted(c.errors)):
        n = w.node(f"err{i}", "Error")
        _attr(n, "kind", e.kind)
        _attr(n, "detail", e.detail)
        w.edge(f"err{i}", f"p{e.pid}", "flagged")
    ET.indent(w.root)
    return ET.ElementTree(w.root)


def export_gxl(c: Configuration) -> str:
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(to_gxl(c).getroot(), encoding="unicode") + "\n"


def write_gxl(c: Configuration, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(export_gxl(c))


# ---------------------------------------------------------------- reading

def _ident(href: str) -> int:
    return int(href.lstrip("#")[1:])


def _read_value(el: ET.Element):
    tag = el.tag
    if tag == "enum":
        return None
    if tag == "bool":
        return el.text == "true"
    if tag == "int":
        return int(el.text)
    if tag == "tup":
        p, o = el.findall("locator")
        return Ref(_ident(p.get(HREF)), _ident(o.get(HREF)))
    if tag == "string":
        return el.text or ""
    if tag == "seq":
        return tuple(_read_value(x) for x in el)
    raise ValueError(f"unexpected GXL value <{tag}>")


def _attrs(el: ET.Element) -> dict:
    return {a.get("name"): _read_value(a[0]) for a in el.findall("attr")}


def _meth(s: str) -> MethKey:
    cls, _, name = s.partition(".")
    return MethKey(cls, name)


def _read_varref(s: str) -> Optional[VarRef]:
    if s == "-":
        return None
    kind, _, name = s.partition(":")
    return VarRef(kind, name)


def _type(el: ET.Element) -> str:
    return el.find("type").get(HREF).lstrip("#")


def from_gxl(tree: ET.ElementTree | ET.Element) -> Configuration:
    root = tree.getroot() if isinstance(tree, ET.ElementTree) else tree
    g = root.find("graph")
    gattrs = _attrs(g)
    nodes = {n.get("id"): n for n in g.findall("node")}
    out: dict[str, list[tuple[str, str, dict]]] = {}
    for e in g.findall("edge"):
        out.setdefault(e.get("from"), []).append((_type(e), e.get("to"), _attrs(e)))

    def edges(src: str, kind: str) -> list[tuple[str, dict]]:
        return [(dst, a) for k, dst, a in out.get(src, ()) if k == kind]

    def one(src: str, kind: str) -> Optional[str]:
        found = edges(src, kind)
        return found[0][0] if found else None

    def request(rid: str) -> Request:
        a = _attrs(nodes[rid])
        caller = one(rid, "caller")
        return Request(_meth(a["method"]), _ident(one(rid, "target")), a["args"],
                       None if caller is None else _ident(caller))

    procs: dict[int, Processor] = {}
    objs: dict[int, ObjectRec] = {}
    handled: dict[int, set] = {}
    for ident, n in nodes.items():
        if _type(n) == "Object":
            a = _attrs(n)
            handler = _ident(one(ident, "handler"))
            attrs = {k[2:]: v for k, v in a.items() if k.startswith("a:")}
            objs[a["oid"]] = ObjectRec(a["oid"], a["cls"], handler, attrs)
            handled.setdefault(handler, set()).add(a["oid"])
    for ident, n in nodes.items():
        if _type(n) != "Processor":
            continue
        pid = _attrs(n)["pid"]
        p = Processor(pid, handled=frozenset(handled.get(pid, ())))
        for dst, a in edges(ident, "lock"):
            p.holds[_ident(dst)] = a["count"]
        frames = sorted(edges(ident, "frame"), key=lambda x: x[1]["index"])
        for fid, _ in frames:
            a = _attrs(nodes[fid])
            state = _attrs(nodes[one(fid, "current_state")])["state"]
            caller = one(fid, "caller")
            fvars = {k[2:]: v for k, v in a.items() if k.startswith("v:")}
            p.stack.append(Frame(_meth(a["method"]), state, fvars, _ident(one(fid, "target")),
                                 None if caller is None else _ident(caller),
                                 _read_varref(a["ret"]), a.get("eval")))
        p.queue = tuple(request(r) for r, _ in sorted(edges(ident, "queue"), key=lambda x: x[1]["index"]))
        p.outbox = tuple((_ident(one(r, "deliver_to")), request(r))
                         for r, _ in sorted(edges(ident, "outbox"), key=lambda x: x[1]["index"]))
        waits = edges(ident, "waits_for")
        if waits:
            dst, a = waits[0]
            p.waiting = Waiting(_ident(dst), _read_varref(a["result"]))
        procs[pid] = p
    for p in procs.values():
        for h in p.holds:
            procs[h].locked_by = p.pid
    errors = set()
    for ident, n in nodes.items():
        if _type(n) == "Error":
            a = _attrs(n)
            errors.add(ErrorFlag(a["kind"], _ident(one(ident, "flagged")), a["detail"]))
    return Configuration(dict(sorted(procs.items())), dict(sorted(objs.items())), gattrs["root"],
                         gattrs["next_pid"], gattrs["next_oid"], frozenset(errors))


def read_gxl(path_or_text: str) -> Configuration:
    """Parse a document produced by :func:`export_gxl` (path or XML text)."""
    if path_or_text.lstrip().startswith("<"):
        return from_gxl(ET.fromstring(path_or_text))
    return from_gxl(ET.parse(path_or_text))

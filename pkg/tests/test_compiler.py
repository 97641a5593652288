from collections import Counter

import pytest
from conftest import compile_text

from cscoop import benchmarks
from cscoop.compiler import initial_configuration, ir, lower_method
from cscoop.compiler.ir import MethKey
from cscoop.explorer import BoundReached, explore
from cscoop.frontend import CompileError, SourceUnit, analyze
from cscoop.model import canonical_key


def actions(g):
    return [type(e.action) for e in g.edges]


def lock_sets(g) -> dict[int, Counter]:
    """Held lock targets at every control state, by graph search; fails if
    two paths reach a state with different holdings."""
    held = {g.init: Counter()}
    todo = [g.init]
    while todo:
        s = todo.pop()
        for e in g.outgoing(s):
            h = Counter(held[s])
            a = e.action
            if isinstance(a, ir.Lock):
                h.update(a.targets)
            elif isinstance(a, ir.Unlock):
                h.subtract(a.targets)
                assert min(h.values(), default=0) >= 0
            h = +h
            if e.dst in held:
                assert held[e.dst] == h, f"{g.key}: inconsistent locks at state {e.dst}"
            else:
                held[e.dst] = h
                todo.append(e.dst)
    return held


def test_eat_locks_both_forks_at_once():
    p = benchmarks.load("dpe")
    g = p.methods[MethKey("PHILOSOPHER", "eat")]
    first = g.outgoing(g.init)
    assert len(first) == 1 and first[0].action == ir.Lock(("left", "right"))
    last = [e for e in g.edges if e.dst in g.finals]
    assert all(e.action == ir.Unlock(("left", "right")) for e in last)


def test_empty_method_is_one_noop():
    g = benchmarks.load("dpe").methods[MethKey("FORK", "make")]
    assert len(g.edges) == 1
    e = g.edges[0]
    assert (e.src, e.dst in g.finals, type(e.action)) == (g.init, True, ir.Noop)


def test_bad_eat_splits_acquisition():
    p = benchmarks.load("dpb")
    bad = p.methods[MethKey("PHILOSOPHER", "bad_eat")]
    assert ir.Lock not in actions(bad)
    assert ir.LocalCall in actions(bad)
    left = p.methods[MethKey("PHILOSOPHER", "pickup_left_then_right")]
    assert left.outgoing(left.init)[0].action == ir.Lock(("left",))
    right = p.methods[MethKey("PHILOSOPHER", "pickup_right")]
    assert right.outgoing(right.init)[0].action == ir.Lock(("right",))


def test_loop_lowering():
    g = benchmarks.load("dpe").methods[MethKey("PHILOSOPHER", "live")]
    guards = [e for e in g.edges if isinstance(e.action, ir.Branch)]
    assert {e.action.when for e in guards} == {True, False}
    assert all(e.src == guards[0].src for e in guards)
    exit_ = next(e for e in guards if e.action.when)
    assert exit_.dst in g.finals
    cond = exit_.action.cond
    assert cond == ir.BinOp("<", ir.Read(ir.VarRef("attr", "times_to_eat")), ir.Const(1))
    body = next(e for e in guards if not e.action.when)
    assert isinstance(g.outgoing(body.dst)[0].action, ir.LocalCall)


def test_constant_guard_loop_is_well_formed():
    p = compile_text("class A root create make feature make do from until True loop make end end end")
    g = p.methods[MethKey("A", "make")]
    assert g.init in g.states and g.finals


def test_nonterminating_loop_reaches_bound():
    p = compile_text("class A root create make feature make do from until False loop end end end")
    space, verdict = explore(p, bound=100)
    # The spin collapses to one state under deduplication, so exploration
    # completes; the depth bound is only reached when states keep changing.
    assert len(space) <= 2
    p = compile_text("""
class A root create make feature
  n: INTEGER
  make do from until False loop n := n + 1 end end
end""")
    space, verdict = explore(p, bound=100)
    assert isinstance(verdict, BoundReached)
    assert max(space.depth) == 100


def test_program_methods():
    p = benchmarks.load("dpe")
    assert {MethKey("PHILOSOPHER", "live"), MethKey("PHILOSOPHER", "eat"), MethKey("APPLICATION", "make")} <= set(p.methods)
    p = benchmarks.load("dpb")
    assert {MethKey("PHILOSOPHER", n) for n in ("bad_eat", "pickup_left_then_right", "pickup_right")} <= set(p.methods)


def test_single_empty_root():
    p = compile_text("class A root create make feature make do end end")
    assert [k for k, g in p.methods.items() if not g.synthetic] == [MethKey("A", "make")]


def test_missing_make():
    with pytest.raises(CompileError, match="make"):
        compile_text("class A root feature go do end end")


def test_require_guards_entry_lock():
    p = benchmarks.load("pc")
    g = p.methods[MethKey("CONSUMER", "consume")]
    lock = g.outgoing(g.init)[0].action
    assert lock.targets == ("b",) and lock.guard is not None


def test_postcheck_only_when_enabled():
    key = MethKey("PRODUCER", "produce")
    assert ir.PostCheck not in actions(benchmarks.load("pc").methods[key])
    g = benchmarks.load("pc", postconditions=True).methods[key]
    # The ensure clause reads separate targets, so it runs before the unlock.
    final_in = [e for e in g.edges if e.dst in g.finals]
    assert all(isinstance(e.action, ir.Unlock) for e in final_in)
    for e in final_in:
        before = [d for d in g.edges if d.dst == e.src]
        assert before and all(isinstance(d.action, ir.PostCheck) for d in before)


@pytest.mark.parametrize("name", benchmarks.NAMES)
def test_lock_unlock_pairing(name):
    p = benchmarks.load(name, postconditions=True)
    for g in p.methods.values():
        held = lock_sets(g)
        for f in g.finals:
            if f in held:
                assert not held[f], f"{g.key} ends holding {held[f]}"


def test_lower_method_direct():
    tree, env = analyze(benchmarks.unit("dpe"))
    phil = next(c for c in tree.classes if c.name == "PHILOSOPHER")
    g = lower_method(phil.method("eat"), env, "PHILOSOPHER", tree)
    assert g.key == MethKey("PHILOSOPHER", "eat")
    assert g.kind == "command"


@pytest.mark.parametrize("name", benchmarks.NAMES)
def test_lowering_is_deterministic(name):
    a, b = benchmarks.load(name), benchmarks.load(name)
    assert a.methods == b.methods
    assert canonical_key(initial_configuration(a)) == canonical_key(initial_configuration(b))


def test_initial_configuration():
    p = benchmarks.load("dpe")
    c = initial_configuration(p)
    assert list(c.procs) == [0] and list(c.objs) == [0]
    root = c.procs[0]
    assert root.stack[0].method == MethKey("APPLICATION", "make")
    assert root.stack[0].state == p.methods[p.root].init
    assert root.queue == () and not root.holds and root.locked_by is None
    assert c.objs[0].attrs == {"first_fork": None}


def test_initial_dpe_and_dpb_share_shape():
    a = initial_configuration(benchmarks.load("dpe"))
    b = initial_configuration(benchmarks.load("dpb"))
    assert {o: (r.cls, r.attrs) for o, r in a.objs.items()} == {o: (r.cls, r.attrs) for o, r in b.objs.items()}
    assert [len(p.stack) for p in a.procs.values()] == [len(p.stack) for p in b.procs.values()]
    assert a.procs[0].stack[0].vars == b.procs[0].stack[0].vars


def test_empty_make_one_step_from_terminal():
    p = compile_text("class A root create make feature make do end end")
    space, _ = explore(p)
    assert len(space) == 2 and space.configs[1].is_terminal()


def test_default_attribute_values():
    text = """
class A root create make feature
  n: INTEGER
  b: BOOLEAN
  r: separate A
  make do end
end"""
    c = initial_configuration(compile_text(text))
    assert c.objs[0].attrs == {"n": 0, "b": False, "r": None}


def test_source_unit_positions_reach_actions():
    p = benchmarks.load("dpb")
    g = p.methods[MethKey("PHILOSOPHER", "pickup_left_then_right")]
    assert all(e.pos.path == "dpb.cscoop" and e.pos.line > 0 for e in g.edges)


def test_compile_multiple_units():
    a = SourceUnit("a.cscoop", "class A root create make feature b: separate B make do create b end end")
    b = SourceUnit("b.cscoop", "class B feature end")
    from cscoop.compiler import compile_sources
    p = compile_sources(a, b)
    assert set(p.classes) == {"A", "B"}

import random

import pytest
from conftest import compile_text, start
from micro import QUERY, TWO_WORKERS

from cscoop import benchmarks
from cscoop.compiler import ir
from cscoop.compiler.ir import MethKey
from cscoop.explorer import explore
from cscoop.model import canonical_key, raw_form
from cscoop.model.config import INT_MAX, Request
from cscoop.semantics import DEQUEUE, ContractViolation, Semantics


def run_to_end(text: str, postconditions: bool = False):
    """Run a deterministic single-processor program to completion."""
    sem, c = start(compile_text(text, postconditions=postconditions))
    while (en := sem.enabled(c)):
        assert len(en) == 1
        c = sem.fire(c, en[0])
    return c


def attrs_after(body: str, decls: str = "x, y: INTEGER\n  b: BOOLEAN") -> dict:
    c = run_to_end(f"class A root create make feature\n  {decls}\n  make do {body} end\nend")
    assert not c.errors, c.errors
    return c.objs[0].attrs


def flags_after(body: str, decls: str = "x, y: INTEGER") -> set:
    c = run_to_end(f"class A root create make feature\n  {decls}\n  make do {body} end\nend")
    return {e.kind for e in c.errors}


@pytest.fixture(scope="module")
def dpe2():
    return explore(benchmarks.load("dpe"), checks=())[0]


# ------------------------------------------------------------ evaluation

def test_arithmetic():
    assert attrs_after("x := 1 + 2 * 3")["x"] == 7


def test_guard_value():
    assert attrs_after("x := 0 b := x < 1")["b"] is True


def test_division_truncates_toward_zero():
    a = attrs_after("x := (0 - 7) // 2 y := (0 - 7) \\\\ 2")
    assert (a["x"], a["y"]) == (-3, -1)
    a = attrs_after("x := 7 // (0 - 2) y := 7 \\\\ (0 - 2)")
    assert (a["x"], a["y"]) == (-3, 1)


def test_division_by_zero_flags_runtime_error():
    assert flags_after("x := 1 // y") == {"runtime_error"}


def test_overflow_flags_runtime_error():
    big = str(INT_MAX)
    assert flags_after(f"x := {big} x := x + 1") == {"runtime_error"}


def test_boolean_operators():
    a = attrs_after("b := (True and not False) implies (1 /= 1 or 2 >= 2)")
    assert a["b"] is True


def test_error_state_is_absorbing():
    text = "class A root create make feature x: INTEGER make do x := 1 // x x := 5 end end"
    sem, c = start(compile_text(text))
    c = sem.fire(c, sem.enabled(c)[0])
    assert c.errors and sem.enabled(c) == []
    assert c.objs[0].attrs["x"] == 0


# ------------------------------------------------------------ stabilize

def test_initial_has_one_firing():
    sem, c = start(benchmarks.load("dpe"))
    en = sem.enabled(c)
    assert len(en) == 1 and en[0].pid == 0


def test_stabilize_is_a_fixpoint(dpe2):
    sem = dpe2.sem
    for c in dpe2.configs[:200]:
        again = sem.stabilize(c)
        assert raw_form(again) == raw_form(c)


def test_confluence_under_shuffled_tie_breaks(dpe2):
    program = dpe2.sem.program
    plain = Semantics(program)
    rng = random.Random(2024)
    for c in random.Random(4).sample(dpe2.configs, 150):
        shuffled = Semantics(program, rng=random.Random(rng.random()))
        for f in plain.enabled(c):
            assert canonical_key(plain.fire(c, f)) == canonical_key(shuffled.fire(c, f))


def test_idle_processor_takes_queue_head():
    sem, c = start(compile_text(TWO_WORKERS))
    # Let the root create both workers, then queue two requests by hand.
    while not any(p.pid != 0 for p in c.procs.values()):
        c = sem.fire(c, sem.enabled(c)[0])
    d = c.deep_copy()
    worker = next(p for p in d.procs.values() if p.pid != 0)
    oid = next(iter(worker.handled))
    bump = MethKey("WORKER", "bump")
    worker.queue = (Request(bump, oid, ()), Request(bump, oid, ()))
    s = sem.stabilize(d)
    w = s.procs[worker.pid]
    assert [f.method for f in w.stack] == [bump]
    assert len(w.queue) == 1


def test_command_delivery_and_asynchrony():
    sem, c = start(compile_text(TWO_WORKERS))
    seen = 0
    space, _ = explore(sem.program, checks=())
    for c in space.configs:
        for f in sem.enabled(c):
            e = sem.edge_of(f)
            if e is None or not isinstance(e.action, ir.Command):
                continue
            before = c.procs[f.pid].stack[-1]
            s = sem.fire(c, f)
            after = s.procs[f.pid].stack[-1]
            assert after.vars == before.vars and after.state == e.dst
            assert s.procs[f.pid].outbox == ()
            target = s.procs[f.targets[0]]
            arrived = [r.method for r in target.queue] + [fr.method for fr in target.stack]
            assert e.action.method in arrived
            seen += 1
    assert seen


def test_query_blocks_caller_until_write_back():
    program = compile_text(QUERY)
    space, _ = explore(program, checks=())
    sem = space.sem
    waiting = [c for c in space.configs if c.procs[0].waiting is not None]
    assert waiting
    for c in waiting:
        assert all(f.pid != 0 for f in sem.enabled(c))
    final = next(c for c in space.configs if c.is_terminal())
    assert final.objs[0].attrs["seen"] == 11


def test_eat_lock_is_atomic(dpe2):
    sem = dpe2.sem
    hits = 0
    for c in dpe2.configs:
        for f in sem.enabled(c):
            e = sem.edge_of(f)
            if e is not None and e.action == ir.Lock(("left", "right")):
                s = sem.fire(c, f)
                assert len(f.targets) == 2
                assert all(s.procs[h].locked_by == f.pid for h in f.targets)
                hits += 1
    assert hits


def test_assign_same_value_only_moves_state():
    text = "class A root create make feature x: INTEGER make do x := 0 end end"
    sem, c = start(compile_text(text))
    f = sem.enabled(c)[0]
    s = sem.fire(c, f)
    assert s.objs[0].attrs == c.objs[0].attrs


def test_firing_must_be_enabled():
    sem, c = start(benchmarks.load("dpe"))
    f = sem.enabled(c)[0]
    with pytest.raises(ContractViolation):
        sem.fire(c, f._replace(pid=42))


def test_bag_dequeue_is_an_action():
    program = compile_text(TWO_WORKERS)
    sem = Semantics(program, queue="bag")
    space, _ = explore(program, queue="bag", checks=())
    dequeues = [f for c in space.configs for f in sem.enabled(c) if f.edge == DEQUEUE]
    assert dequeues
    assert sem.describe(dequeues[0]).action == "dequeue"


def test_unknown_queue_discipline():
    with pytest.raises(ValueError):
        Semantics(benchmarks.load("dpe"), queue="lifo")


def test_void_lock_is_disabled_not_fired():
    text = """
class A root create make feature
  w: separate A
  make do go (w) end
  go (x: separate A) do end
end"""
    sem, c = start(compile_text(text))
    c = sem.fire(c, sem.enabled(c)[0])  # the local call into go
    assert isinstance(sem.program.methods[c.procs[0].top.method].outgoing(c.procs[0].top.state)[0].action, ir.Lock)
    assert sem.enabled(c) == [] and not c.is_terminal()


def test_wait_condition_delays_lock():
    space, _ = explore(benchmarks.load("pc", N=1), checks=())
    sem = space.sem
    consume = MethKey("CONSUMER", "consume")
    for c in space.configs:
        for p in c.procs.values():
            top = p.top
            if top is None or top.method != consume or top.state != sem.program.methods[consume].init:
                continue
            buffer = c.objs[top.vars["b"].obj]
            enabled = any(f.pid == p.pid for f in sem.enabled(c))
            if not buffer.attrs["full"]:
                assert not enabled

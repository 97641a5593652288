"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``. The lines are printed past
pytest's capture so they show up without ``-s``. The whole file takes a few
minutes because every benchmark is explored three times.
"""

import random
import time

import pytest
from conftest import compile_text
from micro import FALSE_ENSURE, PROGRAMS, VOID_CALL
from oracle import enumerate_configs
from permute import permute

from cscoop import benchmarks
from cscoop.explorer import CounterexampleFound, Safe, detect_lock_cycle, explore
from cscoop.model import Ref, canonical_key

TIME_LIMIT = 60.0

# (label, benchmark, parameters, expected verdict)
SUITE = [
    ("DPB(2)", "dpb", {"N": 2}, "deadlock"),
    ("DPB(3)", "dpb", {"N": 3}, "deadlock"),
    ("DPE(2)", "dpe", {"N": 2}, "safe"),
    ("DPE(3)", "dpe", {"N": 3}, "safe"),
    ("PC(5)", "pc", {"N": 5}, "safe"),
    ("DS(2,2,2)", "ds", {"POT": 2, "SAVAGES": 2, "HUNGER": 2}, "safe"),
    ("CS", "cs", {}, "safe"),
]

_runs: dict[str, list[tuple]] = {}


def verdict_name(v) -> str:
    if isinstance(v, Safe):
        return "safe"
    if isinstance(v, CounterexampleFound):
        return v.kind
    return type(v).__name__


def summary(label: str) -> tuple:
    """Run one full exploration of a suite entry and keep only its summary."""
    _, name, kw, _ = next(e for e in SUITE if e[0] == label)
    t0 = time.perf_counter()
    space, verdict = explore(benchmarks.load(name, **kw))
    elapsed = time.perf_counter() - t0
    result = (len(space), space.stats.transitions, verdict_name(verdict), elapsed)
    _runs.setdefault(label, []).append(result)
    return result


def first_run(label: str) -> tuple:
    return _runs[label][0] if label in _runs else summary(label)


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail
    return emit


def test_criterion_01_verdicts(report):
    bad, parts = [], []
    for label, _, _, expected in SUITE:
        states, _, got, elapsed = first_run(label)
        parts.append(f"{label}={got} ({states} states, {elapsed:.1f}s)")
        if got != expected or elapsed > TIME_LIMIT:
            bad.append(label)
    report(1, not bad, "; ".join(parts) + (f"; wrong: {bad}" if bad else ""))


def test_criterion_02_two_cycle(report):
    space, verdict = explore(benchmarks.load("dpb", N=2), checks={"deadlock"})
    c = verdict.trace.final
    cycle = detect_lock_cycle(c, space.sem) or []
    ok = len(cycle) == 2
    held = {}
    for pid in cycle:
        fork_locks = [h for h in c.procs[pid].holds if any(c.objs[o].cls == "FORK" for o in c.procs[h].handled)]
        ok &= len(fork_locks) == 1 and any(c.objs[o].cls == "PHILOSOPHER" for o in c.procs[pid].handled)
        held[pid] = fork_locks[0] if fork_locks else None
    for pid in cycle if ok else ():
        # the pending action is a Lock on exactly the fork the other philosopher holds
        top = c.procs[pid].top
        action = space.sem.program.methods[top.method].outgoing(top.state)[0].action
        wanted = {top.vars[name].proc for name in getattr(action, "targets", ())}
        other = next(q for q in cycle if q != pid)
        ok &= type(action).__name__ == "Lock" and wanted == {held[other]}
    ok &= len(set(held.values())) == 2
    report(2, ok, f"DPB(2) final configuration: lock cycle {cycle}, fork lock held by each {held}")


def test_criterion_03_first_dominates(report):
    parts, ok = [], True
    for label, n in (("DPB(2)", 2), ("DPB(3)", 3)):
        first, _ = explore(benchmarks.load("dpb", N=n), first=True)
        full = first_run(label)[0]
        ok &= len(first) <= full
        parts.append(f"{label} first={len(first)} full={full}")
    report(3, ok, "; ".join(parts))


def test_criterion_04_oracle_equivalence(report):
    parts, ok = [], True
    for name in sorted(PROGRAMS):
        program = compile_text(PROGRAMS[name], f"{name}.cscoop", postconditions=True)
        space, _ = explore(program, checks=())
        keys = {canonical_key(c) for c in space.configs}
        brute = {canonical_key(c) for c in enumerate_configs(program)}
        small = len(space) <= 30 and max(len(c.procs) for c in space.configs) <= 3
        ok &= keys == brute and small
        parts.append(f"{name}:{len(keys)}")
    ok &= len(PROGRAMS) >= 5
    report(4, ok, f"{len(PROGRAMS)} micro-programs match the brute-force enumerator ({', '.join(parts)})")


def test_criterion_05_canonical_invariance(report):
    space, _ = explore(benchmarks.load("dpe", N=2))
    rng = random.Random(2024)
    sample = rng.sample(space.configs, 10)
    failures = 0
    for c in sample:
        key = canonical_key(c)
        failures += sum(canonical_key(permute(c, rng)) != key for _ in range(1000))
    report(5, failures == 0, f"{failures} failures over 10 configurations x 1000 permutations")


def test_criterion_06_fifo_in_bag(report):
    parts, ok = [], True
    for label, name, kw in (("DPE(2)", "dpe", {"N": 2}), ("PC(3)", "pc", {"N": 3})):
        program = benchmarks.load(name, **kw)
        fifo, _ = explore(program, queue="fifo")
        bag, verdict = explore(program, queue="bag")
        fk = {canonical_key(c) for c in fifo.configs}
        bk = {canonical_key(c) for c in bag.configs}
        ok &= fk <= bk
        if label == "DPE(2)":
            ok &= isinstance(verdict, Safe)
        parts.append(f"{label} fifo={len(fk)} bag={len(bk)} bag verdict={verdict_name(verdict)}")
    report(6, ok, "; ".join(parts))


def test_criterion_07_atomic_eat_locks(report):
    space, _ = explore(benchmarks.load("dpe", N=2))
    broken = both = 0
    for c in space.configs:
        for o in c.objs.values():
            if o.cls != "PHILOSOPHER":
                continue
            forks = [o.attrs.get("left_fork"), o.attrs.get("right_fork")]
            if not all(isinstance(f, Ref) for f in forks):
                continue
            held = sum(f.proc in c.procs[o.handler].holds for f in forks)
            broken += held == 1
            both += held == 2
    report(7, broken == 0 and both > 0,
           f"{len(space)} states scanned, {broken} with exactly one fork held, {both} with both")


def test_criterion_08_determinism(report):
    parts, ok = [], True
    for label, *_ in SUITE:
        first_run(label)
        while len(_runs[label]) < 3:
            summary(label)
        distinct = {r[:3] for r in _runs[label]}
        ok &= len(distinct) == 1
        parts.append(f"{label}={'/'.join(map(str, _runs[label][0][:3]))}")
    report(8, ok, "three runs identical: " + "; ".join(parts))


def test_criterion_09_monotonicity(report):
    dpe2, dpe3 = first_run("DPE(2)")[0], first_run("DPE(3)")[0]
    dpb2, dpb3 = first_run("DPB(2)")[0], first_run("DPB(3)")[0]
    report(9, dpe3 > dpe2 and dpb3 > dpb2, f"DPE {dpe2} -> {dpe3}; DPB {dpb2} -> {dpb3}")


def test_criterion_10_error_detectors(report):
    _, void = explore(compile_text(VOID_CALL, "void.cscoop"))
    ensure = compile_text(FALSE_ENSURE, "ensure.cscoop", postconditions=True)
    _, post = explore(ensure, checks={"postcondition"})
    ok = verdict_name(void) == "void_call" and verdict_name(post) == "postcondition"
    report(10, ok, f"void-call program -> {verdict_name(void)}; false ensure -> {verdict_name(post)}")

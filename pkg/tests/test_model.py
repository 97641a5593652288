import random
from collections import Counter

import pytest
from oracle import isomorphic
from permute import permute

from cscoop import benchmarks
from cscoop.compiler import initial_configuration
from cscoop.explorer import explore
from cscoop.model import canonical_form, canonical_key, canonical_numbering, encode, raw_form, validate
from cscoop.model.config import Ref
from cscoop.semantics import Semantics


@pytest.fixture(scope="module")
def dpe2():
    space, _ = explore(benchmarks.load("dpe"), checks=())
    return space


def test_initial_validates():
    p = benchmarks.load("dpe")
    assert validate(initial_configuration(p), p) == []


def test_every_reachable_state_validates(dpe2):
    p = dpe2.sem.program
    for c in dpe2.configs:
        assert validate(c, p) == []


def test_multiple_lockers(dpe2):
    c = next(c for c in dpe2.configs if any(p.holds for p in c.procs.values())).deep_copy()
    holder = next(p for p in c.procs.values() if p.holds)
    locked = next(iter(holder.holds))
    other = next(q for q in c.procs if q not in (holder.pid, locked))
    c.procs[other].holds[locked] = 1
    assert any("multiple lockers" in m for m in validate(c))


def test_unresolved_reference():
    c = initial_configuration(benchmarks.load("dpe")).deep_copy()
    c.objs[0].attrs["first_fork"] = Ref(7, 7)
    assert any("unresolved reference" in m for m in validate(c))


def test_lock_consistency(dpe2):
    for c in dpe2.configs:
        for pid, p in c.procs.items():
            for qid, q in c.procs.items():
                if pid != qid:
                    assert (q.locked_by == pid) == (p.holds.get(qid, 0) >= 1)


def test_key_invariant_under_renaming(dpe2):
    rng = random.Random(11)
    for c in rng.sample(dpe2.configs, 40):
        key = canonical_key(c)
        for _ in range(5):
            assert canonical_key(permute(c, rng)) == key


def test_garbage_is_numbered_independently_of_ids():
    space, _ = explore(benchmarks.load("ds", POT=1, SAVAGES=1, HUNGER=1), checks=())
    rng = random.Random(3)
    finals = [c for c in space.configs if c.is_terminal()]
    assert finals
    for c in finals:
        for _ in range(20):
            assert canonical_key(permute(c, rng)) == canonical_key(c)


def test_dpe_and_dpb_keys():
    # Keys name methods and control states but not graph contents, so they
    # are only comparable within one program. The two root methods are the
    # same code; the programs diverge once philosophers start.
    a, b = benchmarks.load("dpe"), benchmarks.load("dpb")
    ia = Semantics(a).stabilize(initial_configuration(a))
    ib = Semantics(b).stabilize(initial_configuration(b))
    assert canonical_key(ia) == canonical_key(ib)
    ka = {canonical_key(c) for c in explore(a, checks=())[0].configs}
    kb = {canonical_key(c) for c in explore(b, checks=())[0].configs}
    assert ka != kb and ka & kb


def test_keys_agree_with_isomorphism(dpe2):
    rng = random.Random(5)
    sample = rng.sample(dpe2.configs, 30)
    for c in sample:
        assert isomorphic(c, permute(c, rng))
    for a, b in zip(sample, sample[1:]):
        assert not isomorphic(a, b)


def test_symmetric_eating_states():
    # Two interleavings in which both philosophers have eaten end in
    # isomorphic configurations; their keys must coincide.
    p = benchmarks.load("dpe")
    sem = Semantics(p)
    rng = random.Random(1)
    ends = []
    for _ in range(6):
        c = sem.stabilize(initial_configuration(p))
        while (en := sem.enabled(c)):
            c = sem.fire(c, rng.choice(en))
        ends.append(c)
    assert all(isomorphic(ends[0], e) for e in ends)
    assert len({canonical_key(e) for e in ends}) == 1


def test_congruence(dpe2):
    rng = random.Random(9)
    sem = dpe2.sem
    for c in rng.sample(dpe2.configs, 25):
        d = permute(c, rng)
        a = Counter(canonical_key(s) for s in sem.macro_step(c))
        b = Counter(canonical_key(s) for s in sem.macro_step(d))
        assert a == b


def test_numbering_starts_at_root(dpe2):
    c = dpe2.configs[-1]
    pmap, omap = canonical_numbering(c)
    assert pmap[c.root] == 0
    assert sorted(pmap.values()) == list(range(len(c.procs)))
    assert sorted(omap.values()) == list(range(len(c.objs)))


def test_encoding_is_tagged_big_endian():
    assert encode((1, "ab")) == b"i" + (1).to_bytes(8, "big", signed=True) + b"s" + (2).to_bytes(4, "big") + b"ab"
    assert encode((-1,)) == b"i" + b"\xff" * 8


def test_key_is_stable(dpe2):
    c = dpe2.configs[17]
    assert canonical_key(c) == encode(canonical_form(c))
    assert canonical_key(c.deep_copy()) == canonical_key(c)


def test_raw_form_implies_canonical(dpe2):
    seen = {}
    for c in dpe2.configs:
        r = raw_form(c)
        if r in seen:
            assert canonical_key(seen[r]) == canonical_key(c)
        seen[r] = c
    assert len(seen) == len(dpe2.configs)

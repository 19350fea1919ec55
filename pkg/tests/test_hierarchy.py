from __future__ import annotations

import random

import pytest

from freshfinger.hierarchy import EvictionPolicy, FreshFingerDict, LevelConfig
from freshfinger.oracle import IncrementalOracle


@pytest.mark.parametrize(
    "n, caps",
    [
        (2, (2,)),
        (4, (4,)),
        (5, (4, 5)),
        (16, (4, 16)),
        (17, (4, 16, 17)),
        (2**16, (4, 16, 256, 65536)),
    ],
)
def test_level_config(n, caps):
    cfg = LevelConfig.for_n(n)
    assert cfg.k == len(caps)
    assert tuple(cfg.capacity(j) for j in range(1, cfg.k + 1)) == caps


def test_level_config_rejects_tiny():
    with pytest.raises(ValueError):
        LevelConfig.for_n(1)
    with pytest.raises(ValueError):
        FreshFingerDict(1)


def test_fresh_dictionary_starts_with_empty_lower_levels():
    d = FreshFingerDict(256)
    assert d.k == 3
    assert d.level_keys(1) == [] and d.level_keys(2) == []
    assert d.level_keys(3) == list(range(1, 257))
    assert d.check_invariants(deep=True) == []


def test_first_access_found_at_top_then_at_one():
    d = FreshFingerDict(16)
    rec = d.access(7)
    assert rec.found_level == 2
    assert rec.cmp_descent == 0
    assert d.level_keys(1) == [7]
    again = d.access(7)
    assert again.found_level == 1
    assert again.cmp_total == 1


def test_worked_history_trace():
    d = FreshFingerDict(16)
    for x in [*range(2, 17), 1]:
        d.access(x)
    assert d.level_keys(1) == [1, 14, 15, 16]
    assert d.level_keys(2) == list(range(1, 17))
    rec = d.access(15)
    assert rec.found_level == 1
    assert rec.cmp_descent == 0


def test_out_of_range_access():
    d = FreshFingerDict(16)
    with pytest.raises(ValueError):
        d.access(0)
    with pytest.raises(ValueError):
        d.access(17)


def test_fault_injection_is_detected():
    d = FreshFingerDict(64)
    for x in (3, 9, 27):
        d.access(x)
    assert d.check_invariants() == []
    d.members[5] |= 1
    kinds = {v.kind for v in d.check_invariants()}
    assert "directory" in kinds

    d = FreshFingerDict(64)
    d.access(3)
    d.queues[0][40] = None
    assert "queue" in {v.kind for v in d.check_invariants()}

    d = FreshFingerDict(64)
    d.trees[-1].delete(d.top_handles[10])
    assert "top" in {v.kind for v in d.check_invariants()}


@pytest.mark.parametrize("policy", list(EvictionPolicy))
def test_random_accesses_keep_invariants(policy):
    n = 2**10
    rng = random.Random(17)
    d = FreshFingerDict(n, policy)
    for i in range(10_000):
        x = rng.randint(1, n) if i % 3 else rng.randint(1, 40)
        rec = d.access(x)
        assert 1 <= rec.found_level <= d.k
        assert x in d.handles[0]
        if i % 500 == 0:
            problems = d.check_invariants()
            if policy is EvictionPolicy.STRICT_FIFO:
                problems = [p for p in problems if p.kind != "subset"]
            assert problems == []
    final = d.check_invariants(deep=True)
    assert [v for v in final if v.kind != "subset"] == []
    if policy is not EvictionPolicy.STRICT_FIFO:
        assert final == []


@pytest.mark.parametrize("policy", [EvictionPolicy.SKIP_REQUEUE, EvictionPolicy.FULL_REFRESH])
def test_restructure_is_linear_in_found_level(policy):
    rng = random.Random(4)
    n = 2**10
    d = FreshFingerDict(n, policy)
    for _ in range(5000):
        rec = d.access(rng.randint(1, n))
        assert rec.cmp_restructure + rec.restructure_steps <= 8 * rec.found_level


@pytest.mark.parametrize(
    "policy, share",
    [(EvictionPolicy.SKIP_REQUEUE, 0.99), (EvictionPolicy.FULL_REFRESH, 1.0)],
)
def test_found_level_respects_working_set_floor(policy, share):
    n = 2**10
    rng = random.Random(23)
    d = FreshFingerDict(n, policy)
    orc = IncrementalOracle(n)
    checked = ok = 0
    for i in range(6000):
        x = rng.randint(1, 64) if i % 2 else rng.randint(1, n)
        w = int(orc.working_set_numbers(x)[x - 1])
        rec = d.access(x)
        orc.observe(x)
        if rec.found_level >= 2:
            checked += 1
            ok += w >= d.found_level_floor(rec.found_level)
    assert checked > 100
    assert ok >= share * checked


def test_found_level_floor_domain():
    d = FreshFingerDict(2**10)
    assert d.found_level_floor(2) == 4
    assert d.found_level_floor(3) == 16
    with pytest.raises(ValueError):
        d.found_level_floor(1)


def test_strict_fifo_can_break_the_subset_chain():
    n = 2**10
    rng = random.Random(1)
    d = FreshFingerDict(n, EvictionPolicy.STRICT_FIFO)
    seen = False
    for _ in range(20_000):
        d.access(rng.randint(1, n) if rng.random() < 0.5 else rng.randint(1, 8))
        if any(v.kind == "subset" for v in d.check_invariants()):
            seen = True
            break
    assert seen

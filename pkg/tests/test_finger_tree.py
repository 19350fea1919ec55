import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from freshfinger.finger_tree import LEFT, RIGHT, FingerTree, HandleError


def handles(tree):
    return {leaf.key: leaf for leaf in tree.leaves()}


def test_build_empty():
    t = FingerTree.build([])
    assert t.size() == 0
    assert t.keys() == []
    with pytest.raises(IndexError):
        t.any_handle()


def test_build_identity():
    t = FingerTree.build(range(1, 17))
    assert t.size() == 16
    assert t.keys() == list(range(1, 17))
    assert t.validate() == []


@pytest.mark.parametrize("keys", [[2, 1], [1, 1, 2], [3, 5, 4]])
def test_build_rejects_unsorted(keys):
    with pytest.raises(ValueError):
        FingerTree.build(keys)


def test_neighbors_of_absent_key():
    t = FingerTree.build([2, 4, 6, 8])
    res = t.finger_search(handles(t)[4], 5)
    assert res.found is None
    assert (res.pred.key, res.succ.key) == (4, 6)


def test_finger_search_examples():
    t = FingerTree.build(range(1, 17))
    h = handles(t)
    res = t.finger_search(h[5], 9)
    assert res.found is h[9]
    assert res.comparisons <= 4 * math.log2(4 + 2)
    res = t.finger_search(h[9], 9)
    assert res.found is h[9] and res.comparisons == 1


def test_extremes():
    t = FingerTree.build([10, 20, 30])
    h = handles(t)
    low = t.finger_search(h[20], 5)
    assert low.pred is None and low.succ is h[10]
    high = t.finger_search(h[20], 99)
    assert high.pred is h[30] and high.succ is None


def test_side_hint_skips_direction_comparison():
    t = FingerTree.build([2, 4, 6, 8])
    h = handles(t)
    assert t.finger_search(h[4], 5, RIGHT).comparisons == 1
    assert t.finger_search(h[4], 5).comparisons == 2
    assert t.finger_search(h[6], 5, LEFT).succ is h[6]


def test_counter_accumulates():
    t = FingerTree.build(range(1, 65))
    h = handles(t)
    a = t.finger_search(h[1], 40).comparisons
    b = t.finger_search(h[64], 3).comparisons
    assert t.comparisons == a + b


def test_dovetail_adjacent_fingers():
    t = FingerTree.build(range(1, 17))
    h = handles(t)
    res = t.dovetail_search(h[4], h[6], 5)
    single = min(t.finger_search(h[4], 5).comparisons, t.finger_search(h[6], 5).comparisons)
    assert res.found is h[5]
    assert res.comparisons <= 2 * single + 2


def test_dovetail_governed_by_near_finger():
    t = FingerTree.build(range(1, 17))
    h = handles(t)
    near = t.finger_search(h[1], 2).comparisons
    far = t.finger_search(h[16], 2).comparisons
    assert near < far
    res = t.dovetail_search(h[1], h[16], 2)
    assert res.found is h[2]
    assert res.comparisons == 2 * near - 1


def test_dovetail_equal_fingers():
    t = FingerTree.build(range(1, 17))
    h = handles(t)
    assert t.dovetail_search(h[7], h[7], 7).comparisons == 1


def test_dovetail_tie_goes_to_first_finger():
    t = FingerTree.build(range(1, 33))
    h = handles(t)
    # 16 and 18 are symmetric around 17 at leaf level
    a = t.finger_search(h[16], 17, RIGHT).comparisons
    b = t.finger_search(h[18], 17, LEFT).comparisons
    res = t.dovetail_search(h[16], h[18], 17, bracketed=True)
    if a == b:
        assert res.comparisons == 2 * a - 1


def test_dovetail_replay_against_single_searches():
    rng = random.Random(11)
    t = FingerTree.build(range(1, 1025))
    leaves = list(t.leaves())
    for _ in range(2000):
        fa, fb = rng.choice(leaves), rng.choice(leaves)
        target = rng.randint(0, 1026)
        ca = t.finger_search(fa, target).comparisons
        cb = t.finger_search(fb, target).comparisons
        res = t.dovetail_search(fa, fb, target)
        expected = 2 * ca - 1 if ca <= cb else 2 * cb
        assert res.comparisons == expected
        assert res.comparisons <= 2 * min(ca, cb)
        ref = t.search(target)
        assert (res.found, res.pred, res.succ) == (ref.found, ref.pred, ref.succ)


def test_insert_near():
    t = FingerTree.build([2, 4])
    h = handles(t)
    t.insert_near(h[2], 3)
    assert t.keys() == [2, 3, 4]


def test_insert_first():
    t = FingerTree()
    leaf = t.insert_first(7)
    assert t.keys() == [7] and leaf.key == 7
    with pytest.raises(ValueError):
        t.insert_first(8)


def test_insert_round_trip():
    t = FingerTree.build([k for k in range(1, 17) if k != 9])
    h = handles(t)
    t.insert_after(h[8], 9)
    res = t.finger_search(h[5], 9)
    assert res.found is not None and res.found.key == 9


def test_insert_errors():
    t = FingerTree.build([2, 4, 6])
    h = handles(t)
    with pytest.raises(ValueError):
        t.insert_near(h[4], 4)
    with pytest.raises(ValueError):
        t.insert_after(h[2], 5)  # 4 sits in between
    with pytest.raises(ValueError):
        t.insert_before(h[6], 3)


def test_delete_examples():
    t = FingerTree.build([3])
    assert t.delete(t.any_handle()) == 3
    assert t.size() == 0 and t.root is None

    t = FingerTree.build(range(1, 17))
    h = handles(t)
    t.delete(h[9])
    res = t.finger_search(h[8], 9)
    assert res.found is None and res.succ.key == 10


def test_stale_and_foreign_handles():
    t = FingerTree.build(range(1, 9))
    other = FingerTree.build(range(1, 9))
    h = handles(t)
    t.delete(h[3])
    with pytest.raises(HandleError):
        t.delete(h[3])
    with pytest.raises(HandleError):
        t.finger_search(h[3], 4)
    with pytest.raises(HandleError):
        other.finger_search(h[4], 4)


def test_any_handle_and_size():
    assert FingerTree.build([5]).any_handle().key == 5
    t = FingerTree()
    a = t.insert_first(10)
    b = t.insert_after(a, 20)
    t.insert_before(a, 5)
    t.delete(b)
    assert t.size() == 2


def _random_churn(seed, steps, universe):
    rng = random.Random(seed)
    t = FingerTree()
    ref = {}
    updates = 0
    for _ in range(steps):
        if ref and rng.random() < 0.5:
            key = rng.choice(list(ref))
            t.delete(ref.pop(key))
        else:
            key = rng.randint(1, universe)
            if key in ref:
                continue
            if not ref:
                ref[key] = t.insert_first(key)
            else:
                res = t.search(key)
                if res.pred is not None:
                    ref[key] = t.insert_after(res.pred, key)
                else:
                    ref[key] = t.insert_before(res.succ, key)
        updates += 1
    return t, ref, updates


def test_random_interleavings_keep_order():
    t, ref, _ = _random_churn(5, 10_000, 500)
    assert t.keys() == sorted(ref)
    assert t.validate() == []
    for key, leaf in ref.items():
        assert leaf.key == key and leaf.tree is t


def test_rebalancing_is_amortized_constant():
    for seed in range(3):
        t, _, updates = _random_churn(seed, 20_000, 4000)
        assert t.rebalance_steps <= 2 * updates


def test_height_logarithmic():
    for size in (1, 2, 5, 100, 4096):
        t = FingerTree.build(range(size))
        assert t.height() <= max(1, math.ceil(math.log2(size)))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.integers(1, 60)), max_size=120))
def test_hypothesis_matches_sorted_set(ops):
    t = FingerTree()
    ref = {}
    for insert, key in ops:
        if insert and key not in ref:
            if not ref:
                ref[key] = t.insert_first(key)
            else:
                res = t.search(key)
                ref[key] = t.insert_near(res.pred or res.succ, key)
        elif not insert and key in ref:
            t.delete(ref.pop(key))
        assert t.keys() == sorted(ref)
    assert t.validate() == []


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 300), st.data())
def test_hypothesis_search_contract(size, data):
    keys = list(range(2, 2 * size + 2, 2))
    t = FingerTree.build(keys)
    leaves = list(t.leaves())
    finger = leaves[data.draw(st.integers(0, size - 1))]
    target = data.draw(st.integers(0, 2 * size + 3))
    res = t.finger_search(finger, target)
    if target in keys:
        assert res.found.key == target
    else:
        below = [k for k in keys if k < target]
        above = [k for k in keys if k > target]
        assert (res.pred.key if res.pred else None) == (below[-1] if below else None)
        assert (res.succ.key if res.succ else None) == (above[0] if above else None)

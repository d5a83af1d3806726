import random

import pytest

from dynconn.chunks import ChunkError, MasterArray
from dynconn.costmodel import ArbitraryPolicy, CommonPolicy, CostMeter
from dynconn.oracle import CheckFailure, check_chunk_store


def store(slots=24, cap=8, policy=None):
    return MasterArray(CostMeter(policy or ArbitraryPolicy(9)), slots, cap)


def filled(ms, sizes):
    """One array with a chunk of each given edge count."""
    a = ms.new_array()
    for idx, sz in enumerate(sizes):
        c = ms.alloc_chunk([(idx, e) for e in range(sz)])
        ms.insert_chunk(a, len(a.order), c)
    return a


class TestSlots:
    def test_fresh_chunk_has_zero_links(self):
        ms = store()
        c = ms.alloc_chunk([(1, 2)])
        assert c.links == 0

    def test_deactivate_then_reuse_slot(self):
        ms = store()
        a = filled(ms, [2])
        c = a.order[0]
        slot = c.slot
        ms.delete_chunk(a, 0)
        ms.deactivate(c)
        c2 = ms.alloc_chunk([(3, 4)])
        assert c2.slot == slot

    def test_deactivate_with_stale_column_bit_fails(self):
        ms = store()
        a = filled(ms, [2, 2])
        c0, c1 = a.order
        ms.link(c0, c1)
        c1.links = 0  # simulate a caller forgetting to clear the column
        ms.delete_chunk(a, 1)
        with pytest.raises(ChunkError, match="stale link bit"):
            ms.deactivate(c1)

    def test_occupied_slot_rejected(self):
        ms = store()
        c = ms.alloc_chunk([(0, 1)])
        with pytest.raises(ChunkError, match="occupied"):
            ms.set_chunk(c.slot, [(2, 3)])


class TestLinks:
    def test_link_then_unlink_restores(self):
        ms = store()
        a = filled(ms, [2, 2, 2])
        c0, c2 = a.order[0], a.order[2]
        before = [c.links for c in a.order]
        ms.link(c0, c2)
        ms.unlink(c0, c2)
        assert [c.links for c in a.order] == before
        check_chunk_store(ms)

    def test_self_link_sets_diagonal(self):
        ms = store()
        a = filled(ms, [2])
        c = a.order[0]
        ms.link(c, c)
        assert (c.links >> c.slot) & 1 == 1
        check_chunk_store(ms)

    def test_symmetry_after_random_sequence(self):
        ms = store()
        a = filled(ms, [2] * 6)
        rng = random.Random(17)
        for _ in range(200):
            c1, c2 = rng.choice(a.order), rng.choice(a.order)
            if rng.random() < 0.5:
                ms.link(c1, c2)
            else:
                ms.unlink(c1, c2)
            check_chunk_store(ms)


class TestBulkSetLinks:
    def test_idempotent(self):
        ms = store()
        a = filled(ms, [2, 2, 2])
        c = a.order[1]
        ms.link(c, a.order[0])
        snapshot = [d.links for d in a.order]
        ms.bulk_set_links(c, c.links)
        assert [d.links for d in a.order] == snapshot
        check_chunk_store(ms)

    def test_zero_clears_row_and_column(self):
        ms = store()
        a = filled(ms, [2, 2, 2])
        c = a.order[1]
        ms.link(c, a.order[0])
        ms.link(c, a.order[2])
        ms.bulk_set_links(c, 0)
        assert c.links == 0
        for d in a.order:
            assert (d.links >> c.slot) & 1 == 0
        check_chunk_store(ms)

    def test_random_vectors_stay_consistent(self):
        ms = store()
        a = filled(ms, [2] * 5)
        b = ms.new_array()
        for idx in range(3):
            ms.insert_chunk(b, idx, ms.alloc_chunk([(90 + idx, 1)]))
        rng = random.Random(23)
        arrays = [a, b]
        for _ in range(120):
            arr = rng.choice(arrays)
            c = rng.choice(arr.order)
            # restrict link targets to the chunk's own array, as the owner does
            mask = 0
            for d in arr.order:
                if rng.random() < 0.4:
                    mask |= 1 << d.slot
            ms.bulk_set_links(c, mask)
            check_chunk_store(ms)


class TestArrayOps:
    def test_insert_into_empty(self):
        ms = store()
        a = ms.new_array()
        ms.insert_chunk(a, 0, ms.alloc_chunk([(0, 1)]))
        assert len(a.order) == 1 and a.order[0].pos == 0

    def test_insert_then_delete_restores(self):
        ms = store()
        a = filled(ms, [2, 2, 2])
        want = list(a.order)
        c = ms.alloc_chunk([(7, 7)])
        ms.insert_chunk(a, 1, c)
        ms.delete_chunk(a, 1)
        assert a.order == want
        check_chunk_store(ms)

    def test_back_pointers_after_random_ops(self):
        ms = store(slots=40)
        a = filled(ms, [2] * 4)
        rng = random.Random(31)
        for _ in range(1000):
            if (rng.random() < 0.5 or len(a.order) < 2) and ms.free:
                pos = rng.randrange(len(a.order) + 1)
                ms.insert_chunk(a, pos, ms.alloc_chunk([(rng.randrange(50), 0)]))
            else:
                pos = rng.randrange(len(a.order))
                c = ms.delete_chunk(a, pos)
                ms.deactivate(c)
            for pos, c in enumerate(a.order):
                assert c.pos == pos and c.array is a
        check_chunk_store(ms)

    def test_concatenate_and_split_roundtrip(self):
        ms = store()
        a = filled(ms, [2, 2])
        b = filled(ms, [2, 2, 2])
        want = list(a.order) + list(b.order)
        ms.concatenate(a, b)
        assert a.order == want
        check_chunk_store(ms)
        a1, a2 = ms.split_array(a, 2)
        assert a1.order == want[:2] and a2.order == want[2:]
        check_chunk_store(ms)

    def test_concatenate_empty_is_noop(self):
        ms = store()
        a = filled(ms, [2, 2])
        want = list(a.order)
        ms.concatenate(a, ms.new_array())
        assert a.order == want

    def test_concat_root_bits_or(self):
        ms = store()
        a = filled(ms, [2, 2])
        b = filled(ms, [2])
        ms.link(a.order[0], a.order[1])
        ms.link(b.order[0], b.order[0])
        ra, rb = a.tree.root_bits(), b.tree.root_bits()
        ms.concatenate(a, b)
        assert a.tree.root_bits() == ra | rb


class TestReorder:
    def test_degenerate_rejected(self):
        ms = store()
        a = filled(ms, [2] * 4)
        with pytest.raises(ChunkError):
            ms.reorder(a, 2, 3, 1)

    def test_inverse_restores_identity(self):
        ms = store()
        a = filled(ms, [2] * 7)
        want = list(a.order)
        ms.reorder(a, 1, 3, 6)  # [0][3 4 5][1 2][6]
        ms.reorder(a, 1, 4, 6)  # inverse: moves the displaced block back
        assert a.order == want
        check_chunk_store(ms)

    def test_tree_leaves_track_permutation(self):
        ms = store()
        a = filled(ms, [2] * 6)
        for i, c in enumerate(a.order):
            ms.bulk_set_links(c, 1 << a.order[i % 6].slot)
        ms.reorder(a, 0, 2, 5)
        assert [l.bits for l in a.tree.leaves] == [c.links for c in a.order]
        check_chunk_store(ms)


class TestQuery:
    def test_no_links_gives_none(self):
        ms = store()
        a = filled(ms, [2] * 6)
        assert ms.query(a, 0, 3, 3, 6) is None

    def test_planted_pair_found(self):
        ms = store()
        a = filled(ms, [2] * 8)
        ms.link(a.order[1], a.order[5])
        got = ms.query(a, 0, 3, 3, 8)
        assert got == (a.order[1], a.order[5])
        check_chunk_store(ms)

    def test_common_model_lowest_pair(self):
        ms = store(policy=CommonPolicy(0.5))
        a = filled(ms, [2] * 8)
        ms.link(a.order[2], a.order[6])
        ms.link(a.order[1], a.order[5])
        ms.link(a.order[2], a.order[5])
        got = ms.query(a, 0, 4, 4, 8)
        assert got == (a.order[1], a.order[5])

    def test_query_matches_brute_force(self):
        rng = random.Random(5)
        for trial in range(60):
            ms = store(slots=30, policy=ArbitraryPolicy(trial))
            a = filled(ms, [2] * 10)
            pairs = set()
            for _ in range(rng.randrange(8)):
                x, y = rng.randrange(10), rng.randrange(10)
                ms.link(a.order[x], a.order[y])
                pairs.add((x, y))
                pairs.add((y, x))
            i, j = sorted(rng.sample(range(11), 2))
            k, l = sorted(rng.sample(range(11), 2))
            got = ms.query(a, i, j, k, l)
            valid = {
                (p, q)
                for p in range(i, j)
                for q in range(k, l)
                if (p, q) in pairs
            }
            if got is None:
                assert not valid
            else:
                p = a.order.index(got[0])
                q = a.order.index(got[1])
                assert (p, q) in valid
            check_chunk_store(ms)

    def test_malformed_interval(self):
        ms = store()
        a = filled(ms, [2] * 4)
        with pytest.raises(ChunkError):
            ms.query(a, 3, 1, 0, 2)


def test_randomized_store_soak():
    rng = random.Random(77)
    ms = store(slots=64, cap=6)
    arrays = [filled(ms, [2, 2]), filled(ms, [2, 2, 2])]
    for step in range(600):
        roll = rng.random()
        a = rng.choice(arrays)
        if roll < 0.3 and ms.free:
            ms.insert_chunk(a, rng.randrange(len(a.order) + 1),
                            ms.alloc_chunk([(step, 0), (step, 1)]))
        elif roll < 0.45 and len(a.order) > 1:
            pos = rng.randrange(len(a.order))
            c = a.order[pos]
            if c.links:
                ms.bulk_set_links(c, 0)  # column must clear before the slot frees
            ms.delete_chunk(a, pos)
            ms.deactivate(c)
        elif roll < 0.7:
            c1 = rng.choice(a.order)
            c2 = rng.choice(a.order)
            (ms.link if rng.random() < 0.6 else ms.unlink)(c1, c2)
        elif roll < 0.85 and len(a.order) >= 3:
            n = len(a.order)
            i, j, k = sorted(rng.sample(range(n + 1), 3))
            ms.reorder(a, i, j, k)
        else:
            n = len(a.order)
            if n:
                i, j = sorted(rng.sample(range(n + 1), 2))
                k, l = sorted(rng.sample(range(n + 1), 2))
                ms.query(a, i, j, k, l)
        if step % 5 == 0:
            check_chunk_store(ms)
    check_chunk_store(ms)

"""Master array of edge chunks, link vectors, and ordered chunk arrays.

A chunk is a bounded array of directed tour edges living in one slot of the
global master array.  Two chunks are linked when some non-tree edge joins a
node occurring in one to a node occurring in the other; each chunk keeps a
link vector (bit per master slot) recording this, and each chunk array mirrors
its chunks' link vectors into an aggregate tree so that interval link queries
run on OR summaries.

Positions are 0-based throughout.  Link vectors are Python ints; the meter is
charged `width` units for whole-vector operations.
"""

from __future__ import annotations

from .aggtree import AggTree, join as agg_join
from .costmodel import CostMeter


class ChunkError(ValueError):
    pass


class Chunk:
    __slots__ = ("slot", "edges", "links", "array", "pos")

    def __init__(self, slot, edges):
        self.slot = slot
        self.edges = edges
        self.links = 0
        self.array = None
        self.pos = -1

    def __repr__(self):
        return f"<Chunk slot={self.slot} n={len(self.edges)}>"


class ChunkArray:
    """Ordered sequence of chunks representing one tour, plus its aggregate tree."""

    __slots__ = ("store", "order", "tree")

    def __init__(self, store):
        self.store = store
        self.order = []
        self.tree = AggTree(store.meter, store.slot_count)

    def __len__(self):
        return len(self.order)


class MasterArray:
    """The global slot table; owns chunk allocation and link consistency."""

    def __init__(self, meter: CostMeter, slot_count: int, chunk_capacity: int):
        self.meter = meter
        self.slot_count = slot_count
        self.chunk_capacity = chunk_capacity
        self.slots = [None] * slot_count
        self.free = list(range(slot_count - 1, -1, -1))
        self.debug_checks = True
        with meter.initialization():
            meter.charge(slot_count)

    def arrays(self):
        seen = []
        marks = set()
        for c in self.slots:
            if c is not None and c.array is not None and id(c.array) not in marks:
                marks.add(id(c.array))
                seen.append(c.array)
        return seen

    # -- slot management ------------------------------------------------------

    def set_chunk(self, slot, edges):
        """Activate a chunk with `edges` in a free slot; links start all-zero."""
        if self.slots[slot] is not None:
            raise ChunkError(f"slot {slot} occupied")
        self.free.remove(slot)
        return self._activate(slot, edges)

    def alloc_chunk(self, edges):
        if not self.free:
            raise ChunkError("master array full")
        return self._activate(self.free.pop(), edges)

    def _activate(self, slot, edges):
        if not 1 <= len(edges) <= self.chunk_capacity:
            raise ChunkError(f"chunk size {len(edges)} out of 1..{self.chunk_capacity}")
        c = Chunk(slot, list(edges))
        self.slots[slot] = c
        self.meter.charge(len(edges) + 1)
        return c

    def deactivate(self, c: Chunk):
        """Return a chunk's slot to the free pool; its link column must be clear."""
        if self.slots[c.slot] is not c:
            raise ChunkError("chunk not active")
        if c.array is not None:
            raise ChunkError("chunk still referenced by an array")
        if self.debug_checks:
            for d in self.slots:
                if d is not None and d is not c and (d.links >> c.slot) & 1:
                    raise ChunkError(
                        f"deactivating slot {c.slot} with stale link bit in slot {d.slot}"
                    )
            self.meter.charge(self.slot_count)
        if c.links:
            raise ChunkError("deactivating chunk with set link bits")
        self.slots[c.slot] = None
        self.free.append(c.slot)
        self.meter.charge(1)

    # -- link maintenance -------------------------------------------------------

    def link(self, c1: Chunk, c2: Chunk):
        self._require_active(c1)
        self._require_active(c2)
        c1.links |= 1 << c2.slot
        c2.links |= 1 << c1.slot
        self.meter.charge(2)
        c1.array.tree.bit_set(c1.pos, c2.slot, 1)
        c2.array.tree.bit_set(c2.pos, c1.slot, 1)

    def unlink(self, c1: Chunk, c2: Chunk):
        self._require_active(c1)
        self._require_active(c2)
        c1.links &= ~(1 << c2.slot)
        c2.links &= ~(1 << c1.slot)
        self.meter.charge(2)
        c1.array.tree.bit_set(c1.pos, c2.slot, 0)
        c2.array.tree.bit_set(c2.pos, c1.slot, 0)

    def bulk_set_links(self, c: Chunk, links: int):
        """Replace c's link vector and mirror the change into every other chunk."""
        self._require_active(c)
        c.links = links
        self.meter.charge(self.slot_count)
        c.array.tree.bulk_set(c.pos, links)
        # the column of c in every other active chunk follows links bit-by-slot
        col = 1 << c.slot
        arrays = self.arrays()

        def column_body(a):
            array = arrays[a]
            to_set = []
            to_clear = []
            for pos, d in enumerate(array.order):
                if d is c:
                    continue
                want = (links >> d.slot) & 1
                have = (d.links >> c.slot) & 1
                if want:
                    d.links |= col
                    if not have:
                        to_set.append(pos)
                else:
                    d.links &= ~col
                    if have:
                        to_clear.append(pos)
            self.meter.charge(len(array.order))
            if to_clear:
                array.tree.dual_bulk_set(set(to_clear), c.slot, 0)
            if to_set:
                array.tree.dual_bulk_set(to_set, c.slot, 1)

        self.meter.parallel_for(len(arrays), column_body)

    def _require_active(self, c):
        if self.slots[c.slot] is not c:
            raise ChunkError("inactive chunk")

    # -- array operations --------------------------------------------------------

    def new_array(self):
        return ChunkArray(self)

    def insert_chunk(self, array: ChunkArray, pos, c: Chunk):
        if not 0 <= pos <= len(array.order):
            raise ChunkError("position out of range")
        if c.array is not None:
            raise ChunkError("chunk already in an array")
        array.order.insert(pos, c)
        c.array = array
        self._refresh_positions(array, pos)
        array.tree.insert(pos, c.links)

    def delete_chunk(self, array: ChunkArray, pos):
        if not 0 <= pos < len(array.order):
            raise ChunkError("position out of range")
        c = array.order.pop(pos)
        c.array = None
        c.pos = -1
        self._refresh_positions(array, pos)
        array.tree.delete(pos)
        return c

    def concatenate(self, a1: ChunkArray, a2: ChunkArray):
        """Append a2's chunks to a1; a2 becomes empty and dead."""
        base = len(a1.order)
        a1.order.extend(a2.order)
        self._refresh_positions(a1, base)
        a1.tree = agg_join(a1.tree, a2.tree)
        a2.order = []
        return a1

    def split_array(self, array: ChunkArray, pos):
        """Split so the first `pos` chunks stay; returns (array, new right array)."""
        if not 0 <= pos <= len(array.order):
            raise ChunkError("position out of range")
        right = ChunkArray(self)
        right.order = array.order[pos:]
        array.order = array.order[:pos]
        left_tree, right_tree = array.tree.split_boundary(pos)
        array.tree = left_tree
        right.tree = right_tree
        self._refresh_positions(right, 0)
        self.meter.parallel_charge(len(array.order))
        return array, right

    def reorder(self, array: ChunkArray, i, j, k):
        """Move chunks [j, k) in front of position i (i <= j <= k required)."""
        n = len(array.order)
        if not (0 <= i <= j <= k <= n):
            raise ChunkError(f"bad reorder bounds ({i}, {j}, {k})")
        if i == j or j == k:
            return
        order = array.order
        array.order = order[:i] + order[j:k] + order[i:j] + order[k:]
        self._refresh_positions(array, i)
        t = array.tree
        left, rest = t.split_boundary(i)
        mid, rest = rest.split_boundary(j - i)
        moved, tail = rest.split_boundary(k - j)
        t2 = agg_join(left, moved)
        t2 = agg_join(t2, mid)
        array.tree = agg_join(t2, tail)

    def query(self, array: ChunkArray, i, j, k, l):
        """An arbitrary linked pair (C, C') with C at a position in [i, j) and
        C' in [k, l); None if no such pair exists.

        The OR of the link vectors over [i, j) is read off a temporary
        three-way split of the aggregate tree, which is then joined back.
        """
        n = len(array.order)
        if not (0 <= i <= j <= n and 0 <= k <= l <= n):
            raise ChunkError("malformed query interval")
        if i == j or k == l:
            return None
        t = array.tree
        left, rest = t.split_boundary(i)
        mid, right = rest.split_boundary(j - i)
        acc = mid.root_bits()
        merged = agg_join(left, mid)
        array.tree = agg_join(merged, right)
        meter = self.meter
        candidates = [
            pos for pos in range(k, l) if (acc >> array.order[pos].slot) & 1
        ]
        meter.parallel_charge(l - k)
        if not candidates:
            return None
        if meter.policy.kind == "common":
            _, q = meter.reduce_extremum(candidates, "min")
        else:
            q = meter.choose_any(candidates)
        cq = array.order[q]
        back = [
            pos for pos in range(i, j) if (cq.links >> array.order[pos].slot) & 1
        ]
        meter.parallel_charge(j - i)
        if not back:
            raise ChunkError("link vectors inconsistent during query")
        if meter.policy.kind == "common":
            _, p = meter.reduce_extremum(back, "min")
        else:
            p = meter.choose_any(back)
        return array.order[p], cq

    def _refresh_positions(self, array: ChunkArray, start=0):
        for pos in range(start, len(array.order)):
            c = array.order[pos]
            c.array = array
            c.pos = pos
        self.meter.parallel_charge(max(0, len(array.order) - start))

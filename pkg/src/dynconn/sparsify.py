"""Sparsification tree over an implicit balanced node partition, plus facades.

The node set [0, n) is halved recursively into a balanced binary partition
tree of depth ceil(log2 n).  For every level and every unordered pair of
same-level parts, a sparsification node covers the edges between the two
parts; an edge therefore lives on exactly one root-to-leaf path of keys.
Each materialized node keeps a base graph: the union of its children's
spanning forests (at most 4 per node), which has the same components as the
full covered subgraph at a quarter of the size.  All per-node structure work
runs through the unbounded-degree connectivity layer sized by the node's own
span, which is what turns per-operation cost into a geometric sum over
levels.

Nodes materialize lazily on first edge arrival; construction and activation
replay inside a materialization are charged to the meter's initialization
account, matching the convention that building a structure is not part of
any per-operation bound.

Facade operations are padded to fixed depth budgets (see CostMeter.operation)
so the metered depth of each public operation is one constant, checked by an
internal assertion rather than trusted.
"""

from __future__ import annotations

from .costmodel import ArbitraryPolicy, CostMeter
from .eulerforest import ReplacementReport
from .oracle import SimpleGraph
from .reductions import BipartiteGeneral, ConnGeneral, GadgetError


class SparsError(ValueError):
    pass


class SparsNode:
    """One sparsification-tree node: a base graph plus its query structures."""

    __slots__ = (
        "key", "spans", "size", "conn", "bip", "base_edges", "own_bit",
        "subtree_flag",
    )

    def __init__(self, meter, key, spans, mode):
        self.key = key
        self.spans = spans  # one or two (lo, hi) global-id intervals
        self.size = sum(hi - lo for lo, hi in spans)
        self.conn = ConnGeneral(meter, self.size, 4 * self.size)
        self.bip = (
            BipartiteGeneral(meter, self.size, 4 * self.size)
            if mode == "bipartiteness"
            else None
        )
        self.base_edges = set()
        self.own_bit = True
        self.subtree_flag = True

    def covers(self, x):
        return any(lo <= x < hi for lo, hi in self.spans)

    def local(self, x):
        lo0, hi0 = self.spans[0]
        if lo0 <= x < hi0:
            return x - lo0
        lo1, hi1 = self.spans[1]
        return (hi0 - lo0) + (x - lo1)

    def activate(self, x):
        local = self.local(x)
        self.conn.activate_node(local)
        if self.bip is not None:
            self.bip.activate_node(local)

    def deactivate(self, x):
        local = self.local(x)
        self.conn.deactivate_node(local)
        if self.bip is not None:
            self.bip.deactivate_node(local)

    def add_edge(self, x, y):
        self.base_edges.add(_norm(x, y))
        lx, ly = self.local(x), self.local(y)
        self.conn.insert_edge(lx, ly)
        if self.bip is not None:
            self.bip.apply_edge(lx, ly, True)

    def remove_edge(self, x, y, hint=None):
        self.base_edges.discard(_norm(x, y))
        lx, ly = self.local(x), self.local(y)
        if hint is None:
            rep = self.conn.delete_edge(lx, ly)
        else:
            rep = self.conn.delete_edge_with_hint(
                lx, ly, (self.local(hint[0]), self.local(hint[1]))
            )
        if self.bip is not None:
            self.bip.apply_edge(lx, ly, False)
        if rep is not None and rep.kind == ReplacementReport.REPLACED:
            return ReplacementReport(rep.kind, self.to_global(rep.edge))
        return rep

    def is_tree_edge(self, x, y):
        return self.conn.tree_edge(self.local(x), self.local(y))

    def probe_replacement(self, x, y):
        rep = self.conn.find_replacement(self.local(x), self.local(y))
        if rep.kind != ReplacementReport.REPLACED:
            return rep
        return ReplacementReport(rep.kind, self.to_global(rep.edge))

    def to_global(self, local_edge):
        a, b = (self._unlocal(w) for w in local_edge)
        return _norm(a, b)

    def _unlocal(self, local):
        lo0, hi0 = self.spans[0]
        if local < hi0 - lo0:
            return lo0 + local
        lo1, _ = self.spans[1]
        return lo1 + (local - (hi0 - lo0))

    def forest_edges(self):
        return {
            (x, y) for (x, y) in self.base_edges if self.is_tree_edge(x, y)
        }


class SparsTree:
    """Core structure shared by the two public facades."""

    def __init__(self, n, mode, meter: CostMeter):
        if n < 1:
            raise SparsError("need at least one node")
        if mode not in ("connectivity", "bipartiteness"):
            raise SparsError(f"unknown mode {mode!r}")
        self.n = n
        self.mode = mode
        self.meter = meter
        self.levels = (n - 1).bit_length()  # partition-tree depth
        self.nodes = {}
        self.touching = {}
        self.graph = SimpleGraph()
        self._interval_cache = {(0, 0): (0, n)}
        self.root_key = (0, 0, 0)
        self._materialize(self.root_key)

    # -- partition geometry ------------------------------------------------------

    def interval(self, level, k):
        got = self._interval_cache.get((level, k))
        if got is not None:
            return got
        lo, hi = self.interval(level - 1, k >> 1)
        mid = lo + (hi - lo + 1) // 2
        out = (lo, mid) if k & 1 == 0 else (mid, hi)
        self._interval_cache[(level, k)] = out
        return out

    def part_path(self, x):
        """x's partition index at every level, root downward."""
        ks = [0]
        lo, hi = 0, self.n
        k = 0
        for _ in range(self.levels):
            mid = lo + (hi - lo + 1) // 2
            if x < mid:
                k, hi = 2 * k, mid
            else:
                k, lo = 2 * k + 1, mid
            ks.append(k)
        return ks

    def key_path(self, x, y):
        """Keys from leaf to root of the unique path holding edge (x, y)."""
        kx, ky = self.part_path(x), self.part_path(y)
        out = []
        for level in range(self.levels, -1, -1):
            a, b = kx[level], ky[level]
            out.append((level, a, b) if a <= b else (level, b, a))
        return out

    def child_keys(self, key):
        level, k1, k2 = key
        if level >= self.levels:
            return []
        out = []
        for a in (2 * k1, 2 * k1 + 1):
            lo, hi = self.interval(level + 1, a)
            if lo >= hi:
                continue
            for b in (2 * k2, 2 * k2 + 1):
                lo2, hi2 = self.interval(level + 1, b)
                if lo2 >= hi2:
                    continue
                ck = (level + 1, a, b) if a <= b else (level + 1, b, a)
                if ck not in out:
                    out.append(ck)
        return out

    def _materialize(self, key):
        node = self.nodes.get(key)
        if node is not None:
            return node
        level, k1, k2 = key
        spans = [self.interval(level, k1)]
        if k2 != k1:
            spans.append(self.interval(level, k2))
        with self.meter.initialization():
            node = SparsNode(self.meter, key, spans, self.mode)
            for lo, hi in spans:
                for x in range(lo, hi):
                    if x in self.graph.adj:
                        node.activate(x)
        self.nodes[key] = node
        for k in {k1, k2}:
            self.touching.setdefault((level, k), []).append(node)
        return node

    # -- node lifecycle -----------------------------------------------------------

    def activate_node(self, v):
        self._check_id(v)
        self.graph.activate(v)
        ks = self.part_path(v)
        self.meter.parallel_charge(self.levels + 1)
        for level in range(self.levels + 1):
            for node in self.touching.get((level, ks[level]), ()):
                node.activate(v)

    def deactivate_node(self, v):
        self._check_id(v)
        if v not in self.graph.adj:
            raise SparsError(f"node {v} not active")
        if self.graph.adj[v]:
            raise SparsError(f"node {v} not isolated")
        self.graph.deactivate(v)
        ks = self.part_path(v)
        self.meter.parallel_charge(self.levels + 1)
        for level in range(self.levels + 1):
            for node in self.touching.get((level, ks[level]), ()):
                node.deactivate(v)

    # -- edge changes ---------------------------------------------------------------

    def insert_edge(self, x, y):
        self._require_active(x)
        self._require_active(y)
        if x == y:
            raise SparsError("self-loop")
        if self.graph.has_edge(x, y):
            raise SparsError(f"edge ({x},{y}) already present")
        path = [self._materialize(key) for key in self.key_path(x, y)]
        meter = self.meter
        probe = [0] * len(path)

        def probe_body(i):
            probe[i] = 0 if path[i].conn.connected(path[i].local(x), path[i].local(y)) else 1

        meter.parallel_for(len(path), probe_body)
        end = meter.initial_segment_end(probe)
        if end is None:
            raise AssertionError("leaf level cannot be connected before insertion")

        def insert_body(i):
            path[i].add_edge(x, y)

        meter.parallel_for(end + 1, insert_body)
        if end + 1 < len(path):
            path[end + 1].add_edge(x, y)
        self.graph.add_edge(x, y)
        if self.mode == "bipartiteness":
            self._refresh_flags(path)

    def delete_edge(self, x, y):
        """Delete (x, y), restructuring every level that holds it.

        Levels where (x, y) is a tree edge each need a replacement.  A level
        whose own base graph offers one uses it; a level without one adopts
        the edge promoted by the nearest such level below, which provably
        crosses its cut too (the adopted edge's endpoints reach x and y
        through the lower level's old forest paths, and those paths are part
        of this level's base graph).  Which edge each level uses is therefore
        a nearest-anchor-below prefix computation, after which all levels
        commit independently; every promoted edge is finally inserted into
        its parent's base graph, keeping base graphs equal to the union of
        their children's forests.
        """
        self._require_active(x)
        self._require_active(y)
        if not self.graph.has_edge(x, y):
            raise SparsError(f"edge ({x},{y}) absent")
        path = [self.nodes[key] for key in self.key_path(x, y)]
        meter = self.meter
        edge = _norm(x, y)
        holds = [edge in node.base_edges for node in path]
        tree = [0] * len(path)

        def tree_body(i):
            tree[i] = 1 if holds[i] and path[i].is_tree_edge(x, y) else 0

        meter.parallel_for(len(path), tree_body)
        self._check_footprint(holds, tree)
        reps = [None] * len(path)

        def probe_body(i):
            if tree[i]:
                reps[i] = path[i].probe_replacement(x, y)

        meter.parallel_for(len(path), probe_body)
        # nearest anchor at or below each level, as a prefix computation
        use = [None] * len(path)
        current = None
        for i in range(len(path)):
            if not tree[i]:
                continue
            if reps[i].kind == ReplacementReport.REPLACED:
                current = reps[i].edge
            use[i] = current
        meter.parallel_charge(len(path) ** 2)

        def commit_body(i):
            node = path[i]
            if not holds[i]:
                return
            if tree[i] and use[i] is not None:
                if use[i] not in node.base_edges:
                    node.add_edge(*use[i])
                got = node.remove_edge(x, y, hint=use[i])
                if got.kind != ReplacementReport.REPLACED or got.edge != use[i]:
                    raise AssertionError("level rejected its replacement edge")
            else:
                node.remove_edge(x, y)

        meter.parallel_for(len(path), commit_body)

        def promote_body(i):
            if not tree[i] or use[i] is None or i + 1 >= len(path):
                return
            parent = path[i + 1]
            if use[i] not in parent.base_edges:
                parent.add_edge(*use[i])

        meter.parallel_for(len(path), promote_body)
        self.graph.remove_edge(x, y)
        if self.mode == "bipartiteness":
            self._refresh_flags(path)

    def _check_footprint(self, holds, tree):
        """An edge occupies one contiguous path segment and is a tree edge
        everywhere on it except possibly the topmost level."""
        lo = holds.index(True)
        hi = len(holds) - 1 - holds[::-1].index(True)
        if not all(holds[lo : hi + 1]):
            raise AssertionError("edge footprint is not contiguous")
        if any(holds[hi + 1 :]):
            raise AssertionError("edge footprint is not contiguous")
        for i in range(lo, hi):
            if not tree[i]:
                raise AssertionError(
                    "edge is non-tree below the top of its footprint"
                )

    # -- queries -------------------------------------------------------------------

    def root(self):
        return self.nodes[self.root_key]

    def connected(self, x, y):
        self._require_active(x)
        self._require_active(y)
        r = self.root()
        return r.conn.connected(r.local(x), r.local(y))

    def n_components(self):
        return self.root().conn.n_components()

    def tree_edge(self, x, y):
        self._require_active(x)
        self._require_active(y)
        if not self.graph.has_edge(x, y):
            return False
        return self.root().is_tree_edge(x, y)

    def is_bipartite(self):
        if self.mode != "bipartiteness":
            raise SparsError("not in bipartiteness mode")
        self.meter.charge(1)
        return self.root().subtree_flag

    # -- bipartite flags ---------------------------------------------------------------

    def _refresh_flags(self, path):
        """Recompute own bits on the changed path and AND them up to the root.

        localTerm(i) = ownBit(i) AND flags of off-path children; the new
        subtree flag of the i-th path node is the AND of local terms at and
        below it, which is a prefix-AND once terms are known.
        """
        meter = self.meter
        terms = [True] * len(path)

        def term_body(i):
            node = path[i]
            node.own_bit = node.bip.is_bipartite()
            term = node.own_bit
            below = path[i - 1] if i > 0 else None
            for ck in self.child_keys(node.key):
                child = self.nodes.get(ck)
                if child is None or child is below:
                    continue
                term = term and child.subtree_flag
            terms[i] = term

        meter.parallel_for(len(path), term_body)
        prefix = meter.prefix_and([1 if t else 0 for t in terms])
        for i, node in enumerate(path):
            node.subtree_flag = bool(prefix[i])
        meter.parallel_charge(len(path))

    def _check_id(self, v):
        if not 0 <= v < self.n:
            raise SparsError(f"node id {v} out of range")

    def _require_active(self, v):
        self._check_id(v)
        if v not in self.graph.adj:
            raise SparsError(f"node {v} not active")


def _norm(a, b):
    return (a, b) if a < b else (b, a)


# depth budgets per public operation; every operation pads its metered depth
# to the budget and fails hard if the true depth ever exceeds it
DEPTH_BUDGETS = {
    "activate": 8,
    "deactivate": 8,
    "insert": 64,
    "delete": 96,
    "connected": 8,
    "ncomponents": 8,
    "treeedge": 8,
    "bipartite": 8,
}


class _Facade:
    """Shared 1-based public surface over a SparsTree."""

    mode = "connectivity"

    def __init__(self, n, policy=None, meter=None):
        self.meter = meter or CostMeter(policy or ArbitraryPolicy(0))
        self.core = SparsTree(n, self.mode, self.meter)

    @property
    def n(self):
        return self.core.n

    def _i(self, v):
        if not 1 <= v <= self.core.n:
            raise SparsError(f"node id {v} out of range 1..{self.core.n}")
        return v - 1

    def activate_node(self, v):
        with self.meter.operation(DEPTH_BUDGETS["activate"], "activate"):
            self.core.activate_node(self._i(v))

    def deactivate_node(self, v):
        with self.meter.operation(DEPTH_BUDGETS["deactivate"], "deactivate"):
            self.core.deactivate_node(self._i(v))

    def insert_edge(self, u, v):
        with self.meter.operation(DEPTH_BUDGETS["insert"], "insert"):
            self.core.insert_edge(self._i(u), self._i(v))

    def delete_edge(self, u, v):
        with self.meter.operation(DEPTH_BUDGETS["delete"], "delete"):
            self.core.delete_edge(self._i(u), self._i(v))

    def connected(self, u, v):
        with self.meter.operation(DEPTH_BUDGETS["connected"], "connected"):
            return self.core.connected(self._i(u), self._i(v))

    def n_components(self):
        with self.meter.operation(DEPTH_BUDGETS["ncomponents"], "ncomponents"):
            return self.core.n_components()


class DynamicConnectivity(_Facade):
    """Connectivity / spanning-forest queries under edge and node updates."""

    mode = "connectivity"

    def tree_edge(self, u, v):
        with self.meter.operation(DEPTH_BUDGETS["treeedge"], "treeedge"):
            return self.core.tree_edge(self._i(u), self._i(v))


class DynamicBipartiteness(_Facade):
    """Bipartiteness queries under edge and node updates."""

    mode = "bipartiteness"

    def is_bipartite(self):
        with self.meter.operation(DEPTH_BUDGETS["bipartite"], "bipartite"):
            return self.core.is_bipartite()

import itertools
import random

import pytest

from dynconn.costmodel import ArbitraryPolicy, CommonPolicy, CostMeter
from dynconn.oracle import (
    SimpleGraph,
    bf_bipartite,
    bf_components,
    bf_connected,
    check_spars_tree,
)
from dynconn.sparsify import DynamicBipartiteness, DynamicConnectivity, SparsError


def conn_facade(n, seed=0, policy=None):
    return DynamicConnectivity(n, policy=policy or ArbitraryPolicy(seed))


def bip_facade(n, seed=0, policy=None):
    return DynamicBipartiteness(n, policy=policy or ArbitraryPolicy(seed))


class TestBasics:
    def test_root_key_and_fresh_counts(self):
        d = conn_facade(8)
        assert d.core.root_key == (0, 0, 0)
        for v in range(1, 9):
            d.activate_node(v)
        assert d.n_components() == 8

    def test_activate_deactivate_roundtrip(self):
        d = conn_facade(8)
        d.activate_node(1)
        d.activate_node(2)
        before = d.n_components()
        d.activate_node(3)
        d.deactivate_node(3)
        assert d.n_components() == before

    def test_deactivate_non_isolated_rejected(self):
        d = conn_facade(4)
        d.activate_node(1)
        d.activate_node(2)
        d.insert_edge(1, 2)
        with pytest.raises(SparsError, match="not isolated"):
            d.deactivate_node(1)

    def test_id_range(self):
        d = conn_facade(4)
        with pytest.raises(SparsError):
            d.activate_node(0)
        with pytest.raises(SparsError):
            d.activate_node(5)

    def test_first_edge_inserted_at_all_levels(self):
        d = conn_facade(8)
        d.activate_node(1)
        d.activate_node(5)
        d.insert_edge(1, 5)
        holding = [
            node for node in d.core.nodes.values()
            if (0, 4) in node.base_edges
        ]
        assert len(holding) == d.core.levels + 1

    def test_cycle_edge_lands_at_two_levels(self):
        d = conn_facade(8)
        for v in (1, 2, 3):
            d.activate_node(v)
        d.insert_edge(1, 2)
        d.insert_edge(2, 3)
        d.insert_edge(1, 3)  # closes a triangle inside one leaf-side subtree
        # the cycle-closing edge joins only levels where its endpoints were
        # still disconnected, plus one parent
        holding = [n for n in d.core.nodes.values() if (0, 2) in n.base_edges]
        per_level = {}
        for x, y in [(0, 1), (1, 2), (0, 2)]:
            for node in d.core.nodes.values():
                if (x, y) in node.base_edges:
                    per_level.setdefault((x, y), []).append(node.key[0])
        assert holding, "edge missing everywhere"
        check_spars_tree(d.core)

    def test_duplicate_and_self_loop(self):
        d = conn_facade(4)
        d.activate_node(1)
        d.activate_node(2)
        d.insert_edge(1, 2)
        with pytest.raises(SparsError):
            d.insert_edge(2, 1)
        with pytest.raises(SparsError):
            d.insert_edge(1, 1)
        with pytest.raises(SparsError):
            d.delete_edge(1, 3)


class TestDeletions:
    def test_bridge_delete_splits_everywhere(self):
        d = conn_facade(8)
        for v in (1, 2, 3):
            d.activate_node(v)
        d.insert_edge(1, 2)
        d.insert_edge(2, 3)
        assert d.n_components() == 1
        d.delete_edge(1, 2)
        assert d.n_components() == 2
        assert not d.connected(1, 2)
        check_spars_tree(d.core)

    def test_triangle_delete_swaps_to_shared_replacement(self):
        d = conn_facade(8)
        for v in (1, 4, 7):
            d.activate_node(v)
        d.insert_edge(1, 4)
        d.insert_edge(4, 7)
        d.insert_edge(1, 7)
        d.delete_edge(1, 4)
        assert d.connected(1, 4)
        assert d.n_components() == 1
        check_spars_tree(d.core)

    def test_non_tree_delete_keeps_forests_where_non_tree(self):
        d = conn_facade(8)
        for v in (1, 2, 3):
            d.activate_node(v)
        d.insert_edge(1, 2)
        d.insert_edge(2, 3)
        d.insert_edge(1, 3)
        # (1,3) is a tree edge only deep on its own path (it always spans its
        # leaf pair); levels where it is non-tree must keep their forests
        frozen = {
            key: node.forest_edges()
            for key, node in d.core.nodes.items()
            if (0, 2) not in node.forest_edges()
        }
        root_forest = d.core.root().forest_edges()
        d.delete_edge(1, 3)
        for key, want in frozen.items():
            assert d.core.nodes[key].forest_edges() == want
        assert d.core.root().forest_edges() == root_forest
        check_spars_tree(d.core)


class TestDifferential:
    @pytest.mark.parametrize(
        "policy", [ArbitraryPolicy(17), CommonPolicy(0.25)]
    )
    def test_random_scripts_match_bfs(self, policy):
        rng = random.Random(8)
        n = 24
        d = DynamicConnectivity(n, policy=policy)
        g = SimpleGraph()
        for v in range(1, n + 1):
            d.activate_node(v)
            g.activate(v)
        for step in range(350):
            u, v = rng.randrange(1, n + 1), rng.randrange(1, n + 1)
            if u == v:
                continue
            if g.has_edge(u, v):
                d.delete_edge(u, v)
                g.remove_edge(u, v)
            else:
                d.insert_edge(u, v)
                g.add_edge(u, v)
            assert d.n_components() == bf_components(g)
            a, b = rng.randrange(1, n + 1), rng.randrange(1, n + 1)
            assert d.connected(a, b) == bf_connected(g, a, b)
            if step % 25 == 0:
                check_spars_tree(d.core)
        check_spars_tree(d.core)

    def test_tree_edges_mark_spanning_forest(self):
        rng = random.Random(77)
        n = 16
        d = conn_facade(n, seed=5)
        g = SimpleGraph()
        for v in range(1, n + 1):
            d.activate_node(v)
            g.activate(v)
        for _ in range(150):
            u, v = rng.randrange(1, n + 1), rng.randrange(1, n + 1)
            if u == v:
                continue
            if g.has_edge(u, v):
                d.delete_edge(u, v)
                g.remove_edge(u, v)
            else:
                d.insert_edge(u, v)
                g.add_edge(u, v)
        marked = [(u, v) for (u, v) in g.edges() if d.tree_edge(u, v)]
        forest = SimpleGraph()
        for v in range(1, n + 1):
            forest.activate(v)
        for u, v in marked:
            forest.add_edge(u, v)
        assert len(marked) == n - bf_components(g)
        assert bf_components(forest) == bf_components(g)


class TestBipartiteness:
    def test_edgeless_graph(self):
        d = bip_facade(8)
        for v in range(1, 9):
            d.activate_node(v)
        assert d.is_bipartite()

    def test_odd_cycle_across_leaves(self):
        d = bip_facade(8)
        for v in (1, 4, 8):
            d.activate_node(v)
        d.insert_edge(1, 4)
        d.insert_edge(4, 8)
        assert d.is_bipartite()
        d.insert_edge(1, 8)
        assert not d.is_bipartite()
        d.delete_edge(4, 8)
        assert d.is_bipartite()
        check_spars_tree(d.core)

    def test_wrong_mode_rejected(self):
        d = conn_facade(4)
        with pytest.raises(AttributeError):
            d.is_bipartite()

    def test_exhaustive_graphs_on_up_to_five_nodes(self):
        n = 5
        all_edges = list(itertools.combinations(range(1, n + 1), 2))
        rng = random.Random(3)
        for trial in range(120):
            mask = rng.randrange(1 << len(all_edges))
            edges = [e for i, e in enumerate(all_edges) if mask >> i & 1]
            d = bip_facade(n, seed=trial)
            g = SimpleGraph()
            for v in range(1, n + 1):
                d.activate_node(v)
                g.activate(v)
            for u, v in edges:
                d.insert_edge(u, v)
                g.add_edge(u, v)
                assert d.is_bipartite() == bf_bipartite(g)
            for u, v in edges:
                d.delete_edge(u, v)
                g.remove_edge(u, v)
                assert d.is_bipartite() == bf_bipartite(g)
            check_spars_tree(d.core)

    def test_random_scripts_match_two_coloring(self):
        rng = random.Random(6)
        n = 12
        d = bip_facade(n, seed=9)
        g = SimpleGraph()
        for v in range(1, n + 1):
            d.activate_node(v)
            g.activate(v)
        for step in range(200):
            u, v = rng.randrange(1, n + 1), rng.randrange(1, n + 1)
            if u == v:
                continue
            if g.has_edge(u, v):
                d.delete_edge(u, v)
                g.remove_edge(u, v)
            else:
                d.insert_edge(u, v)
                g.add_edge(u, v)
            assert d.is_bipartite() == bf_bipartite(g)
            if step % 40 == 0:
                check_spars_tree(d.core)


class TestDepthPadding:
    def test_depth_constant_across_sizes(self):
        rng = random.Random(2)
        maxima = {}
        for n in (32, 64, 128):
            d = conn_facade(n, seed=1)
            m = d.meter
            for v in range(1, n + 1):
                d.activate_node(v)
            worst = {}
            for step in range(120):
                u, v = rng.randrange(1, n + 1), rng.randrange(1, n + 1)
                if u == v:
                    continue
                m.reset()
                if d.core.graph.has_edge(u - 1, v - 1):
                    d.delete_edge(u, v)
                    worst["delete"] = max(worst.get("delete", 0), m.depth)
                else:
                    d.insert_edge(u, v)
                    worst["insert"] = max(worst.get("insert", 0), m.depth)
                m.reset()
                d.connected(1, 2)
                worst["connected"] = max(worst.get("connected", 0), m.depth)
            maxima[n] = worst
        baseline = maxima[32]
        for n, worst in maxima.items():
            assert worst == baseline, f"depth profile changed at n={n}"

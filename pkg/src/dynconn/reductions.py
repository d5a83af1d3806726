"""Reductions: unbounded-degree connectivity and dynamic bipartiteness.

Three layers, each a constant-factor translation into the previous one:

  ConnGeneral      degree-unbounded spanning forest.  Every host node of
                   degree d becomes a cycle of d gadget nodes (one per
                   incident edge, single node for d=1) and every host edge a
                   "cross" edge between its two gadget nodes.  Cycles are
                   kept internally tree-connected by splicing new nodes in
                   before removing edges and steering every cycle-edge
                   deletion with a locally known non-tree hint, which makes
                   host tree edges exactly the cross tree edges.

  BipartiteBounded degree-<=3 bipartiteness via the count identity between
                   components of the graph and of its distance-exactly-2
                   graph (corrected for isolated nodes, which contribute one
                   component to each side rather than two).

  BipartiteGeneral degree-unbounded bipartiteness: each host node of degree
                   d becomes an alternating cycle of 2d nodes whose even
                   positions carry the incident edges, so paths through the
                   gadget have even length and bipartiteness is preserved.

Every operation counts its translated inner operations and asserts fixed
per-call bounds, so a regression that breaks the constant-translation
property fails loudly.
"""

from __future__ import annotations

from .costmodel import CostMeter
from .eulerforest import EulerForest, ForestError, ReplacementReport


class GadgetError(ValueError):
    pass


class OpCounter:
    """Per-call tally of translated operations with hard ceilings."""

    __slots__ = ("node_add", "node_del", "edge_add", "edge_del", "maxima")

    def __init__(self):
        self.maxima = {}
        self.reset()

    def reset(self):
        self.node_add = 0
        self.node_del = 0
        self.edge_add = 0
        self.edge_del = 0

    def close(self, label, limits):
        got = (self.node_add, self.node_del, self.edge_add, self.edge_del)
        peak = self.maxima.get(label, (0, 0, 0, 0))
        self.maxima[label] = tuple(max(a, b) for a, b in zip(peak, got))
        for name, value, cap in zip(
            ("node additions", "node removals", "edge insertions", "edge deletions"),
            got,
            limits,
        ):
            if cap is not None and value > cap:
                raise AssertionError(
                    f"{label}: {value} {name} exceeds the translation bound {cap}"
                )


class ConnGeneral:
    """Spanning forest / connectivity for hosts of unbounded degree."""

    def __init__(self, meter: CostMeter, host_capacity: int, edge_capacity: int):
        self.meter = meter
        self.host_capacity = host_capacity
        self.edge_capacity = edge_capacity
        self.inner = EulerForest(
            meter, 2 * edge_capacity + 2, priority_of=self._priority
        )
        self.host_active = bytearray(host_capacity)
        self.host_adj = [[] for _ in range(host_capacity)]
        self.cycle = [[] for _ in range(host_capacity)]
        self.owner = {}
        self.ports = {}
        self.free = list(range(2 * edge_capacity + 1, -1, -1))
        self.isolated = 0
        self.active_hosts = 0
        self.counts = OpCounter()
        with meter.initialization():
            meter.charge(host_capacity)

    def _priority(self, a, b):
        # same-cycle edges are the preferred replacement class: when a cycle
        # edge is deleted, swapping in the cycle's own chord keeps the cycle
        # internally tree-connected (a cross replacement would break it; for
        # cross-edge deletions no cycle edge can span the cut, so the
        # preference never misleads there)
        return 0 if self.owner[a] == self.owner[b] else 1

    # -- node lifecycle --------------------------------------------------------

    def activate_node(self, v):
        self._check_host(v)
        if self.host_active[v]:
            raise GadgetError(f"host node {v} already active")
        self.host_active[v] = 1
        self.active_hosts += 1
        self.isolated += 1
        self.meter.charge(1)

    def deactivate_node(self, v):
        self._require_host(v)
        if self.host_adj[v]:
            raise GadgetError(f"host node {v} not isolated")
        self.host_active[v] = 0
        self.active_hosts -= 1
        self.isolated -= 1
        self.meter.charge(1)

    # -- queries ------------------------------------------------------------------

    def connected(self, u, v):
        self._require_host(u)
        self._require_host(v)
        if u == v:
            return True
        if not self.host_adj[u] or not self.host_adj[v]:
            return False
        return self.inner.connected(self.cycle[u][0], self.cycle[v][0])

    def n_components(self):
        return self.inner.n_components() + self.isolated

    def tree_edge(self, u, v):
        key = (u, v)
        if key not in self.ports:
            return False
        return self.inner.tree_edge(self.ports[key], self.ports[(v, u)])

    def has_edge(self, u, v):
        return (u, v) in self.ports

    def degree(self, v):
        return len(self.host_adj[v])

    def find_replacement(self, u, v):
        """Probe: what delete_edge would report, host-mapped, no mutation."""
        if (u, v) not in self.ports:
            raise GadgetError(f"edge ({u},{v}) absent")
        rep = self.inner.find_replacement(self.ports[(u, v)], self.ports[(v, u)])
        return self._map_report(rep)

    def _map_report(self, rep):
        if rep.kind != ReplacementReport.REPLACED:
            return ReplacementReport(rep.kind)
        a, b = rep.edge
        ha, hb = self.owner[a], self.owner[b]
        if ha == hb:
            raise AssertionError("replacement fell inside one gadget cycle")
        return ReplacementReport(
            ReplacementReport.REPLACED, (ha, hb) if ha < hb else (hb, ha)
        )

    # -- edge changes -----------------------------------------------------------------

    def insert_edge(self, u, v):
        self._require_host(u)
        self._require_host(v)
        if u == v:
            raise GadgetError("self-loop")
        if (u, v) in self.ports:
            raise GadgetError(f"edge ({u},{v}) already present")
        self.counts.reset()
        g_uv = self._splice_in(u)
        g_vu = self._splice_in(v)
        self.ports[(u, v)] = g_uv
        self.ports[(v, u)] = g_vu
        self.host_adj[u].append(v)
        self.host_adj[v].append(u)
        self._ins(g_uv, g_vu)
        self.counts.close("conn_gadget_insert", (2, 0, 5, 2))
        return None

    def delete_edge(self, u, v):
        return self._delete(u, v, None)

    def delete_edge_with_hint(self, u, v, hint):
        """Delete (u, v) but adopt the given host edge as replacement if it
        reconnects; the hint must be a present non-tree host edge."""
        a, b = hint
        if (a, b) not in self.ports:
            raise GadgetError(f"hint ({a},{b}) is not an edge")
        if self.tree_edge(a, b):
            raise GadgetError(f"hint ({a},{b}) is a tree edge")
        return self._delete(u, v, hint)

    def _delete(self, u, v, hint):
        if (u, v) not in self.ports:
            raise GadgetError(f"edge ({u},{v}) absent")
        self.counts.reset()
        g_uv = self.ports.pop((u, v))
        g_vu = self.ports.pop((v, u))
        if hint is None:
            rep = self.inner.delete_edge(g_uv, g_vu)
        else:
            a, b = hint
            rep = self.inner.delete_edge_with_hint(
                g_uv, g_vu, (self.ports[(a, b)], self.ports[(b, a)])
            )
        self.counts.edge_del += 1
        self._splice_out(u, g_uv)
        self._splice_out(v, g_vu)
        for g in (g_uv, g_vu):
            self.inner.deactivate_node(g)
            self.free.append(g)
            del self.owner[g]
            self.counts.node_del += 1
        self.host_adj[u].remove(v)
        self.host_adj[v].remove(u)
        self.counts.close("conn_gadget_delete", (0, 2, 2, 5))
        return self._map_report(rep)

    # -- gadget cycle surgery ------------------------------------------------------------

    def _alloc(self, host):
        if not self.free:
            raise GadgetError("edge capacity exhausted")
        g = self.free.pop()
        self.inner.activate_node(g)
        self.owner[g] = host
        self.counts.node_add += 1
        return g

    def _splice_in(self, u):
        # full gadget nodes sit at degree 3 (two cycle edges plus the cross
        # edge), so the broken cycle edge is deleted before the new ones go
        # in; the same-cycle replacement preference keeps the cycle's tree
        # connectivity across that deletion
        cyc = self.cycle[u]
        d = len(cyc)
        g = self._alloc(u)
        if d == 0:
            self.isolated -= 1
        elif d == 1:
            self._ins(cyc[0], g)
        elif d == 2:
            self._ins(cyc[1], g)
            self._ins(g, cyc[0])
        else:
            tail, head = cyc[-1], cyc[0]
            self._del(tail, head)
            self._ins(tail, g)
            self._ins(g, head)
        cyc.append(g)
        return g

    def _splice_out(self, u, g):
        cyc = self.cycle[u]
        d = len(cyc)
        i = cyc.index(g)
        if d == 1:
            self.isolated += 1
        elif d == 2:
            other = cyc[1 - i]
            self._del(other, g)
        elif d == 3:
            a, b = (x for x in cyc if x is not g)
            self._del(g, a)
            self._del(g, b)
        else:
            prev = cyc[i - 1]
            nxt = cyc[(i + 1) % d]
            self._del(prev, g)
            self._del(g, nxt)
            self._ins(prev, nxt)
        cyc.remove(g)

    def _ins(self, a, b):
        self.inner.insert_edge(a, b)
        self.counts.edge_add += 1

    def _del(self, a, b):
        self.inner.delete_edge(a, b)
        self.counts.edge_del += 1

    # -- checker access -----------------------------------------------------------------

    def host_nodes(self):
        return [v for v in range(self.host_capacity) if self.host_active[v]]

    def host_degree(self, v):
        return len(self.host_adj[v])

    def cycle_nodes(self, v):
        return list(self.cycle[v])

    def cycle_edges(self, v):
        cyc = self.cycle[v]
        d = len(cyc)
        if d < 2:
            return []
        if d == 2:
            return [(cyc[0], cyc[1])]
        return [(cyc[i], cyc[(i + 1) % d]) for i in range(d)]

    def cross_edges(self):
        return [
            ((u, v), (g, self.ports[(v, u)]))
            for (u, v), g in self.ports.items()
            if u < v
        ]

    def _check_host(self, v):
        if not 0 <= v < self.host_capacity:
            raise GadgetError(f"host id {v} out of range")

    def _require_host(self, v):
        self._check_host(v)
        if not self.host_active[v]:
            raise GadgetError(f"host node {v} not active")


class BipartiteBounded:
    """Bipartiteness of a degree-<=3 graph via its distance-2 companion.

    The graph is bipartite exactly when the distance-2 graph has
    2 * components(G) - isolated(G) components: a nontrivial component splits
    into its two colour classes in the companion, while an isolated node
    stays one component on both sides.
    """

    def __init__(self, meter: CostMeter, capacity: int):
        self.meter = meter
        self.capacity = capacity
        self.g = EulerForest(meter, capacity)
        self.p2 = ConnGeneral(meter, capacity, 5 * capacity)
        self.witness = {}
        self.isolated = 0
        self.max_p2_changes = 0

    def activate_node(self, v):
        self.g.activate_node(v)
        self.p2.activate_node(v)
        self.isolated += 1

    def deactivate_node(self, v):
        self.g.deactivate_node(v)
        self.p2.deactivate_node(v)
        self.isolated -= 1

    def apply_edge(self, u, v, insert: bool):
        if insert:
            before_u = list(self.g.nbr[u])
            before_v = list(self.g.nbr[v])
            self.g.insert_edge(u, v)
            self.isolated -= (not before_u) + (not before_v)
            changes = 0
            for x in before_u:
                changes += self._bump(x, v, +1)
            for y in before_v:
                changes += self._bump(u, y, +1)
        else:
            self.g.delete_edge(u, v)
            self.isolated += (not self.g.nbr[u]) + (not self.g.nbr[v])
            changes = 0
            for x in self.g.nbr[u]:
                changes += self._bump(x, v, -1)
            for y in self.g.nbr[v]:
                changes += self._bump(u, y, -1)
        if changes > 6:
            raise AssertionError(
                f"{changes} companion-graph changes for one host edge (bound 6)"
            )
        if changes > self.max_p2_changes:
            self.max_p2_changes = changes

    def _bump(self, x, z, delta):
        if x == z:
            return 0
        key = (x, z) if x < z else (z, x)
        count = self.witness.get(key, 0) + delta
        if count < 0:
            raise AssertionError(f"negative witness count for {key}")
        if count:
            self.witness[key] = count
        else:
            self.witness.pop(key, None)
        self.meter.charge(2)
        if delta > 0 and count == 1:
            self.p2.insert_edge(*key)
            return 1
        if delta < 0 and count == 0:
            self.p2.delete_edge(*key)
            return 1
        return 0

    def is_bipartite(self):
        self.meter.charge(3)
        return self.p2.n_components() == 2 * self.g.n_components() - self.isolated


class BipartiteGeneral:
    """Bipartiteness of an unbounded-degree graph via alternating 2d-cycles."""

    def __init__(self, meter: CostMeter, host_capacity: int, edge_capacity: int):
        self.meter = meter
        self.host_capacity = host_capacity
        inner_cap = 4 * edge_capacity + 2
        self.inner = BipartiteBounded(meter, inner_cap)
        self.host_active = bytearray(host_capacity)
        self.host_adj = [[] for _ in range(host_capacity)]
        self.cycle = [[] for _ in range(host_capacity)]
        self.port_of = {}
        self.free = list(range(inner_cap - 1, -1, -1))
        self.counts = OpCounter()
        with meter.initialization():
            meter.charge(host_capacity)

    def activate_node(self, v):
        if self.host_active[v]:
            raise GadgetError(f"host node {v} already active")
        self.host_active[v] = 1

    def deactivate_node(self, v):
        if not self.host_active[v]:
            raise GadgetError(f"host node {v} not active")
        if self.host_adj[v]:
            raise GadgetError(f"host node {v} not isolated")
        self.host_active[v] = 0

    def has_edge(self, u, v):
        return (u, v) in self.port_of

    def apply_edge(self, u, v, insert: bool):
        if not (self.host_active[u] and self.host_active[v]):
            raise GadgetError("inactive endpoint")
        if u == v:
            raise GadgetError("self-loop")
        self.counts.reset()
        if insert:
            if (u, v) in self.port_of:
                raise GadgetError(f"edge ({u},{v}) already present")
            pu = self._grow(u)
            pv = self._grow(v)
            self.port_of[(u, v)] = pu
            self.port_of[(v, u)] = pv
            self._apply(pu, pv, True)
            self.host_adj[u].append(v)
            self.host_adj[v].append(u)
            self.counts.close("bipartite_gadget_insert", (4, 0, 7, 2))
        else:
            if (u, v) not in self.port_of:
                raise GadgetError(f"edge ({u},{v}) absent")
            pu = self.port_of.pop((u, v))
            pv = self.port_of.pop((v, u))
            self._apply(pu, pv, False)
            self._shrink(u, pu)
            self._shrink(v, pv)
            self.host_adj[u].remove(v)
            self.host_adj[v].remove(u)
            self.counts.close("bipartite_gadget_delete", (0, 4, 2, 7))
        if self.counts.edge_add + self.counts.edge_del > 9:
            raise AssertionError("bipartite gadget exceeded 9 edge changes")

    def is_bipartite(self):
        return self.inner.is_bipartite()

    # -- 2d-cycle surgery ----------------------------------------------------------

    def _grow(self, u):
        """Extend u's alternating cycle by one port/spacer pair; return the port."""
        cyc = self.cycle[u]
        d = len(cyc) // 2
        port = self._alloc()
        spacer = self._alloc()
        if d == 0:
            self._apply(port, spacer, True)
        elif d == 1:
            # 2-node cycle [p0, s0] with one edge grows to a 4-cycle
            self._apply(cyc[1], port, True)
            self._apply(port, spacer, True)
            self._apply(spacer, cyc[0], True)
        else:
            # the head port is full (two cycle edges + its host edge), so the
            # wrap edge must go before the new edge into it comes in
            tail, head = cyc[-1], cyc[0]
            self._apply(tail, port, True)
            self._apply(port, spacer, True)
            self._apply(tail, head, False)
            self._apply(spacer, head, True)
        cyc.extend((port, spacer))
        return port

    def _shrink(self, u, port):
        cyc = self.cycle[u]
        d = len(cyc) // 2
        i = cyc.index(port)
        spacer = cyc[i + 1]
        if d == 1:
            self._apply(port, spacer, False)
        elif d == 2:
            self._apply(cyc[i - 1], port, False)
            self._apply(port, spacer, False)
            self._apply(spacer, cyc[(i + 2) % 4], False)
        else:
            prev = cyc[i - 1]
            nxt = cyc[(i + 2) % len(cyc)]
            self._apply(prev, port, False)
            self._apply(port, spacer, False)
            self._apply(spacer, nxt, False)
            self._apply(prev, nxt, True)
        del cyc[i : i + 2]
        for g in (port, spacer):
            self.inner.deactivate_node(g)
            self.free.append(g)
            self.counts.node_del += 1

    def _alloc(self):
        if not self.free:
            raise GadgetError("edge capacity exhausted")
        g = self.free.pop()
        self.inner.activate_node(g)
        self.counts.node_add += 1
        return g

    def _apply(self, a, b, insert):
        self.inner.apply_edge(a, b, insert)
        if insert:
            self.counts.edge_add += 1
        else:
            self.counts.edge_del += 1

"""Counting tools: greedy disjoint tree packing and cycle-threat bounds.

The packing loop mirrors a peel-and-extract induction: vertices of degree
at most t-2 cannot start a copy of a t-vertex tree, so they are peeled
away; any surviving edge extends greedily to a full copy because every
survivor has degree at least t-1.  Extracting a copy removes at most
t * maxdeg edges, which yields the (e - (t-2)v) / (t * maxdeg) guarantee
on the family size.
"""

from __future__ import annotations

from dataclasses import dataclass

from .multigraph import GraphStructureError, LabeledMultigraph
from .threats import Embedding, cycle_threats


class ExtensionError(ValueError):
    """A partial tree embedding could not be extended in this host."""


@dataclass(frozen=True)
class DisjointCopyFamily:
    tree: LabeledMultigraph
    embeddings: tuple

    def __len__(self) -> int:
        return len(self.embeddings)

    def validate(self, host: LabeledMultigraph) -> None:
        seen: set[int] = set()
        for emb in self.embeddings:
            emb.validate(self.tree, host)
            vs = emb.host_vertices()
            assert not (vs & seen), "family members share vertices"
            seen |= vs


def _tree_extension_order(tree: LabeledMultigraph, placed: set) -> list:
    """(vertex, parent, pattern edge id) in an order growing from ``placed``."""
    order = []
    done = set(placed)
    frontier = list(placed)
    while frontier:
        x = frontier.pop(0)
        for n, eid in sorted(tree.adjacency[x]):
            if n not in done:
                order.append((n, x, eid))
                done.add(n)
                frontier.append(n)
    if len(done) != tree.vertex_count:
        raise GraphStructureError("partial embedding does not touch every component")
    return order


def embed_tree_extend(
    host: LabeledMultigraph, tree: LabeledMultigraph, partial: Embedding
) -> Embedding:
    """Grow a partial subtree embedding leaf by leaf, greedily.

    Each unplaced tree vertex attaches to its already-placed parent via the
    host neighbour with the smallest id not yet used.  Guaranteed to finish
    when every relevant host degree is at least v(tree) - 1; otherwise it
    may raise :class:`ExtensionError`.
    """
    if tree.cycle_rank() != 0 or not tree.is_connected():
        raise GraphStructureError("pattern must be a tree")
    vmap = dict(partial.vertex_map)
    emap = dict(partial.edge_map)
    used = set(vmap.values())
    for tv, parent, teid in _tree_extension_order(tree, set(vmap)):
        hp = vmap[parent]
        pick = None
        for hn, heid in sorted(host.adjacency[hp]):
            if hn not in used and hn != hp:
                pick = (hn, heid)
                break
        if pick is None:
            raise ExtensionError(
                f"no free host neighbour at {hp} for tree vertex {tv}"
            )
        vmap[tv] = pick[0]
        emap[teid] = pick[1]
        used.add(pick[0])
    emb = Embedding(vmap, emap)
    emb.validate(tree, host)
    return emb


def _peel_low_degree(adj: dict, min_deg: int) -> None:
    """Remove vertices of degree < min_deg, cascading; mutates adj."""
    queue = [v for v, ns in adj.items() if len(ns) < min_deg]
    while queue:
        v = queue.pop()
        if v not in adj:
            continue
        for n, _ in adj[v]:
            if n in adj and n != v:
                adj[n] = [(w, e) for (w, e) in adj[n] if w != v]
                if len(adj[n]) < min_deg:
                    queue.append(n)
        del adj[v]


def extract_disjoint_trees(
    host: LabeledMultigraph, tree: LabeledMultigraph
) -> DisjointCopyFamily:
    """Greedy family of pairwise vertex-disjoint tree copies.

    Size is at least (e(G) - (t-2)v(G)) / (t * maxdeg(G)); ties are broken
    by smallest vertex/edge ids so results are reproducible.
    """
    if tree.cycle_rank() != 0 or not tree.is_connected():
        raise GraphStructureError("pattern must be a tree")
    t = tree.vertex_count
    if t == 1:
        # every host vertex is a copy; return them all
        embs = [Embedding({0: v}, {}) for v in range(host.vertex_count)]
        return DisjointCopyFamily(tree, tuple(embs))

    adj: dict[int, list] = {
        v: [(n, e) for (n, e) in host.adjacency[v] if n != v]
        for v in range(host.vertex_count)
    }
    found = []
    root_edge = min(tree.edges, key=lambda e: e.eid)
    while True:
        _peel_low_degree(adj, t - 1)
        if not adj:
            break
        # lowest surviving edge seeds the next copy
        u = min(adj)
        v, heid = min(adj[u])
        # greedy extension inside the peeled graph
        vmap = {root_edge.u: u, root_edge.v: v}
        emap = {root_edge.eid: heid}
        used = {u, v}
        ok = True
        for tv, parent, teid in _tree_extension_order(tree, {root_edge.u, root_edge.v}):
            hp = vmap[parent]
            pick = None
            for hn, he in sorted(adj[hp]):
                if hn not in used:
                    pick = (hn, he)
                    break
            if pick is None:
                ok = False
                break
            vmap[tv] = pick[0]
            emap[teid] = pick[1]
            used.add(pick[0])
        assert ok, "peeled graph must extend any surviving edge"
        emb = Embedding(vmap, emap)
        emb.validate(tree, host)
        found.append(emb)
        for x in used:
            if x in adj:
                for n, _ in adj[x]:
                    if n in adj and n != x:
                        adj[n] = [(w, e) for (w, e) in adj[n] if w != x]
                del adj[x]
    fam = DisjointCopyFamily(tree, tuple(found))
    fam.validate(host)
    return fam


def packing_lower_bound(host: LabeledMultigraph, tree: LabeledMultigraph):
    """(e - (t-2)v) / (t * maxdeg) as an exact rational (0 if degenerate)."""
    from fractions import Fraction

    t = tree.vertex_count
    maxdeg = max((host.degree(v) for v in range(host.vertex_count)), default=0)
    if maxdeg == 0:
        return Fraction(0)
    return Fraction(host.edge_count - (t - 2) * host.vertex_count, t * maxdeg)


def verify_cycle_threat_bound(g: LabeledMultigraph, pattern: LabeledMultigraph):
    """(count, bound, ok): cycle-completing pairs vs e(G) - (h-2)v(G)."""
    count = len(cycle_threats(g, pattern))
    bound = g.edge_count - (pattern.vertex_count - 2) * g.vertex_count
    return count, bound, count >= bound

"""Labeled multigraphs with loops and doubled edges.

This module is the structural foundation for everything else: patterns,
boards, blow-ups, subgraph densities, unicyclic decompositions and the
auxiliary trees used by the bias strategies.  Multiplicities are capped at
two parallel edges per vertex pair and one loop per vertex, which is all
the strategy machinery ever needs.

All types here are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Optional, Sequence


class GraphStructureError(ValueError):
    """An input graph violates a structural precondition."""


class PatternSizeError(ValueError):
    """A pattern is too large for the exhaustive-search size contract."""


@dataclass(frozen=True)
class Edge:
    """A single edge. ``u == v`` encodes a loop."""

    u: int
    v: int
    eid: int

    def is_loop(self) -> bool:
        return self.u == self.v

    def pair(self) -> tuple[int, int]:
        """Endpoints as a sorted tuple (canonical key for parallels)."""
        return (self.u, self.v) if self.u <= self.v else (self.v, self.u)

    def other(self, x: int) -> int:
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise ValueError(f"vertex {x} is not an endpoint of edge {self.eid}")

    def touches(self, x: int) -> bool:
        return x == self.u or x == self.v


class LabeledMultigraph:
    """A vertex-labeled multigraph with stable edge ids.

    ``edges`` may be given as ``(u, v)`` pairs (ids assigned densely in
    order) or ``(u, v, eid)`` triples.  ``friend_pairs`` is an optional
    pairing of parallel edges sharing both endpoints; it is an involution
    and both members must be distinct edges on the same vertex pair.
    """

    __slots__ = ("vertex_count", "edges", "friend_pairs", "__dict__")

    def __init__(
        self,
        vertex_count: int,
        edges: Iterable[tuple],
        friend_pairs: Iterable[tuple[int, int]] = (),
    ):
        if vertex_count < 1:
            raise GraphStructureError("vertex_count must be >= 1")
        built: list[Edge] = []
        next_id = 0
        for item in edges:
            if len(item) == 2:
                u, v = item
                eid = next_id
            else:
                u, v, eid = item
            next_id = max(next_id, eid + 1)
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise GraphStructureError(f"edge ({u},{v}) out of vertex range")
            built.append(Edge(u, v, eid))
        ids = [e.eid for e in built]
        if len(set(ids)) != len(ids):
            raise GraphStructureError("edge ids must be unique")
        object.__setattr__(self, "vertex_count", vertex_count)
        object.__setattr__(self, "edges", tuple(built))

        by_pair: dict[tuple[int, int], list[Edge]] = {}
        for e in built:
            by_pair.setdefault(e.pair(), []).append(e)
        for pair, es in by_pair.items():
            if pair[0] == pair[1]:
                if len(es) > 1:
                    raise GraphStructureError(f"more than one loop at vertex {pair[0]}")
            elif len(es) > 2:
                raise GraphStructureError(f"more than two parallel edges on {pair}")

        fp: dict[int, int] = {}
        edge_by_id = {e.eid: e for e in built}
        for a, b in friend_pairs:
            if a == b or a in fp or b in fp:
                raise GraphStructureError("friend pairing must be an involution of distinct edges")
            ea, eb = edge_by_id.get(a), edge_by_id.get(b)
            if ea is None or eb is None or ea.pair() != eb.pair() or ea.is_loop():
                raise GraphStructureError("friends must be distinct parallel edges on one pair")
            fp[a] = b
            fp[b] = a
        object.__setattr__(self, "friend_pairs", fp)

    # -- basic accessors ---------------------------------------------------

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_by_id(self) -> dict[int, Edge]:
        return {e.eid: e for e in self.edges}

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per vertex, tuple of (neighbour, edge id); loops appear once."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for e in self.edges:
            if e.is_loop():
                adj[e.u].append((e.u, e.eid))
            else:
                adj[e.u].append((e.v, e.eid))
                adj[e.v].append((e.u, e.eid))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def neighbour_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(n for n, _ in adj) for adj in self.adjacency)

    def degree(self, v: int) -> int:
        """Multigraph degree; a loop contributes 1 (incidence count used here)."""
        return len(self.adjacency[v])

    @cached_property
    def pair_map(self) -> dict:
        out: dict[tuple[int, int], tuple[int, ...]] = {}
        for e in self.edges:
            key = e.pair()
            out[key] = out.get(key, ()) + (e.eid,)
        return out

    def edges_between(self, u: int, v: int) -> list[int]:
        key = (u, v) if u <= v else (v, u)
        return list(self.pair_map.get(key, ()))

    def loop_at(self, v: int) -> Optional[int]:
        for n, eid in self.adjacency[v]:
            if n == v:
                return eid
        return None

    def friend_of(self, eid: int) -> Optional[int]:
        return self.friend_pairs.get(eid)

    @cached_property
    def is_simple(self) -> bool:
        pairs = [e.pair() for e in self.edges]
        return all(u != v for u, v in pairs) and len(set(pairs)) == len(pairs)

    @cached_property
    def has_dense_ids(self) -> bool:
        return all(e.eid == i for i, e in enumerate(self.edges))

    # -- structure queries -------------------------------------------------

    def components(self) -> list[frozenset[int]]:
        seen: set[int] = set()
        comps = []
        for s in range(self.vertex_count):
            if s in seen:
                continue
            stack, comp = [s], {s}
            seen.add(s)
            while stack:
                x = stack.pop()
                for n, _ in self.adjacency[x]:
                    if n not in comp:
                        comp.add(n)
                        seen.add(n)
                        stack.append(n)
            comps.append(frozenset(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def cycle_rank(self) -> int:
        """Number of independent cycles: e - v + #components (loops/parallels count)."""
        return self.edge_count - self.vertex_count + len(self.components())

    def induced_edge_ids(self, vertices: frozenset[int] | set[int]) -> list[int]:
        return [e.eid for e in self.edges if e.u in vertices and e.v in vertices]

    def subgraph(self, vertices: Sequence[int], edge_ids: Optional[Iterable[int]] = None) -> "LabeledMultigraph":
        """Relabelled subgraph on ``vertices`` (order gives new labels)."""
        vset = set(vertices)
        remap = {v: i for i, v in enumerate(vertices)}
        if edge_ids is None:
            chosen = [e for e in self.edges if e.u in vset and e.v in vset]
        else:
            want = set(edge_ids)
            chosen = [e for e in self.edges if e.eid in want]
            if any(e.u not in vset or e.v not in vset for e in chosen):
                raise GraphStructureError("edge ids leave the vertex set")
        new_edges = [(remap[e.u], remap[e.v], e.eid) for e in chosen]
        kept = {e.eid for e in chosen}
        fp = [(a, b) for a, b in self.friend_pairs.items() if a < b and a in kept and b in kept]
        return LabeledMultigraph(len(vertices), new_edges, fp)

    def relabelled_dense(self) -> "LabeledMultigraph":
        """Same graph with edge ids renumbered 0..m-1 in current order."""
        remap = {e.eid: i for i, e in enumerate(self.edges)}
        fp = [(remap[a], remap[b]) for a, b in self.friend_pairs.items() if a < b]
        return LabeledMultigraph(
            self.vertex_count, [(e.u, e.v, remap[e.eid]) for e in self.edges], fp
        )

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"LabeledMultigraph(n={self.vertex_count}, m={self.edge_count})"


# ---------------------------------------------------------------------------
# Densities
# ---------------------------------------------------------------------------

_DENSITY_CAP = 10


def _induced_count(g: LabeledMultigraph, vertices: tuple[int, ...]) -> int:
    vset = set(vertices)
    return sum(1 for e in g.edges if e.u in vset and e.v in vset)


def max_subgraph_density(g: LabeledMultigraph) -> Fraction:
    """Largest e(F)/v(F) over non-empty subgraphs F, as an exact rational.

    Evaluated by exhaustive enumeration of vertex subsets (the maximum is
    attained on an induced subgraph).  Loops count one edge; their vertex
    counts once.
    """
    if g.vertex_count > _DENSITY_CAP:
        raise PatternSizeError(
            f"density enumeration capped at {_DENSITY_CAP} vertices, got {g.vertex_count}"
        )
    best = Fraction(0)
    verts = range(g.vertex_count)
    for k in range(1, g.vertex_count + 1):
        for sub in combinations(verts, k):
            best = max(best, Fraction(_induced_count(g, sub), k))
    return best


def max_reduced_density(g: LabeledMultigraph) -> Fraction:
    """Largest (e(F)-1)/v(F) over subgraphs F with at least one edge."""
    if g.vertex_count > _DENSITY_CAP:
        raise PatternSizeError(
            f"density enumeration capped at {_DENSITY_CAP} vertices, got {g.vertex_count}"
        )
    if g.edge_count < 1:
        raise GraphStructureError("need at least one edge")
    best: Optional[Fraction] = None
    verts = range(g.vertex_count)
    for k in range(1, g.vertex_count + 1):
        for sub in combinations(verts, k):
            m = _induced_count(g, sub)
            if m >= 1:
                val = Fraction(m - 1, k)
                if best is None or val > best:
                    best = val
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# Unicyclic decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HangingTree:
    """Tree hanging off one cycle vertex (its root); may be trivial."""

    root: int
    vertices: frozenset[int]
    edge_ids: frozenset[int]


@dataclass(frozen=True)
class UnicyclicDecomposition:
    """Cycle + hanging trees of a connected graph with exactly one cycle."""

    cycle_vertices: tuple[int, ...]
    cycle_edge_ids: tuple[int, ...]
    hanging_trees: tuple[HangingTree, ...]

    @property
    def cycle_length(self) -> int:
        return len(self.cycle_vertices)

    @property
    def parity(self) -> str:
        return "odd" if self.cycle_length % 2 == 1 else "even"

    @property
    def is_odd(self) -> bool:
        return self.cycle_length % 2 == 1

    def tree_edge_ids(self) -> frozenset[int]:
        out: set[int] = set()
        for t in self.hanging_trees:
            out |= t.edge_ids
        return frozenset(out)


def is_unicyclic(g: LabeledMultigraph) -> bool:
    return g.is_connected() and g.cycle_rank() == 1


def unicyclic_decompose(g: LabeledMultigraph) -> UnicyclicDecomposition:
    """Split a connected one-cycle (multi)graph into its cycle and trees.

    Loops (cycle length 1) and doubled edges (cycle length 2) are accepted
    as degenerate cycles.
    """
    if not g.is_connected():
        raise GraphStructureError("graph is not connected")
    rank = g.cycle_rank()
    if rank == 0:
        raise GraphStructureError("graph is acyclic")
    if rank > 1:
        raise GraphStructureError("graph has more than one cycle")

    loops = [e for e in g.edges if e.is_loop()]
    doubles: dict[tuple[int, int], list[Edge]] = {}
    for e in g.edges:
        if not e.is_loop():
            doubles.setdefault(e.pair(), []).append(e)
    parallel = [es for es in doubles.values() if len(es) == 2]

    if loops:
        v = loops[0].u
        cycle_vertices: tuple[int, ...] = (v,)
        cycle_edge_ids: tuple[int, ...] = (loops[0].eid,)
    elif parallel:
        pair = parallel[0]
        u, v = pair[0].pair()
        cycle_vertices = (u, v)
        cycle_edge_ids = (pair[0].eid, pair[1].eid)
    else:
        # peel degree-1 vertices; what survives is the cycle
        deg = [g.degree(v) for v in range(g.vertex_count)]
        alive = [True] * g.vertex_count
        queue = [v for v in range(g.vertex_count) if deg[v] == 1]
        while queue:
            x = queue.pop()
            alive[x] = False
            for n, _ in g.adjacency[x]:
                if alive[n]:
                    deg[n] -= 1
                    if deg[n] == 1:
                        queue.append(n)
        cyc = [v for v in range(g.vertex_count) if alive[v]]
        start = min(cyc)
        on_cycle = set(cyc)
        order = [start]
        seen_edges: set[int] = set()
        cur = start
        while True:
            nxt = None
            for n, eid in sorted(g.adjacency[cur]):
                if n in on_cycle and eid not in seen_edges:
                    nxt = (n, eid)
                    break
            assert nxt is not None
            seen_edges.add(nxt[1])
            if nxt[0] == start:
                break
            order.append(nxt[0])
            cur = nxt[0]
        cycle_vertices = tuple(order)
        ids = []
        k = len(order)
        for i in range(k):
            a, b = order[i], order[(i + 1) % k]
            ids.append(g.edges_between(a, b)[0])
        cycle_edge_ids = tuple(ids)

    cyc_set = set(cycle_vertices)
    cyc_edge_set = set(cycle_edge_ids)
    trees = []
    for root in cycle_vertices:
        tv = {root}
        te: set[int] = set()
        stack = [root]
        while stack:
            x = stack.pop()
            for n, eid in g.adjacency[x]:
                if eid in cyc_edge_set or eid in te:
                    continue
                if n in cyc_set and n != root:
                    continue  # cycle edges only connect trees
                if n == x:
                    continue
                te.add(eid)
                if n not in tv:
                    tv.add(n)
                    stack.append(n)
        trees.append(HangingTree(root, frozenset(tv), frozenset(te)))
    return UnicyclicDecomposition(cycle_vertices, cycle_edge_ids, tuple(trees))


# ---------------------------------------------------------------------------
# Cycle-contracted tree and the anchored path-of-trees gadget
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootedTree:
    """Tree with one marked vertex (the image of a contracted cycle)."""

    tree: LabeledMultigraph
    root: int


def contract_cycle(h: LabeledMultigraph) -> RootedTree:
    """Contract the unique (even) cycle of ``h`` into a single marked vertex."""
    dec = unicyclic_decompose(h)
    if dec.is_odd:
        raise GraphStructureError("cycle length must be even")
    cyc = set(dec.cycle_vertices)
    others = [v for v in range(h.vertex_count) if v not in cyc]
    remap = {v: i + 1 for i, v in enumerate(others)}
    for v in cyc:
        remap[v] = 0
    edges = []
    for e in h.edges:
        if e.eid in set(dec.cycle_edge_ids):
            continue
        edges.append((remap[e.u], remap[e.v]))
    return RootedTree(LabeledMultigraph(1 + len(others), edges), 0)


@dataclass(frozen=True)
class AnchorPathTree:
    """A path of anchor vertices, each carrying one cycle-contracted tree.

    Two vertex-disjoint copies joined by a pair of edges whose anchor
    indices differ by (cycle length)/2 - 1 on both sides contain a copy of
    the original pattern; this is what the even-cycle strategy exploits.
    """

    tree: LabeledMultigraph
    anchors: tuple[int, ...]


def anchor_path_tree(h: LabeledMultigraph) -> AnchorPathTree:
    """Path on 3k/2 anchors with a disjoint contracted-tree copy at each."""
    dec = unicyclic_decompose(h)
    k = dec.cycle_length
    if k % 2 == 1:
        raise GraphStructureError("cycle length must be even")
    tp = contract_cycle(h)
    block = tp.tree.vertex_count
    count = 3 * k // 2
    edges: list[tuple[int, int]] = []
    anchors = []
    for i in range(count):
        off = i * block
        anchors.append(off + tp.root)
        for e in tp.tree.edges:
            edges.append((off + e.u, off + e.v))
    for i in range(count - 1):
        edges.append((anchors[i], anchors[i + 1]))
    tree = LabeledMultigraph(count * block, edges)
    h_count = h.vertex_count
    assert tree.vertex_count == count * block
    assert tree.vertex_count <= 3 * k * (h_count - k + 1) // 2
    return AnchorPathTree(tree, tuple(anchors))


# ---------------------------------------------------------------------------
# Blow-ups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlowUpBoard:
    """Blow-up of a pattern: parts of board vertices, bundled edges.

    ``edge_bundle`` maps each board edge id to the pattern edge id it
    realises; ``part_of`` maps each board vertex to its pattern vertex.
    Contracted boards (see :func:`contract_pattern`) keep the original
    board edge ids so transcripts stay replayable across contractions.
    """

    pattern: LabeledMultigraph
    parts: tuple[tuple[int, ...], ...]
    graph: LabeledMultigraph
    edge_bundle: dict
    part_of: dict
    merged_from: Optional[dict] = None  # new board vertex -> tuple of prior vertices

    def part_sizes(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.parts)

    def bundle_edges(self, pattern_eid: int) -> list[int]:
        return [eid for eid, b in self.edge_bundle.items() if b == pattern_eid]


def blow_up(pattern: LabeledMultigraph, sizes: Sequence[int]) -> BlowUpBoard:
    """Replace pattern vertices by independent sets and edges by bundles.

    Doubled pattern edges produce doubled bundles with the two parallels
    paired as friends; a loop on a pattern vertex puts one loop on every
    board vertex of its part.
    """
    if len(sizes) != pattern.vertex_count:
        raise GraphStructureError(
            f"need {pattern.vertex_count} part sizes, got {len(sizes)}"
        )
    if any(s < 1 for s in sizes):
        raise GraphStructureError("part sizes must be positive")
    parts: list[tuple[int, ...]] = []
    part_of: dict[int, int] = {}
    nxt = 0
    for i, s in enumerate(sizes):
        part = tuple(range(nxt, nxt + s))
        parts.append(part)
        for v in part:
            part_of[v] = i
        nxt += s

    # group pattern edges per vertex pair so doubled bundles come out paired
    by_pair: dict[tuple[int, int], list[Edge]] = {}
    for e in pattern.edges:
        by_pair.setdefault(e.pair(), []).append(e)

    edges: list[tuple[int, int, int]] = []
    friend: list[tuple[int, int]] = []
    edge_bundle: dict[int, int] = {}
    eid = 0
    for pair in sorted(by_pair):
        bundle = by_pair[pair]
        i, j = pair
        if i == j:
            for x in parts[i]:
                edges.append((x, x, eid))
                edge_bundle[eid] = bundle[0].eid
                eid += 1
            continue
        for x in parts[i]:
            for y in parts[j]:
                edges.append((x, y, eid))
                edge_bundle[eid] = bundle[0].eid
                if len(bundle) == 2:
                    edges.append((x, y, eid + 1))
                    edge_bundle[eid + 1] = bundle[1].eid
                    friend.append((eid, eid + 1))
                    eid += 2
                else:
                    eid += 1
    graph = LabeledMultigraph(nxt, edges, friend)
    return BlowUpBoard(pattern, tuple(parts), graph, edge_bundle, part_of)


@dataclass(frozen=True)
class TreeContraction:
    """Contract a subtree of the pattern; its bundles disappear.

    Group-internal board edges whose pattern edge survives as a loop
    (a cycle edge outside the subtree, or the partner of a contracted
    doubled edge) become loops on the merged vertex.
    """

    pattern_vertices: frozenset[int]
    pattern_edge_ids: frozenset[int]


@dataclass(frozen=True)
class GlueContraction:
    """Glue the ends of one pattern edge; the edge itself becomes a loop.

    Any loop on its endpoints and any parallel partner are deleted.  Each
    group must be a matched endpoint pair; the group's surviving bundle
    edge turns into the merged vertex's loop.
    """

    pattern_edge_id: int


def _pattern_quotient(
    pattern: LabeledMultigraph,
    classes: dict[int, int],
    drop_edge_ids: set[int],
    new_count: int,
) -> LabeledMultigraph:
    """Quotient of the pattern under a vertex merge, keeping edge ids."""
    edges = []
    for e in pattern.edges:
        if e.eid in drop_edge_ids:
            continue
        edges.append((classes[e.u], classes[e.v], e.eid))
    fp = []
    seen_pairs: dict[tuple[int, int], list[int]] = {}
    for u, v, eid in edges:
        key = (u, v) if u <= v else (v, u)
        seen_pairs.setdefault(key, []).append(eid)
    for key, ids in seen_pairs.items():
        if key[0] != key[1] and len(ids) == 2:
            fp.append((ids[0], ids[1]))
    return LabeledMultigraph(new_count, edges, fp)


def contract_pattern(
    board: BlowUpBoard,
    target,
    groups: Sequence[Sequence[int]],
    kept: dict[int, Sequence[int]],
) -> BlowUpBoard:
    """Contract part of the pattern on a blow-up board.

    ``target`` is a :class:`TreeContraction` (a subtree collapses, one
    merged vertex per group of board vertices realising it) or a
    :class:`GlueContraction` (the named pattern edge's matched endpoint
    pairs are glued and the matched edges become loops).  ``kept`` gives
    the surviving board vertices of every untouched pattern vertex.

    The merged pattern vertex takes index 0 in the new pattern; surviving
    pattern vertices follow in increasing order.  Board edge ids are
    preserved so transcripts stay replayable across contractions.
    """
    pattern = board.pattern
    if isinstance(target, GlueContraction):
        te = pattern.edge_by_id[target.pattern_edge_id]
        if te.is_loop():
            raise GraphStructureError("cannot glue a loop")
        merged_pattern_vertices = {te.u, te.v}
        drop: set[int] = set()
        for x in (te.u, te.v):
            lp = pattern.loop_at(x)
            if lp is not None:
                drop.add(lp)
        partner = pattern.friend_of(te.eid)
        if partner is not None:
            drop.add(partner)
    else:
        assert isinstance(target, TreeContraction)
        merged_pattern_vertices = set(target.pattern_vertices)
        sub = pattern.subgraph(sorted(merged_pattern_vertices), target.pattern_edge_ids)
        if sub.cycle_rank() != 0 or not sub.is_connected():
            raise GraphStructureError("contraction target must be a subtree of the pattern")
        drop = set(target.pattern_edge_ids)

    survivors = [v for v in range(pattern.vertex_count) if v not in merged_pattern_vertices]
    classes = {v: 0 for v in merged_pattern_vertices}
    for i, v in enumerate(survivors):
        classes[v] = i + 1
    new_pattern = _pattern_quotient(pattern, classes, drop, 1 + len(survivors))

    # board-vertex mapping: groups merge, kept vertices stay singletons
    new_part_of: dict[int, int] = {}
    merged_from: dict[int, tuple[int, ...]] = {}
    board_class: dict[int, int] = {}
    nxt = 0
    new_parts: list[list[int]] = [[] for _ in range(1 + len(survivors))]
    for grp in groups:
        if isinstance(target, GlueContraction) and len(grp) != 2:
            raise GraphStructureError("glue groups must be matched endpoint pairs")
        for v in grp:
            if board.part_of[v] not in merged_pattern_vertices:
                raise GraphStructureError("group vertex outside contracted parts")
            if v in board_class:
                raise GraphStructureError("board vertex appears in two groups")
            board_class[v] = nxt
        merged_from[nxt] = tuple(grp)
        new_part_of[nxt] = 0
        new_parts[0].append(nxt)
        nxt += 1
    for pv in survivors:
        for v in kept.get(pv, ()):
            if board.part_of[v] != pv:
                raise GraphStructureError("kept vertex listed under wrong part")
            board_class[v] = nxt
            merged_from[nxt] = (v,)
            new_part_of[nxt] = classes[pv]
            new_parts[classes[pv]].append(nxt)
            nxt += 1
    if any(not p for p in new_parts):
        raise GraphStructureError("contraction left an empty part")

    new_edges = []
    new_bundle: dict[int, int] = {}
    loop_seen: set[int] = set()
    for e in board.graph.edges:
        pe = board.edge_bundle[e.eid]
        pat_edge = new_pattern.edge_by_id.get(pe)
        if pat_edge is None:
            continue
        if e.u not in board_class or e.v not in board_class:
            continue
        nu, nv = board_class[e.u], board_class[e.v]
        if pat_edge.is_loop():
            # survives only as a loop inside one group of the right part
            if nu != nv or new_part_of[nu] != pat_edge.u:
                continue
            if nu in loop_seen:
                raise GraphStructureError("contraction put two loops on one vertex")
            loop_seen.add(nu)
        else:
            if nu == nv:
                continue
            if {new_part_of[nu], new_part_of[nv]} != {pat_edge.u, pat_edge.v}:
                continue
        new_edges.append((nu, nv, e.eid))
        new_bundle[e.eid] = pe

    fp = []
    by_pair: dict[tuple[int, int], list[int]] = {}
    for u, v, eid in new_edges:
        if u != v:
            key = (u, v) if u <= v else (v, u)
            by_pair.setdefault(key, []).append(eid)
    for key, ids in by_pair.items():
        if len(ids) == 2:
            fp.append((ids[0], ids[1]))
        elif len(ids) > 2:
            raise GraphStructureError("contraction produced multiplicity above two")

    graph = LabeledMultigraph(nxt, new_edges, fp)
    return BlowUpBoard(
        new_pattern,
        tuple(tuple(p) for p in new_parts),
        graph,
        new_bundle,
        new_part_of,
        merged_from,
    )

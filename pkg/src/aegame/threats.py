"""Copy detection and threat oracles.

Backtracking submultigraph search tuned for small patterns: pattern
vertices are ordered connectivity-first with degree-sorted tie-breaks, and
candidates are pruned through adjacency sets.  Loops must map to loops and
parallel pattern edges to distinct parallel host edges.

Hosts are abstract: a plain multigraph, a game state (Avoider's graph plus
free edges of the board), or either of those with an extra edge overlaid.
Searches are pure functions of their inputs and deterministic (vertex ids
and edge ids break all ties).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .multigraph import LabeledMultigraph, PatternSizeError

AV = 0  # edges that must already belong to the copy owner (or plain host)
FREE = 1  # edges that must currently be free on the board

_PATTERN_CAP = 12


@dataclass(frozen=True)
class Embedding:
    """Injective structure-preserving map from a pattern into a host."""

    vertex_map: dict
    edge_map: dict

    def host_vertices(self) -> frozenset[int]:
        return frozenset(self.vertex_map.values())

    def host_edges(self) -> frozenset[int]:
        return frozenset(self.edge_map.values())

    def validate(self, pattern: LabeledMultigraph, host: LabeledMultigraph) -> None:
        vm, em = self.vertex_map, self.edge_map
        assert len(set(vm.values())) == len(vm) == pattern.vertex_count
        assert len(set(em.values())) == len(em) == pattern.edge_count
        for pe in pattern.edges:
            he = host.edge_by_id[em[pe.eid]]
            assert {vm[pe.u], vm[pe.v]} == {he.u, he.v}
            assert pe.is_loop() == he.is_loop()


@dataclass
class ThreatSet:
    """Free edges that would complete a new copy, with one witness each."""

    edges: frozenset
    witnesses: dict

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, eid: int) -> bool:
        return eid in self.edges


class Host:
    """Host-side adjacency with two edge kinds (owned / free)."""

    __slots__ = ("nverts", "_adj", "_between", "_extra")

    def __init__(self, nverts, adj_fn, between_fn):
        self.nverts = nverts
        self._adj = adj_fn
        self._between = between_fn
        self._extra: dict[int, list[tuple[int, int, int]]] = {AV: [], FREE: []}

    def overlay(self, kind: int, u: int, v: int, eid: int) -> "Host":
        h = Host(self.nverts, self._adj, self._between)
        h._extra = {k: list(v2) for k, v2 in self._extra.items()}
        h._extra[kind].append((u, v, eid))
        return h

    def adj(self, kind: int, x: int):
        yield from self._adj(kind, x)
        for u, v, eid in self._extra[kind]:
            if u == x:
                yield (v, eid)
            elif v == x:
                yield (u, eid)

    def between(self, kind: int, u: int, v: int) -> list[int]:
        out = list(self._between(kind, u, v))
        for a, b, eid in self._extra[kind]:
            if {a, b} == {u, v} or (a == b == u == v):
                out.append(eid)
        return out


def graph_host(g: LabeledMultigraph) -> Host:
    pair_map: dict[tuple[int, int], list[int]] = {}
    for e in g.edges:
        pair_map.setdefault(e.pair(), []).append(e.eid)

    def adj_fn(kind, x):
        return g.adjacency[x] if kind == AV else ()

    def between_fn(kind, u, v):
        if kind != AV:
            return ()
        key = (u, v) if u <= v else (v, u)
        return pair_map.get(key, ())

    return Host(g.vertex_count, adj_fn, between_fn)


def state_host(state) -> Host:
    """Host over a game state: AV = Avoider's edges, FREE = free edges."""
    board = state.graph

    def adj_fn(kind, x):
        if kind == AV:
            return state.avoider_adjacency(x)
        return (
            (n, eid) for n, eid in board.adjacency[x] if state.is_free(eid)
        )

    def between_fn(kind, u, v):
        if kind == AV:
            return state.avoider_edges_between(u, v)
        return [eid for eid in board.edges_between(u, v) if state.is_free(eid)]

    return Host(board.vertex_count, adj_fn, between_fn)


# ---------------------------------------------------------------------------
# Pattern plans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Step:
    vertex: int
    #: (placed pattern vertex, tuple of pattern edge ids to it)
    back: tuple
    loop_eid: Optional[int]


def _plan(pattern: LabeledMultigraph, start: tuple) -> tuple:
    cache = pattern.__dict__.setdefault("_search_plans", {})
    if start in cache:
        return cache[start]
    placed = set(start)
    steps = []
    while len(placed) < pattern.vertex_count:
        best_key, best_v = None, None
        for v in range(pattern.vertex_count):
            if v in placed:
                continue
            conn = sum(1 for n, _ in pattern.adjacency[v] if n in placed and n != v)
            key = (conn, pattern.degree(v), -v)
            if best_key is None or key > best_key:
                best_key, best_v = key, v
        v = best_v
        back: dict[int, list[int]] = {}
        for n, eid in pattern.adjacency[v]:
            if n in placed and n != v:
                back.setdefault(n, []).append(eid)
        steps.append(
            _Step(
                v,
                tuple((u, tuple(sorted(eids))) for u, eids in sorted(back.items())),
                pattern.loop_at(v),
            )
        )
        placed.add(v)
    cache[start] = tuple(steps)
    return cache[start]


# ---------------------------------------------------------------------------
# Core search
# ---------------------------------------------------------------------------


def _search(
    pattern: LabeledMultigraph,
    host: Host,
    *,
    anchor: Optional[tuple] = None,  # (pattern_eid, host_u, host_v, host_eid)
    kinds: Optional[dict] = None,  # pattern eid -> AV/FREE (default AV)
    vertex_ok: Optional[Callable[[int, int], bool]] = None,
    on_found: Callable[[Embedding], bool] = lambda emb: True,
) -> Optional[Embedding]:
    """Enumerate embeddings; ``on_found`` returns True to stop.

    Returns the stopping embedding, or None when exhausted.
    """
    if pattern.vertex_count > _PATTERN_CAP:
        raise PatternSizeError(
            f"patterns capped at {_PATTERN_CAP} vertices, got {pattern.vertex_count}"
        )
    kinds = kinds or {}

    def kind_of(peid: int) -> int:
        return kinds.get(peid, AV)

    vmap: dict[int, int] = {}
    emap: dict[int, int] = {}
    used_v: set[int] = set()
    used_e: set[int] = set()

    def assign_bundle(u_host: int, w_host: int, peids: Iterable[int]) -> Optional[list[int]]:
        """Map pattern edges between two placed vertices to distinct host edges."""
        taken = []
        for peid in peids:
            got = None
            for heid in host.between(kind_of(peid), u_host, w_host):
                if heid not in used_e and heid not in taken:
                    got = heid
                    break
            if got is None:
                return None
            taken.append(got)
        return taken

    def place(pv: int, hv: int, bundles) -> Optional[list]:
        """Try to place pattern vertex pv at host vertex hv; returns undo info."""
        if hv in used_v:
            return None
        if vertex_ok is not None and not vertex_ok(pv, hv):
            return None
        taken_all: list[tuple[int, int]] = []
        for u_pv, peids in bundles:
            todo = [p for p in peids if p not in emap]
            got = assign_bundle(vmap[u_pv], hv, todo)
            if got is None:
                return None
            taken_all.extend(zip(todo, got))
        lp = pattern.loop_at(pv)
        if lp is not None and lp not in emap:
            got = assign_bundle(hv, hv, (lp,))
            if got is None:
                return None
            taken_all.extend([(lp, got[0])])
        vmap[pv] = hv
        used_v.add(hv)
        for peid, heid in taken_all:
            emap[peid] = heid
            used_e.add(heid)
        return [pv, hv, taken_all]

    def unplace(undo) -> None:
        pv, hv, taken_all = undo
        del vmap[pv]
        used_v.discard(hv)
        for peid, heid in taken_all:
            del emap[peid]
            used_e.discard(heid)

    start: tuple
    prelude: list = []
    if anchor is not None:
        a_peid, hu, hv_, heid = anchor
        pe = pattern.edge_by_id[a_peid]
        he_loop = hu == hv_
        if pe.is_loop() != he_loop:
            return None
        if pe.is_loop():
            orientations = [((pe.u, hu),)]
        else:
            orientations = [((pe.u, hu), (pe.v, hv_)), ((pe.u, hv_), (pe.v, hu))]
        start = (pe.u, pe.v) if not pe.is_loop() else (pe.u,)
    else:
        deg_order = sorted(
            range(pattern.vertex_count), key=lambda v: (-pattern.degree(v), v)
        )
        start = (deg_order[0],)
        orientations = None

    steps = _plan(pattern, tuple(sorted(set(start))))
    found_box: list[Optional[Embedding]] = [None]

    def recurse(i: int) -> bool:
        if i == len(steps):
            emb = Embedding(dict(vmap), dict(emap))
            if on_found(emb):
                found_box[0] = emb
                return True
            return False
        step = steps[i]
        if step.back:
            # extend from a placed neighbour; prefer an owned-kind group as
            # the candidate source (free-kind adjacency is dense on big
            # boards and is cheaper to verify via pair lookups in place())
            src = None
            for u_pv, eids in step.back:
                if any(kind_of(p) == AV for p in eids):
                    src = (u_pv, AV)
                    break
            if src is None:
                u_pv, eids = step.back[0]
                src = (u_pv, kind_of(eids[0]))
            u_pv, k0 = src
            u_host = vmap[u_pv]
            seen: set[int] = set()
            for w, _eid in host.adj(k0, u_host):
                if w in seen or w == u_host:
                    continue
                seen.add(w)
                undo = place(step.vertex, w, step.back)
                if undo is None:
                    continue
                if recurse(i + 1):
                    return True
                unplace(undo)
        else:
            # fresh component (or isolated vertex): try every host vertex
            for w in range(host.nverts):
                undo = place(step.vertex, w, ())
                if undo is None:
                    continue
                if recurse(i + 1):
                    return True
                unplace(undo)
        return False

    if anchor is None:
        v0 = start[0]
        for hv in range(host.nverts):
            undo = place(v0, hv, ())
            if undo is None:
                continue
            if recurse(0):
                return found_box[0]
            unplace(undo)
        return found_box[0]

    a_peid, hu, hv_, heid = anchor
    pe = pattern.edge_by_id[a_peid]
    for orient in orientations:
        # bind the anchor edge first so endpoint placement cannot re-assign it
        emap[a_peid] = heid
        used_e.add(heid)
        undos = []
        ok = True
        for pv, hv2 in orient:
            undo = place(pv, hv2, ())
            if undo is None:
                ok = False
                break
            undos.append(undo)
        if ok:
            # any parallel partner of the anchor must use a distinct host edge
            partner_ok = True
            partner_undo: list[tuple[int, int]] = []
            if not pe.is_loop():
                others = [
                    e.eid
                    for e in pattern.edges
                    if e.pair() == pe.pair() and e.eid != a_peid
                ]
                got = assign_bundle(vmap[pe.u], vmap[pe.v], others)
                if got is None:
                    partner_ok = False
                else:
                    for peid, heid2 in zip(others, got):
                        emap[peid] = heid2
                        used_e.add(heid2)
                        partner_undo.append((peid, heid2))
            if partner_ok and recurse(0):
                return found_box[0]
            for peid, heid2 in partner_undo:
                del emap[peid]
                used_e.discard(heid2)
        for undo in reversed(undos):
            unplace(undo)
        del emap[a_peid]
        used_e.discard(heid)
    return found_box[0]


# ---------------------------------------------------------------------------
# Public oracles
# ---------------------------------------------------------------------------


def contains_copy(g: LabeledMultigraph, pattern: LabeledMultigraph) -> Optional[Embedding]:
    """First embedding of ``pattern`` into ``g``, or None."""
    return _search(pattern, graph_host(g))


def all_copies(g: LabeledMultigraph, pattern: LabeledMultigraph, dedupe_edges: bool = True):
    """Every embedding; with ``dedupe_edges`` only one per host edge set."""
    seen: set[frozenset] = set()
    out: list[Embedding] = []

    def collect(emb: Embedding) -> bool:
        key = emb.host_edges()
        if not dedupe_edges or key not in seen:
            seen.add(key)
            out.append(emb)
        return False

    _search(pattern, graph_host(g), on_found=collect)
    return out


def copy_through_edge(host: Host, pattern: LabeledMultigraph, u: int, v: int, eid: int,
                      vertex_ok=None) -> Optional[Embedding]:
    """Embedding whose image uses the given host edge (owned-kind edges)."""
    for pe in pattern.edges:
        got = _search(
            pattern, host, anchor=(pe.eid, u, v, eid), vertex_ok=vertex_ok
        )
        if got is not None:
            return got
    return None


def avoider_copy_using(state, pattern: LabeledMultigraph, eid: int) -> Optional[Embedding]:
    """Copy inside Avoider's graph that uses her edge ``eid``."""
    e = state.graph.edge_by_id[eid]
    return copy_through_edge(state_host(state), pattern, e.u, e.v, eid)


def threats(state, pattern: LabeledMultigraph, *, cap: Optional[int] = None,
            vertex_ok=None) -> ThreatSet:
    """Free edges whose claim would give Avoider a new copy.

    Anchored search per free edge: the candidate edge is forced into the
    embedding, everything else must already be Avoider's.  ``cap`` stops
    early once that many threats are found (used for cheap >= b+1 checks).
    """
    host = state_host(state)
    edges = []
    witnesses = {}
    for eid in state.free_edge_ids():
        e = state.graph.edge_by_id[eid]
        emb = copy_through_edge(host, pattern, e.u, e.v, eid, vertex_ok=vertex_ok)
        if emb is not None:
            edges.append(eid)
            witnesses[eid] = emb
            if cap is not None and len(edges) >= cap:
                break
    return ThreatSet(frozenset(edges), witnesses)


def is_threat(state, pattern: LabeledMultigraph, eid: int) -> Optional[Embedding]:
    e = state.graph.edge_by_id[eid]
    return copy_through_edge(state_host(state), pattern, e.u, e.v, eid)


def canonical_threats(state, pattern: LabeledMultigraph, *, cap: Optional[int] = None) -> ThreatSet:
    """Threats whose witness copy maps every pattern vertex into its part."""
    board = state.blowup
    if board is None:
        raise ValueError("state is not on a blow-up board")
    part_of = board.part_of

    def vertex_ok(pv: int, hv: int) -> bool:
        return part_of[hv] == pv

    return threats(state, pattern, cap=cap, vertex_ok=vertex_ok)


def _threats_anchored(host, pattern, u, v, eid, skip=frozenset(), cap=None):
    """Free edges completing a copy that also uses the anchored owned edge."""
    found: dict[int, Embedding] = {}
    for slot in pattern.edges:
        if cap is not None and len(found) >= cap:
            break
        for anchor_pe in pattern.edges:
            if anchor_pe.eid == slot.eid:
                continue
            if cap is not None and len(found) >= cap:
                break

            def collect(emb: Embedding) -> bool:
                feid = emb.edge_map[slot.eid]
                if feid not in found and feid not in skip:
                    found[feid] = emb
                return cap is not None and len(found) >= cap

            _search(
                pattern,
                host,
                anchor=(anchor_pe.eid, u, v, eid),
                kinds={slot.eid: FREE},
                on_found=collect,
            )
    return found


def new_threats_after(state, pattern: LabeledMultigraph, new_eid: int):
    """Threats created by Avoider's latest edge.

    A new threat's witness uses both the new edge and the free candidate;
    embeddings are enumerated with the new edge anchored, one designated
    pattern edge drawing from free board edges and the rest from Avoider's
    graph.  Returns {free edge id: witness embedding}.
    """
    e = state.graph.edge_by_id[new_eid]
    return _threats_anchored(state_host(state), pattern, e.u, e.v, new_eid)


def prospective_new_threats(state, pattern: LabeledMultigraph, eid: int, cap=None):
    """Threats that claiming the (still free) edge ``eid`` would create."""
    e = state.graph.edge_by_id[eid]
    host = state_host(state).overlay(AV, e.u, e.v, eid)
    return _threats_anchored(host, pattern, e.u, e.v, eid, skip={eid}, cap=cap)


def cycle_threats(g: LabeledMultigraph, pattern: LabeledMultigraph) -> dict:
    """Vertex pairs {x,y} whose addition yields a copy using the pair as a
    cycle edge.  All pairs are returned (existing edges included); callers
    filter by board state as needed.  Returns {(x, y): witness}.
    """
    from .multigraph import GraphStructureError, unicyclic_decompose

    if not pattern.is_simple:
        raise GraphStructureError("cycle-threat pairs are defined for simple patterns")
    dec = unicyclic_decompose(pattern)
    cyc_edges = set(dec.cycle_edge_ids)
    base = graph_host(g)
    ghost = max((e.eid for e in g.edges), default=-1) + 1
    out: dict[tuple[int, int], Embedding] = {}
    for x in range(g.vertex_count):
        for y in range(x + 1, g.vertex_count):
            host = base.overlay(AV, x, y, ghost)
            for ce in cyc_edges:
                emb = _search(pattern, host, anchor=(ce, x, y, ghost))
                if emb is not None:
                    out[(x, y)] = emb
                    break
    return out

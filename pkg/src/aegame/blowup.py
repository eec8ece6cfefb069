"""Blow-up games: the inductive Enforcer machinery.

One *level* is a game on a blow-up of a pattern where Avoider may already
own edges (her accumulated claims count as the level's first move) and
Enforcer owes some remainder of a move.  A level's step engine answers
every Avoider edge with the case rules below, padding from a reserved
*filler pool* (and, in the doubled-edge corner case, a one-edge-per-turn
*parity pool*), until a stopping condition yields a step certificate:
pairwise disjoint canonical copies of a small subgraph, pinned inside
known part subsets, with Enforcer absent from everything that matters.

The master policy then claims every edge the certificate does not care
about, contracts the copies to single vertices and recurses on the
smaller pattern; contraction keeps original edge ids, so play continues
on the same physical board throughout.  Leaves declare the threat count:
a two-part tree leaf has every free bundle edge as a completion, a
doubled-edge leaf runs the couples strategy, and the loop-plus-edge leaf
reads threats straight off its certificate.

Tracked throughout (the per-case structural audits):

* per-bundle green edges form a matching (doubled bundles: disjoint
  single edges and parallel pairs),
* before an Avoider move there is never a free edge joining two distinct
  green components,
* Enforcer claims no loops, never the partner of a green doubled-bundle
  edge, and never an edge inside one cycle-restricted green component,
* cycle-restricted green components stay canonical paths or cycles on at
  most (cycle length) vertices,
* every Enforcer claim is incident to a green edge or sits in a bin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil
from typing import Optional, Sequence

from .engine import AVOIDER, GameState, Policy
from .enforcer import (
    EndgameEnforcer,
    PreconditionError,
    StrategyConfig,
    PAPER_CONFIG,
    _LazyPool,
    fill_any_free,
)
from .multigraph import (
    BlowUpBoard,
    GlueContraction,
    LabeledMultigraph,
    TreeContraction,
    unicyclic_decompose,
)
from .threats import canonical_threats


# ---------------------------------------------------------------------------
# Pattern helpers
# ---------------------------------------------------------------------------


def pattern_kind(pattern: LabeledMultigraph) -> tuple:
    """("tree", None) or ("cycle", k) for connected one-cycle multigraphs."""
    if not pattern.is_connected():
        raise PreconditionError("blow-up play needs a connected pattern")
    rank = pattern.cycle_rank()
    if rank == 0:
        return ("tree", None)
    if rank > 1:
        raise PreconditionError("pattern must be a tree or have exactly one cycle")
    dec = unicyclic_decompose(pattern)
    return ("cycle", dec.cycle_length)


def enumerate_subtrees(pattern: LabeledMultigraph):
    """All subtrees as (vertex frozenset, vertex-pair frozenset).

    Parallel pattern edges are collapsed: a subtree is identified by the
    vertex pairs it spans, since a copy may realise either member of a
    doubled bundle but never both (that would close a cycle).
    """
    out = []
    seen_keys = set()
    pairs = sorted({e.pair() for e in pattern.edges if not e.is_loop()})
    for r in range(1, len(pairs) + 1):
        for combo in combinations(pairs, r):
            vs = set()
            for u, v in combo:
                vs.add(u)
                vs.add(v)
            if len(vs) != r + 1:
                continue  # not a tree
            adj = {v: [] for v in vs}
            for u, v in combo:
                adj[u].append(v)
                adj[v].append(u)
            root = next(iter(vs))
            seen = {root}
            stack = [root]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            if len(seen) == len(vs):
                key = (frozenset(vs), frozenset(combo))
                if key not in seen_keys:
                    seen_keys.add(key)
                    out.append(key)
    out.sort(key=lambda t: (len(t[0]), sorted(t[1])))
    return out


# ---------------------------------------------------------------------------
# Step certificates
# ---------------------------------------------------------------------------


@dataclass
class StepCertificate:
    """Outcome of one step level; see the checker for the exact contract."""

    board: BlowUpBoard
    kind: str  # "tree" or "loop"
    f_vertices: tuple  # pattern vertices of the extracted subgraph
    f_edges: tuple  # pattern edge ids (empty for a loop family)
    family: tuple  # per member: dict pattern vertex -> board vertex
    family_edges: tuple  # per member: tuple of board edge ids
    v_prime: dict  # pattern vertex -> frozenset of board vertices
    stop_reason: str
    bias: int
    details: dict = field(default_factory=dict)


def check_step_certificate(cert: StepCertificate, state: GameState,
                           config: StrategyConfig) -> list:
    """Independent validation of the five certificate properties.

    Returns a list of violation strings (empty = pass).  The checker never
    trusts the producing policy: family membership, ownership, part
    containment, Enforcer absence and the size bound are all recomputed
    from the game state.
    """
    out = []
    board = cert.board
    g = board.graph
    pattern = board.pattern
    fset = set(cert.f_vertices)
    h = pattern.vertex_count
    b = cert.bias

    # family members are disjoint canonical Avoider copies
    seen_vertices: set = set()
    for mi, member in enumerate(cert.family):
        if set(member) != fset:
            out.append(f"member {mi} does not cover the extracted vertices")
            continue
        for pv, bv in member.items():
            if board.part_of[bv] != pv:
                out.append(f"member {mi} puts vertex {bv} in the wrong part")
            if bv in seen_vertices:
                out.append(f"member {mi} shares vertex {bv} with another member")
            seen_vertices.add(bv)
        for eid in cert.family_edges[mi]:
            if state.owner(eid) != 1:
                out.append(f"member {mi} edge {eid} is not Avoider's")
        if cert.kind == "tree":
            want = {pattern.edge_by_id[pe].pair() for pe in cert.f_edges}
            got = {
                pattern.edge_by_id[board.edge_bundle[eid]].pair()
                for eid in cert.family_edges[mi]
            }
            if got != want:
                out.append(f"member {mi} does not realise the extracted subtree")

    # (P1) part pinning on the extracted vertices
    for pv in cert.f_vertices:
        expect = frozenset(
            member[pv] for member in cert.family
        )
        if cert.v_prime.get(pv, frozenset()) != expect:
            out.append(f"(P1) fails at pattern vertex {pv}")

    # (P2) survivors keep a quarter of their part
    for pv in range(h):
        if pv in fset:
            continue
        have = len(cert.v_prime.get(pv, ()))
        if 4 * have < len(board.parts[pv]):
            out.append(
                f"(P2) fails at pattern vertex {pv}: {have} < |part|/4"
            )

    # (P3) no Enforcer edge inside surviving bundles touching a survivor part
    vp = {pv: set(vs) for pv, vs in cert.v_prime.items()}
    for e in g.edges:
        pe = board.edge_bundle[e.eid]
        pat_e = pattern.edge_by_id[pe]
        i, j = pat_e.u, pat_e.v
        if i in fset and j in fset:
            continue
        if e.u in vp.get(board.part_of[e.u], ()) and e.v in vp.get(
            board.part_of[e.v], ()
        ):
            if state.owner(e.eid) == 2:
                out.append(f"(P3) Enforcer edge {e.eid} inside surviving bundles")

    # (P4) no Enforcer edge inside any family member
    for mi, member in enumerate(cert.family):
        mv = set(member.values())
        for bv in mv:
            for nb, eid in g.adjacency[bv]:
                if nb in mv and state.owner(eid) == 2:
                    out.append(f"(P4) Enforcer edge {eid} inside member {mi}")

    # (P5) the family is large enough
    if cert.kind == "loop":
        best = Fraction(0)
        for pe in pattern.edges:
            if not pe.is_loop():
                si = len(board.parts[pe.u])
                sj = len(board.parts[pe.v])
                val = Fraction(si * sj, 64 * (b + 1) * h) * config.matching_div_mult
                best = max(best, val)
        if len(cert.family) < best:
            out.append(f"(P5) loop family {len(cert.family)} below {best}")
    else:
        s = len(cert.f_vertices)
        prod = 1
        for pv in cert.f_vertices:
            prod *= len(board.parts[pv])
        denom = (Fraction(64 * (b + 1) * h) / config.matching_div_mult) ** (s - 1)
        if len(cert.family) < Fraction(prod) / denom:
            out.append(
                f"(P5) tree family {len(cert.family)} below {Fraction(prod) / denom}"
            )
    return out


# ---------------------------------------------------------------------------
# Green tracking and the per-case audits
# ---------------------------------------------------------------------------


class GreenTracker:
    """Avoider's non-loop edges claimed from a level's second round on."""

    def __init__(self, board: BlowUpBoard, case: str, cycle_len: Optional[int]):
        self.board = board
        self.case = case
        self.k = cycle_len
        self.green: set = set()
        self.comp_id: dict = {}
        self.comps: dict = {}
        self.comp_edges: dict = {}
        self._next = 0
        self.pair_green: dict = {}  # pattern pair key -> count
        self.loops = 0  # Avoider loops, any round
        self.violations: list = []
        pat = board.pattern
        self.cycle_bundle_pairs = set()
        if case == "cycle" and cycle_len and cycle_len >= 3:
            dec = unicyclic_decompose(pat)
            for eid in dec.cycle_edge_ids:
                e = pat.edge_by_id[eid]
                self.cycle_bundle_pairs.add(e.pair())
        self.doubled_pair = None
        for a, bb in pat.friend_pairs.items():
            e = pat.edge_by_id[a]
            self.doubled_pair = e.pair()
            break

    def pattern_pair(self, eid: int):
        pe = self.board.edge_bundle[eid]
        e = self.board.pattern.edge_by_id[pe]
        return e.pair()

    def add_avoider_edge(self, state: GameState, eid: int, green_round: bool) -> None:
        e = self.board.graph.edge_by_id[eid]
        if e.is_loop():
            self.loops += 1
            return
        if not green_round:
            return
        self.green.add(eid)
        key = self.pattern_pair(eid)
        self.pair_green[key] = self.pair_green.get(key, 0) + 1
        cu, cv = self.comp_id.get(e.u), self.comp_id.get(e.v)
        if cu is None and cv is None:
            cid = self._next
            self._next += 1
            self.comps[cid] = {e.u, e.v}
            self.comp_edges[cid] = [eid]
            self.comp_id[e.u] = self.comp_id[e.v] = cid
        elif cu is None or cv is None:
            cid = cu if cu is not None else cv
            x = e.u if cu is None else e.v
            self.comps[cid].add(x)
            self.comp_edges[cid].append(eid)
            self.comp_id[x] = cid
        elif cu == cv:
            self.comp_edges[cu].append(eid)
        else:
            # merging two green components: the separation audit should
            # already have flagged the free edge; record the merge too
            self.violations.append(f"green components merged via edge {eid}")
            keep, drop = (cu, cv) if len(self.comps[cu]) >= len(self.comps[cv]) else (cv, cu)
            for v in self.comps[drop]:
                self.comp_id[v] = keep
            self.comps[keep] |= self.comps[drop]
            self.comp_edges[keep] += self.comp_edges[drop]
            del self.comps[drop]
            del self.comp_edges[drop]

    # -- audits -------------------------------------------------------------

    def audit_matchings(self) -> None:
        per_pair_pairs: dict = {}
        for eid in self.green:
            e = self.board.graph.edge_by_id[eid]
            key = self.pattern_pair(eid)
            per_pair_pairs.setdefault(key, []).append((e.pair(), eid))
        for key, items in per_pair_pairs.items():
            touched: dict = {}
            vpairs: dict = {}
            for vp, eid in items:
                vpairs.setdefault(vp, []).append(eid)
            for vp, eids in vpairs.items():
                if len(eids) > 2:
                    self.violations.append(f"bundle {key}: >2 green edges on one pair")
                if len(eids) == 2 and key != self.doubled_pair:
                    self.violations.append(f"bundle {key}: parallel greens outside doubled bundle")
            used: set = set()
            for vp in vpairs:
                for x in vp:
                    if x in used:
                        if key != self.doubled_pair:
                            self.violations.append(
                                f"bundle {key}: green edges share vertex {x}"
                            )
                        else:
                            self.violations.append(
                                f"doubled bundle: green components overlap at {x}"
                            )
                    used.add(x)

    def audit_separation(self, state: GameState, pending=()) -> None:
        """No free edge between two distinct green components."""
        pend = set(pending)
        comp_items = list(self.comps.items())
        for a in range(len(comp_items)):
            ca, va = comp_items[a]
            for bnd in range(a + 1, len(comp_items)):
                cb, vb = comp_items[bnd]
                for x in va:
                    for y in vb:
                        for eid in self.board.graph.edges_between(x, y):
                            if state.is_free(eid) and eid not in pend:
                                self.violations.append(
                                    f"free edge {eid} between green components"
                                )

    def audit_separation_after(self, state: GameState, pending) -> None:
        """Same check, run while this response's claims are still pending."""
        self.audit_separation(state, pending)

    def audit_canonical_components(self) -> None:
        for cid, vs in self.comps.items():
            parts = [self.board.part_of[v] for v in vs]
            if len(set(parts)) != len(parts):
                self.violations.append(f"green component {cid} is not canonical")

    def gk_component(self, start: int):
        """Vertices/edges of the cycle-restricted component containing start."""
        if self.k is None or self.k < 3:
            return None
        adj: dict = {}
        seen = {start}
        stack = [start]
        edges = []
        while stack:
            x = stack.pop()
            for nb, eid in self.board.graph.adjacency[x]:
                if eid in self.green and self.pattern_pair(eid) in self.cycle_bundle_pairs:
                    if nb not in seen:
                        seen.add(nb)
                        stack.append(nb)
                    if eid not in edges:
                        edges.append(eid)
        return seen, edges

    def audit_gk(self, state: GameState) -> None:
        """Cycle-restricted components: size <= k, path/cycle shaped, and no
        Enforcer edge inside one component."""
        if self.k is None or self.k < 3:
            return
        seen_all: set = set()
        for eid in self.green:
            if self.pattern_pair(eid) not in self.cycle_bundle_pairs:
                continue
            e = self.board.graph.edge_by_id[eid]
            if e.u in seen_all:
                continue
            vs, es = self.gk_component(e.u)
            seen_all |= vs
            if len(vs) > self.k:
                self.violations.append(
                    f"cycle-restricted green component has {len(vs)} > k vertices"
                )
            if len(es) not in (len(vs) - 1, len(vs)):
                self.violations.append("cycle-restricted component is not path/cycle")
            for x in vs:
                for y in vs:
                    if x < y:
                        for eid2 in self.board.graph.edges_between(x, y):
                            if state.owner(eid2) == 2:
                                self.violations.append(
                                    f"Enforcer edge {eid2} inside a cycle green component"
                                )


# ---------------------------------------------------------------------------
# The step engine
# ---------------------------------------------------------------------------


class BlowupStepEngine:
    """Enforcer inside one level, from its first move to the stop.

    Driven with quotas by an owning policy: ``first_move`` supplies the
    level's opening remainder, ``respond`` answers one Avoider edge.  The
    certificate is available in ``certificate`` after a stop.
    """

    def __init__(self, state: GameState, board: BlowUpBoard,
                 config: StrategyConfig, audit: bool = True):
        self.state = state
        self.board = board
        self.config = config
        self.audit = audit
        g = board.graph
        pattern = board.pattern
        self.h = pattern.vertex_count
        self.b = state.b
        kind, k = pattern_kind(pattern)
        self.kind, self.k = kind, k
        self.certificate: Optional[StepCertificate] = None
        self.bin_exhausted = False
        self.demand_overflow = False
        self.enforcer_tags: dict = {}

        # thresholds per non-loop pattern pair
        self.m: dict = {}
        for e in pattern.edges:
            if not e.is_loop():
                key = e.pair()
                if key not in self.m:
                    self.m[key] = config.bundle_matching_threshold(
                        len(board.parts[e.u]), len(board.parts[e.v]), self.b, self.h
                    )
        self.loop_vertex = None
        for e in pattern.edges:
            if e.is_loop():
                self.loop_vertex = e.u

        # Avoider's current edges are the level's first move
        matchings = self._maximal_matchings()
        self.case = self._classify()
        self.tracker = GreenTracker(board, "cycle" if kind == "cycle" else "tree",
                                    k if kind == "cycle" else None)
        immediate = self._initial_certificate(matchings)
        if immediate is not None:
            self.certificate = immediate
            return

        # bins: the pair with the largest threshold, raw product second
        # (so uneven boards pick their genuinely heaviest bundle)
        self.lt_pair = max(
            self.m,
            key=lambda key: (
                self.m[key],
                len(self.board.parts[key[0]]) * len(self.board.parts[key[1]]),
                key,
            ),
        )
        u_l, u_t = self._saturated(matchings[self.lt_pair])
        l_part, t_part = self.lt_pair
        vl = [v for v in board.parts[l_part] if v not in u_l]
        vt = [v for v in board.parts[t_part] if v not in u_t]
        self.w_l = vl[: len(board.parts[l_part]) // 2]
        self.w_t = vt[: len(board.parts[t_part]) // 2]
        wl_set, wt_set = set(self.w_l), set(self.w_t)
        self.wl_set, self.wt_set = wl_set, wt_set
        filler_ids = []
        for x in self.w_l:
            for y in self.w_t:
                filler_ids.extend(g.edges_between(x, y))
        self.filler = _LazyPool(filler_ids)
        self.parity_pool: Optional[_LazyPool] = None
        self.parity_mark: Optional[int] = None

        if self.case == "2b":
            # doubled pair is (l,t): reserve a one-per-turn parity bin in the
            # bundle next to part 2
            one, two = self.lt_pair
            nxt = None
            for e in pattern.edges:
                if not e.is_loop() and e.pair() != self.lt_pair:
                    if two in (e.u, e.v):
                        nxt = e
                        break
                    if one in (e.u, e.v):
                        nxt = e  # fall back to the other endpoint's bundle
            assert nxt is not None, "connected pattern beyond the doubled edge"
            a_part = two if two in (nxt.u, nxt.v) else one
            b_part = nxt.other(a_part) if hasattr(nxt, "other") else (
                nxt.u if nxt.v == a_part else nxt.v
            )
            m23 = self._maximal_matchings()[nxt.pair()]
            sat_a = {x for pr in m23 for x in pr if self.board.part_of[x] == a_part}
            sat_b = {x for pr in m23 for x in pr if self.board.part_of[x] == b_part}
            wa = [v for v in board.parts[a_part] if v not in sat_a]
            wb = [v for v in board.parts[b_part] if v not in sat_b]
            wa = wa[: len(board.parts[a_part]) // 8]
            wb = wb[: len(board.parts[b_part]) // 8]
            ids = []
            for x in wa:
                for y in wb:
                    ids.extend(g.edges_between(x, y))
            self.parity_pool = _LazyPool(ids)
            self.parity_sets = (set(wa), set(wb))
        self.case = self._resolve_case()

    # -- setup helpers -------------------------------------------------------

    def _maximal_matchings(self) -> dict:
        """Greedy maximal matching of Avoider's edges per non-loop bundle."""
        out = {key: [] for key in self.m}
        used: dict = {key: set() for key in self.m}
        g = self.board.graph
        for e in sorted(g.edges, key=lambda e: e.eid):
            if e.is_loop() or self.state.owner(e.eid) != 1:
                continue
            pe = self.board.pattern.edge_by_id[self.board.edge_bundle[e.eid]]
            key = pe.pair()
            if e.u in used[key] or e.v in used[key]:
                continue
            used[key].add(e.u)
            used[key].add(e.v)
            out[key].append((e.u, e.v, e.eid))
        return out

    def _saturated(self, matching) -> tuple:
        l_part, t_part = self.lt_pair if hasattr(self, "lt_pair") else (None, None)
        u_l, u_t = set(), set()
        for x, y, _ in matching:
            for v in (x, y):
                if self.board.part_of[v] == l_part:
                    u_l.add(v)
                else:
                    u_t.add(v)
        return u_l, u_t

    def _classify(self) -> str:
        if self.kind == "tree" or self.k == 1:
            return "1"
        if self.k == 2:
            return "2?"  # resolved once (l,t) is fixed
        return "3"

    def _resolve_case(self) -> str:
        if self.case != "2?":
            return self.case
        dp = None
        for a, bb in self.board.pattern.friend_pairs.items():
            dp = self.board.pattern.edge_by_id[a].pair()
            break
        self.case = "2b" if self.lt_pair == dp else "2a"
        return self.case

    def _initial_certificate(self, matchings) -> Optional[StepCertificate]:
        pattern = self.board.pattern
        for key in sorted(self.m):
            if len(matchings[key]) >= self.m[key]:
                i, j = key
                peid = min(
                    e.eid
                    for e in pattern.edges
                    if e.pair() == key and not e.is_loop()
                )
                family = []
                fedges = []
                for x, y, eid in matchings[key]:
                    member = {
                        i: x if self.board.part_of[x] == i else y,
                        j: y if self.board.part_of[y] == j else x,
                    }
                    family.append(member)
                    fedges.append((eid,))
                v_prime = {
                    i: frozenset(m[i] for m in family),
                    j: frozenset(m[j] for m in family),
                }
                for pv in range(pattern.vertex_count):
                    if pv not in (i, j):
                        v_prime[pv] = frozenset(self.board.parts[pv])
                return StepCertificate(
                    self.board,
                    "tree",
                    (i, j),
                    (peid,),
                    tuple(family),
                    tuple(fedges),
                    v_prime,
                    "initial-matching",
                    self.b,
                    {"m": dict(self.m)},
                )
        return None

    # -- play ----------------------------------------------------------------

    def observe_avoider(self, eid: int, green_round: bool) -> None:
        if self.certificate is not None:
            return
        if eid in self.board.graph.edge_by_id:
            self.tracker.add_avoider_edge(self.state, eid, green_round)

    def pre_move_audit(self) -> None:
        if self.audit and self.certificate is None:
            self.tracker.audit_separation(self.state)

    def first_move(self, quota: int) -> list:
        """The level's opening remainder: r edges from the bins."""
        out: list = []
        if self.case == "2b":
            # couples of parallel partners from the filler pool
            g = self.board.graph
            while len(out) + 1 < quota:
                eid = self.filler.pop_free(self.state)
                if eid is None:
                    break
                if eid in out:
                    continue
                mate = g.friend_of(eid)
                if mate is not None and self.state.is_free(mate) and mate not in out:
                    out.extend((eid, mate))
                    self._tag(eid, "bin")
                    self._tag(mate, "bin")
            if len(out) < quota:
                eid = self.parity_pool.pop_free(self.state) if self.parity_pool else None
                if eid is not None and eid not in out:
                    out.append(eid)
                    self._tag(eid, "parity")
        while len(out) < quota:
            eid = self.filler.pop_free(self.state)
            if eid is None:
                self.bin_exhausted = True
                break
            if eid not in out:
                out.append(eid)
                self._tag(eid, "bin")
        return out

    def _tag(self, eid: int, reason: str) -> None:
        self.enforcer_tags[eid] = reason

    def _stop_check(self, eid: int) -> bool:
        e = self.board.graph.edge_by_id[eid]
        if e.is_loop():
            if self.case == "1" and self.loop_vertex is not None:
                m_lt = self.m[self.lt_pair]
                if self.tracker.loops >= self.config.stop_loops(self.h, m_lt):
                    self._certify_loops()
                    return True
            return False
        key = self.tracker.pattern_pair(eid)
        m_ij = self.m.get(key)
        if m_ij is None:
            return False
        if self.tracker.pair_green.get(key, 0) >= self.config.stop_green(m_ij):
            self._certify_green(key)
            return True
        return False

    def respond(self, avoider_eid: Optional[int], quota: int) -> list:
        """Case rules (a)-(e) for one Avoider edge, padded from the bins."""
        if self.certificate is not None:
            return []
        if avoider_eid is not None and self._stop_check(avoider_eid):
            return []
        out: list = []
        g = self.board.graph
        state = self.state
        case = self.case

        def take(eid, reason):
            if len(out) < quota and state.is_free(eid) and eid not in out:
                out.append(eid)
                self._tag(eid, reason)
            elif len(out) >= quota:
                self.demand_overflow = True

        if avoider_eid is not None and avoider_eid in g.edge_by_id:
            e = g.edge_by_id[avoider_eid]
            if not e.is_loop():
                x, y = e.u, e.v
                # (a) same-bundle edges meeting the new edge (never the partner)
                for z, eid in g.adjacency[x]:
                    if eid != avoider_eid and self.tracker.pattern_pair(eid) == self.tracker.pattern_pair(avoider_eid):
                        if case.startswith("2") and z == y:
                            continue  # partner shares both ends; leave it
                        take(eid, "meet")
                for z, eid in g.adjacency[y]:
                    if eid != avoider_eid and self.tracker.pattern_pair(eid) == self.tracker.pattern_pair(avoider_eid):
                        if case.startswith("2") and z == x:
                            continue
                        take(eid, "meet")
                # (b) separate the new edge from every other green component
                home = self.tracker.comp_id.get(x)
                if home is None:
                    home = self.tracker.comp_id.get(y)
                for cid, vs in self.tracker.comps.items():
                    if cid == home:
                        continue
                    for v in vs:
                        for eid in g.edges_between(v, x):
                            take(eid, "separate")
                        for eid in g.edges_between(v, y):
                            take(eid, "separate")
                # (c)/(d): cycle-path plugs
                if case == "3":
                    self._cycle_rules(avoider_eid, take)
        # (e) pad from the bins
        if case == "2b":
            while len(out) + 1 < quota:
                eid = self.filler.pop_free(state)
                if eid is None:
                    break
                if eid in out:
                    continue
                mate = g.friend_of(eid)
                if mate is not None and state.is_free(mate) and mate not in out:
                    out.extend((eid, mate))
                    self._tag(eid, "bin")
                    self._tag(mate, "bin")
            if len(out) < quota:
                eid = self.parity_pool.pop_free(state) if self.parity_pool else None
                if eid is not None and eid not in out:
                    out.append(eid)
                    self._tag(eid, "parity")
        while len(out) < quota:
            eid = self.filler.pop_free(state)
            if eid is None:
                self.bin_exhausted = True
                break
            if eid not in out:
                out.append(eid)
                self._tag(eid, "bin")
        if self.audit:
            # the separation property is stated "before every Avoider move",
            # i.e. exactly after this response lands
            self.tracker.audit_matchings()
            self.tracker.audit_separation_after(state, out)
            self.tracker.audit_canonical_components()
            self.tracker.audit_gk(state)
            self._audit_enforcer_edges()
        return out

    def _cycle_rules(self, avoider_eid: int, take) -> None:
        comp = self.tracker.gk_component(self.board.graph.edge_by_id[avoider_eid].u)
        if comp is None:
            return
        vs, es = comp
        if not es or avoider_eid not in es:
            return
        k = self.k
        g = self.board.graph
        deg = {}
        for eid in es:
            e = g.edge_by_id[eid]
            deg[e.u] = deg.get(e.u, 0) + 1
            deg[e.v] = deg.get(e.v, 0) + 1
        ends = sorted(v for v in vs if deg.get(v, 0) == 1)
        if len(ends) != 2:
            return  # cycle component; nothing to plug
        parts = {self.board.part_of[v] for v in vs}
        if len(parts) != len(vs):
            return  # not canonical; audits flag it
        if len(vs) == k:
            u, w = ends
            pu, pw = self.board.part_of[u], self.board.part_of[w]
            # endpoints sit in cyclically adjacent parts; plug their bundle
            if (pu, pw) if pu <= pw else (pw, pu) in self.tracker.cycle_bundle_pairs:
                closing = g.edges_between(u, w)
                for z, eid in g.adjacency[u]:
                    key = (pu, pw) if pu <= pw else (pw, pu)
                    if (
                        self.tracker.pattern_pair(eid) == key
                        and eid not in closing
                    ):
                        take(eid, "plug-k")
                for z, eid in g.adjacency[w]:
                    key = (pu, pw) if pu <= pw else (pw, pu)
                    if (
                        self.tracker.pattern_pair(eid) == key
                        and eid not in closing
                    ):
                        take(eid, "plug-k")
        elif len(vs) == k - 1:
            cyc_parts = set()
            for pr in self.tracker.cycle_bundle_pairs:
                cyc_parts |= set(pr)
            missing = sorted(cyc_parts - parts)
            if len(missing) != 1:
                return
            s = missing[0]
            u, w = ends
            bin_union = self.wl_set | self.wt_set
            if u not in bin_union and w not in bin_union:
                return
            targets = [v for v in self.board.parts[s] if v in bin_union]
            for endp in (u, w):
                for v in targets:
                    for eid in g.edges_between(endp, v):
                        take(eid, "plug-k1")

    def _audit_enforcer_edges(self) -> None:
        """Every Enforcer claim is incident to a green edge or in a bin;
        no Enforcer loops; doubled-bundle partners of green edges stay
        un-claimed by Enforcer."""
        g = self.board.graph
        state = self.state
        green_vertices = self.tracker.comp_id
        for eid, reason in self.enforcer_tags.items():
            e = g.edge_by_id.get(eid)
            if e is None or state.owner(eid) != 2:
                continue
            if e.is_loop():
                self.tracker.violations.append(f"Enforcer claimed loop {eid}")
                continue
            if reason in ("bin", "parity"):
                continue
            if e.u not in green_vertices and e.v not in green_vertices:
                self.tracker.violations.append(
                    f"Enforcer edge {eid} neither in a bin nor at a green vertex"
                )
        for eid in self.tracker.green:
            mate = g.friend_of(eid)
            if mate is not None and state.owner(mate) == 2:
                self.tracker.violations.append(
                    f"Enforcer holds partner {mate} of green edge {eid}"
                )

    # -- certificates ----------------------------------------------------------

    def _certify_loops(self) -> None:
        board = self.board
        state = self.state
        green_vertices = set(self.tracker.comp_id)
        family = []
        fedges = []
        x = self.loop_vertex
        for v in board.parts[x]:
            lp = None
            for nb, eid in board.graph.adjacency[v]:
                if nb == v:
                    lp = eid
            if lp is not None and state.owner(lp) == 1 and v not in green_vertices:
                family.append({x: v})
                fedges.append((lp,))
        v_prime = {x: frozenset(m[x] for m in family)}
        for pv in range(board.pattern.vertex_count):
            if pv == x:
                continue
            keep = [
                v
                for v in board.parts[pv]
                if v not in green_vertices
                and v not in self.wl_set
                and v not in self.wt_set
            ]
            v_prime[pv] = frozenset(keep)
        self.certificate = StepCertificate(
            board, "loop", (x,), (), tuple(family), tuple(fedges), v_prime,
            "loops", self.b, {"m": dict(self.m)},
        )

    def _certify_green(self, stop_key) -> None:
        board = self.board
        pattern = board.pattern
        h = pattern.vertex_count
        g = board.graph
        # green matching per component: one realised pattern edge set per comp
        comp_info = []
        for cid, eids in self.tracker.comp_edges.items():
            vs = self.tracker.comps[cid]
            parts = {board.part_of[v]: v for v in vs}
            realized = set()
            for eid in eids:
                pe = board.edge_bundle[eid]
                realized.add(pattern.edge_by_id[pe].pair())
            comp_info.append((cid, parts, realized, sorted(eids)))
        subtrees = enumerate_subtrees(pattern)
        denom = Fraction(64 * (self.b + 1) * h) / self.config.matching_div_mult

        def realizable(parts, realized, tvs, tps) -> bool:
            if not tvs <= set(parts):
                return False
            return tps <= realized

        best = None
        for tvs, tps in subtrees:
            s = len(tvs)
            prod = 1
            for pv in tvs:
                prod *= len(board.parts[pv])
            threshold = 2 * Fraction(prod) / denom ** (s - 1)
            members = [
                ci for ci in comp_info if realizable(ci[1], ci[2], tvs, tps)
            ]
            if len(members) >= threshold:
                if best is None or s > best[0]:
                    best = (s, tvs, tps, members)
        assert best is not None, "stopping bundle always provides 2-vertex trees"
        s, tvs, tps, members = best

        # keep only members not extendable to a larger green canonical tree
        bigger = [
            (tvs2, tps2)
            for tvs2, tps2 in subtrees
            if tvs < tvs2 and tps < tps2
        ]
        family = []
        fedges = []
        for cid, parts, realized, eids in members:
            if any(realizable(parts, realized, t2, p2) for t2, p2 in bigger):
                continue
            member = {pv: parts[pv] for pv in tvs}
            edge_ids = []
            for pu, pvv in sorted(tps):
                x, y = member[pu], member[pvv]
                cand = [
                    eid
                    for eid in g.edges_between(x, y)
                    if self.state.owner(eid) == 1
                ]
                edge_ids.append(cand[0])
            family.append(member)
            fedges.append(tuple(edge_ids))
        # representative pattern edge ids, one per spanned pair
        rep_ids = tuple(
            min(
                e.eid
                for e in pattern.edges
                if e.pair() == pr and not e.is_loop()
            )
            for pr in sorted(tps)
        )
        used_parts = set(tvs)
        v_prime = {}
        for pv in tvs:
            v_prime[pv] = frozenset(m[pv] for m in family)
        green_vertices = set(self.tracker.comp_id)
        extra_bins = set()
        if self.case == "2b" and self.parity_pool is not None:
            extra_bins = self.parity_sets[0] | self.parity_sets[1]
        for pv in range(h):
            if pv in used_parts:
                continue
            keep = [
                v
                for v in board.parts[pv]
                if v not in green_vertices
                and v not in self.wl_set
                and v not in self.wt_set
                and v not in extra_bins
            ]
            v_prime[pv] = frozenset(keep)
        self.certificate = StepCertificate(
            board, "tree", tuple(sorted(tvs)), rep_ids,
            tuple(family), tuple(fedges), v_prime,
            f"green-bundle {stop_key}", self.b,
            {"m": dict(self.m), "s": s},
        )


# ---------------------------------------------------------------------------
# Doubled-edge base case
# ---------------------------------------------------------------------------


class C2BaseEnforcer(Policy):
    """Couples strategy on a doubled-edge blow-up (even bias).

    Whole couples of parallel partners are claimed from the isolated side,
    so after every Avoider edge either its partner is free (a fresh
    completion threat) or she picked the one marked parity leftover.  Play
    declares once the threat count reaches |V1||V2| / (4(b+1)).
    """

    name = "blowup-c2"

    def __init__(self, config: StrategyConfig = PAPER_CONFIG,
                 board: Optional[BlowUpBoard] = None,
                 stop_on_declare: bool = False):
        self.config = config
        self.board_override = board
        self.stop_on_declare = stop_on_declare
        self.finished = False
        self.outcome: Optional[dict] = None
        self.audit_violations: list = []

    def reset(self, state, pattern, rng):
        board = self.board_override or state.blowup
        if board is None:
            raise PreconditionError("needs a blow-up board")
        if not board.pattern.friend_pairs or board.pattern.vertex_count != 2:
            raise PreconditionError("board must blow up the doubled edge")
        if state.b % 2 != 0:
            raise PreconditionError("the couples strategy needs an even bias")
        self.board = board
        self.state = state
        self.threats = 0  # Avoider edges whose partner is free
        self.started = False
        self.marked_partner: Optional[int] = None
        self.target = Fraction(
            len(board.parts[0]) * len(board.parts[1]), 4 * (state.b + 1)
        )
        self.pool: Optional[_LazyPool] = None
        self.endgame = EndgameEnforcer()
        self.endgame.reset(state, pattern, rng)

    def _start(self) -> None:
        """Fix the isolated side after Avoider's opening claims."""
        board, state = self.board, self.state
        g = board.graph
        touched = set()
        for e in g.edges:
            if state.owner(e.eid) == 1:
                touched.add(e.u)
                touched.add(e.v)
        isolated = [v for v in board.parts[0] if v not in touched]
        self.isolated = set(isolated)
        ids = []
        for x in isolated:
            for y in board.parts[1]:
                ids.extend(g.edges_between(x, y))
        self.pool = _LazyPool(ids)
        self.threats = sum(
            1
            for e in g.edges
            if state.owner(e.eid) == 1
            and g.friend_of(e.eid) is not None
            and state.is_free(g.friend_of(e.eid))
        )
        self.started = True
        if 2 * len(isolated) <= len(board.parts[0]):
            # half the part already touched: threats are already plentiful
            self._declare()

    def _declare(self) -> None:
        self.outcome = {
            "kind": "threats",
            "declared": self.threats,
            "target": self.target,
        }
        if self.stop_on_declare:
            self.finished = True

    def observe(self, state, actor, edge_ids):
        if not self.started or self.outcome is not None:
            return
        g = self.board.graph
        if actor == AVOIDER:
            for eid in edge_ids:
                mate = g.friend_of(eid)
                made_threat = mate is not None and state.is_free(mate)
                if made_threat:
                    self.threats += 1
                elif eid != self.marked_partner:
                    self.audit_violations.append(
                        f"Avoider edge {eid} made no threat and is not the marked leftover"
                    )
                if mate is not None and state.owner(mate) == 1:
                    pass  # she completed the pair; the engine verdict fires
        else:
            for eid in edge_ids:
                mate = g.friend_of(eid)
                if mate is not None and state.owner(mate) == 1 and state.owner(eid) == 2:
                    self.threats -= 1  # partner of her edge no longer free
        if self.threats >= self.target:
            self._declare()

    def propose(self, state, quota: int) -> list:
        if not self.started:
            self._start()
        out: list = []
        g = self.board.graph
        if self.outcome is None:
            while len(out) + 1 < quota:
                eid = self.pool.pop_free(state)
                if eid is None:
                    break
                if eid in out:
                    continue
                mate = g.friend_of(eid)
                if mate is not None and state.is_free(mate) and mate not in out:
                    out.extend((eid, mate))
            while len(out) < quota:
                eid = self.pool.pop_free(state)
                if eid is None:
                    break
                if eid in out:
                    continue
                out.append(eid)
                self.marked_partner = g.friend_of(eid)
                break
        if len(out) < quota:
            # pool dry: keep claiming whole couples anywhere before touching
            # singles, so the partner of every Avoider edge stays free
            free_pairs = [
                (eid, mate)
                for eid, mate in g.friend_pairs.items()
                if eid < mate and state.is_free(eid) and state.is_free(mate)
                and eid not in out and mate not in out
            ]
            for eid, mate in free_pairs:
                if len(out) + 1 >= quota:
                    break
                out.extend((eid, mate))
        if len(out) < quota:
            got = [e for e in self.endgame.propose(state, quota - len(out)) if e not in out]
            out.extend(got)
        return out

    def choose(self, state):
        return fill_any_free(state, self.propose(state, state.owed_now()), state.owed_now())


# ---------------------------------------------------------------------------
# Level validation and contraction plumbing
# ---------------------------------------------------------------------------


def validate_level(board: BlowUpBoard, b: int, config: StrategyConfig) -> list:
    """Size conditions for one level; returns failing inequalities."""
    h = board.pattern.vertex_count
    fails = []
    floor = config.part_floor(h)
    cap = config.part_cap(b, h)
    for pv, part in enumerate(board.parts):
        if len(part) < floor:
            fails.append(f"|part {pv}| = {len(part)} < {floor}")
        if len(part) > cap:
            fails.append(f"|part {pv}| = {len(part)} > {cap}")
    kind, _ = pattern_kind(board.pattern)
    prod = 1
    for part in board.parts:
        prod *= len(part)
    need = config.product_floor(h, b, kind == "tree", max(len(p) for p in board.parts))
    if h >= 2 and prod <= need:
        fails.append(f"part product {prod} <= {need}")
    return fails


def contract_by_certificate(cert: StepCertificate) -> BlowUpBoard:
    """Contract the certified family, keeping the surviving part subsets."""
    board = cert.board
    pattern = board.pattern
    kept = {
        pv: sorted(vs)
        for pv, vs in cert.v_prime.items()
        if pv not in set(cert.f_vertices)
    }
    if cert.kind == "loop":
        # glue the loop part to a neighbour: pair loop vertices with
        # surviving partners across the lexicographically first bundle
        x = cert.f_vertices[0]
        nbrs = sorted(
            e.other(x)
            for e in pattern.edges
            if e.touches(x) and not e.is_loop()
        )
        if not nbrs:
            raise PreconditionError("loop vertex has no neighbour to glue into")
        y = nbrs[0]
        te = min(
            e.eid for e in pattern.edges if not e.is_loop() and e.pair() == ((x, y) if x <= y else (y, x))
        )
        xs = sorted(m[x] for m in cert.family)
        ys = sorted(cert.v_prime[y])
        pairs = min(len(xs), len(ys))
        groups = [(xs[i], ys[i]) for i in range(pairs)]
        kept.pop(y, None)  # the glue partner part is consumed by the pairing
        return board, GlueContraction(te), groups, kept, pairs
    target = TreeContraction(frozenset(cert.f_vertices), frozenset(cert.f_edges))
    groups = [tuple(m[pv] for pv in sorted(m)) for m in cert.family]
    return board, target, groups, kept, len(groups)


def important_edges(cert: StepCertificate, contracted: BlowUpBoard) -> set:
    """Edges that survive into the next level (everything else is swept)."""
    return set(contracted.graph.edge_by_id)


# ---------------------------------------------------------------------------
# The recursive master policy
# ---------------------------------------------------------------------------


@dataclass
class _Frame:
    board: BlowUpBoard
    phase: str  # "step" | "sweep" | "c2" | "done"
    engine: Optional[BlowupStepEngine] = None
    sweep: Optional[_LazyPool] = None
    cert: Optional[StepCertificate] = None
    c2: Optional[C2BaseEnforcer] = None


class BlowupMasterEnforcer(Policy):
    """Step-sweep-contract recursion on a blow-up board.

    Declares (on ``outcome``) either an Avoider copy or a canonical threat
    count for the original pattern, honestly recounted by the oracle at
    declaration time against prod|V_i| / (8^h(b+1)h)^(e-1), then falls
    back to endgame play (or stops, in driver mode).
    """

    name = "blowup"

    def __init__(self, config: StrategyConfig = PAPER_CONFIG,
                 board: Optional[BlowUpBoard] = None,
                 stop_on_declare: bool = False,
                 validate: bool = False,
                 audit: bool = True):
        self.config = config
        self.board_override = board
        self.stop_on_declare = stop_on_declare
        self.validate = validate
        self.audit = audit
        self.finished = False
        self.outcome: Optional[dict] = None
        self.audit_violations: list = []
        self.certificates: list = []

    def reset(self, state, pattern, rng):
        board = self.board_override or state.blowup
        if board is None:
            raise PreconditionError("needs a blow-up board")
        self.state = state
        self.rng = rng
        self.master_board = board
        self.master_pattern = board.pattern
        h = board.pattern.vertex_count
        e = max(board.pattern.edge_count, 2)
        self.target = self.config.threat_target(
            [len(p) for p in board.parts], state.b, h, board.pattern.edge_count
        )
        self.frames: list = []
        self.endgame = EndgameEnforcer()
        self.endgame.reset(state, pattern, rng)
        self._push_frame(board)
        self.pending: Optional[int] = None

    # -- frame management -----------------------------------------------------

    def _push_frame(self, board: BlowUpBoard) -> None:
        if self.validate:
            fails = validate_level(board, self.state.b, self.config)
            if fails:
                raise PreconditionError(
                    "level size conditions fail: " + "; ".join(fails)
                )
        pattern = board.pattern
        h = pattern.vertex_count
        kind, k = pattern_kind(pattern)
        if h == 1:
            # single looped vertex: every free loop completes a copy
            self._declare(board)
            return
        if h == 2 and kind == "tree":
            self._declare(board)
            return
        if h == 2 and k == 2:
            frame = _Frame(board, "c2")
            frame.c2 = C2BaseEnforcer(self.config, board=board)
            frame.c2.reset(self.state, pattern, self.rng)
            self.frames.append(frame)
            return
        frame = _Frame(board, "step")
        self.frames.append(frame)

    def _ensure_engine(self, frame: _Frame) -> None:
        if frame.engine is None:
            frame.engine = BlowupStepEngine(
                self.state, frame.board, self.config, audit=self.audit
            )
            if frame.engine.certificate is not None:
                self._on_certificate(frame)

    def _on_certificate(self, frame: _Frame) -> None:
        cert = frame.engine.certificate
        frame.cert = cert
        self.certificates.append(cert)
        if frame.engine is not None:
            self.audit_violations.extend(frame.engine.tracker.violations)
        pattern = frame.board.pattern
        h = pattern.vertex_count
        if cert.kind == "tree" and len(cert.f_vertices) == h:
            # spanning tree family: for a unicyclic pattern every member is
            # one edge short of a copy; declare right here
            self._declare(frame.board)
            frame.phase = "done"
            return
        board2 = self._contract(cert)
        frame.phase = "sweep"
        keep = set(board2.graph.edge_by_id)
        frame.sweep = _LazyPool(
            [eid for eid in frame.board.graph.edge_by_id if eid not in keep]
        )
        frame.next_board = board2

    def _contract(self, cert: StepCertificate) -> BlowUpBoard:
        from .multigraph import contract_pattern

        board, target, groups, kept, size = contract_by_certificate(cert)
        return contract_pattern(board, target, groups, kept)

    def _declare(self, board_at: BlowUpBoard) -> None:
        cap = ceil(self.target) + 1
        found = canonical_threats(
            _BoardStateView(self.state, self.master_board), self.master_pattern,
            cap=cap,
        )
        if self.state.loss_witness is not None:
            self.outcome = {"kind": "copy", "declared": None, "target": self.target}
        else:
            self.outcome = {
                "kind": "threats",
                "declared": len(found),
                "target": self.target,
                "met": len(found) >= self.target,
            }
        if self.stop_on_declare:
            self.finished = True

    # -- policy interface -------------------------------------------------------

    def observe(self, state, actor, edge_ids):
        if actor != AVOIDER:
            return
        for eid in edge_ids:
            self.pending = eid
            if self.frames:
                frame = self.frames[-1]
                if frame.phase == "step" and frame.engine is not None:
                    frame.engine.observe_avoider(eid, green_round=True)
        if self.frames and self.frames[-1].phase == "c2":
            self.frames[-1].c2.observe(state, actor, edge_ids)

    def propose(self, state, quota: int) -> list:
        out: list = []
        guard = 0
        while len(out) < quota and guard < 30:
            guard += 1
            if self.outcome is not None or not self.frames:
                got = [
                    e
                    for e in self.endgame.propose(state, quota - len(out))
                    if e not in out
                ]
                out.extend(got)
                break
            frame = self.frames[-1]
            if frame.phase == "step":
                opened = frame.engine is not None
                self._ensure_engine(frame)
                if frame.cert is not None:
                    continue
                if not opened:
                    # the level's opening remainder comes from the bins
                    got = frame.engine.first_move(quota - len(out))
                else:
                    got = frame.engine.respond(self.pending, quota - len(out))
                self.pending = None
                if frame.engine.certificate is not None and frame.cert is None:
                    self._on_certificate(frame)
                    continue
                got = [e for e in got if e not in out]
                out.extend(got)
                if len(out) < quota and frame.engine.bin_exhausted:
                    self.audit_violations.append("filler pool exhausted before stop")
                    got = [
                        e
                        for e in self.endgame.propose(state, quota - len(out))
                        if e not in out
                    ]
                    out.extend(got)
                break
            if frame.phase == "sweep":
                while len(out) < quota:
                    eid = frame.sweep.pop_free(state)
                    if eid is None:
                        self.frames.pop()
                        self._push_frame(frame.next_board)
                        break
                    if eid not in out:
                        out.append(eid)
                continue
            if frame.phase == "c2":
                if frame.c2.outcome is not None:
                    self._declare(frame.board)
                    frame.phase = "done"
                    continue
                got = [
                    e
                    for e in frame.c2.propose(state, quota - len(out))
                    if e not in out
                ]
                out.extend(got)
                if frame.c2.outcome is not None and self.outcome is None:
                    self._declare(frame.board)
                    frame.phase = "done"
                break
            if frame.phase == "done":
                self.frames.pop()
                continue
        return out

    def choose(self, state):
        return fill_any_free(state, self.propose(state, state.owed_now()), state.owed_now())


class _BoardStateView:
    """State adapter that reports a chosen blow-up as the board."""

    def __init__(self, state: GameState, board: BlowUpBoard):
        self._state = state
        self.blowup = board
        self.graph = state.graph

    def __getattr__(self, item):
        return getattr(self._state, item)


# ---------------------------------------------------------------------------
# Master policy on a complete board
# ---------------------------------------------------------------------------


def blowup_view_of_complete(n: int, pattern: LabeledMultigraph,
                            parts: Sequence[Sequence[int]],
                            graph: LabeledMultigraph) -> BlowUpBoard:
    """Blow-up structure over an existing complete board (edge ids kept)."""
    part_of = {}
    for pv, vs in enumerate(parts):
        for v in vs:
            part_of[v] = pv
    bundle_pairs = {}
    for e in pattern.edges:
        if not e.is_loop():
            bundle_pairs[e.pair()] = e.eid
    edges = []
    edge_bundle = {}
    for e in graph.edges:
        pu, pv_ = part_of.get(e.u), part_of.get(e.v)
        if pu is None or pv_ is None or pu == pv_:
            continue
        key = (pu, pv_) if pu <= pv_ else (pv_, pu)
        pe = bundle_pairs.get(key)
        if pe is None:
            continue
        edges.append((e.u, e.v, e.eid))
        edge_bundle[e.eid] = pe
    sub = LabeledMultigraph(graph.vertex_count, edges)
    return BlowUpBoard(pattern, tuple(tuple(p) for p in parts), sub, edge_bundle, part_of)


class MasterEnforcer(Policy):
    """Full-board strategy for connected one-cycle (or tree) patterns.

    Three bias regimes: below c*n any play wins on density, so the endgame
    preference is used directly; in the window 8hn <= b+1 <= gamma-scaled
    n^(e/(e-1)) the board is split into near-equal parts, everything
    outside the blow-up is swept, and the recursive blow-up machinery
    takes over; between the two, the game is first clipped to a sub-board
    of the right scale.
    """

    name = "master"

    def __init__(self, config: StrategyConfig = PAPER_CONFIG,
                 stop_on_declare: bool = False, audit: bool = True,
                 require_window: bool = False):
        self.config = config
        self.stop_on_declare = stop_on_declare
        self.audit = audit
        self.require_window = require_window
        self.outcome = None
        self.finished = False
        self.audit_violations: list = []

    def reset(self, state, pattern, rng):
        kind, k = pattern_kind(pattern)
        if kind == "cycle" and state.b % 2 != 0:
            raise PreconditionError("one-cycle patterns need an even bias")
        g = state.graph
        n = g.vertex_count
        h = pattern.vertex_count
        e = pattern.edge_count
        b = state.b
        self.mode = "blowup"
        if b + 1 <= self.config.low_bias_slope * n:
            self.mode = "density"
        elif self.require_window:
            if not (8 * h * n <= b + 1 and self.config.within_master_window(n, h, e, b)):
                raise PreconditionError("bias outside the supported window")
        self.endgame = EndgameEnforcer()
        self.endgame.reset(state, pattern, rng)
        self.inner: Optional[BlowupMasterEnforcer] = None
        self.sweep: Optional[_LazyPool] = None
        if self.mode == "blowup":
            # clip to a sub-board when the parts would overshoot the size cap
            # (the intermediate-bias reduction); everything outside is swept
            cap = int(self.config.part_cap(b, h))
            n_eff = min(n, h * cap) if cap >= 1 else n
            sizes = [n_eff // h + (1 if i < n_eff % h else 0) for i in range(h)]
            parts = []
            at = 0
            for s in sizes:
                parts.append(tuple(range(at, at + s)))
                at += s
            board = blowup_view_of_complete(n, pattern, parts, g)
            keep = set(board.graph.edge_by_id)
            self.sweep = _LazyPool([i for i in range(g.edge_count) if i not in keep])
            self.inner = BlowupMasterEnforcer(
                self.config, board=board,
                stop_on_declare=False, audit=self.audit,
            )
            self.inner.reset(state, pattern, rng)

    def observe(self, state, actor, edge_ids):
        if self.inner is not None:
            self.inner.observe(state, actor, edge_ids)

    def propose(self, state, quota: int) -> list:
        out: list = []
        if self.mode == "density" or self.inner is None:
            return self.endgame.propose(state, quota)
        while len(out) < quota:
            eid = self.sweep.pop_free(state)
            if eid is None:
                break
            if eid not in out:
                out.append(eid)
        if len(out) < quota:
            got = [
                e
                for e in self.inner.propose(state, quota - len(out))
                if e not in out
            ]
            out.extend(got)
            self.outcome = self.inner.outcome
            self.audit_violations = self.inner.audit_violations
            if self.stop_on_declare and self.outcome is not None:
                self.finished = True
        return out

    def choose(self, state):
        return fill_any_free(state, self.propose(state, state.owed_now()), state.owed_now())

"""Enforcer strategies: threat endgames, the two one-cycle strategies and
divide-and-conquer routing for disconnected patterns.

All policies here share two structural idioms:

* lazy pools: candidate edge ids are stored once (sorted) with a cursor;
  entries claimed by anyone in the meantime are skipped on pop.  This
  makes every policy tolerant of interleaved claims by sub-strategies,
  spilled moves and opponents without any cache invalidation.
* quota-driven proposals: ``propose(state, quota)`` fills part of a move,
  so stage boundaries may fall mid-move and the remainder is supplied by
  the next stage (or the endgame).

The endgame preference ("claim free non-threat edges; touch threats only
when forced, and then as few as possible") wins from any position where
the threat count reaches the residue of the free-edge countdown, which
covers both classical sufficient conditions: threats >= b+1, and threat
count t >= 1 with the board size aligned so that binom(n,2) - t is
divisible by b+1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from math import ceil
from typing import Optional, Sequence

from .engine import AVOIDER, ENFORCER, GameState, Policy
from .multigraph import LabeledMultigraph, unicyclic_decompose
from .supersat import extract_disjoint_trees
from .threats import threats
from .multigraph import anchor_path_tree


class PreconditionError(ValueError):
    """A strategy's entry condition does not hold for this game."""


# ---------------------------------------------------------------------------
# Strategy constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StrategyConfig:
    """Every constant the strategies rely on, each with a relaxation knob.

    With all multipliers at 1 the values equal the published formulas
    exactly; tests that cannot reach those scales document the multipliers
    they run with.  The structural runtime assertions are multiplier-free.
    """

    odd_bound_mult: Fraction = Fraction(1)      # scales n/(12h)
    even_bound_mult: Fraction = Fraction(1)     # scales n/(200k(h-k+1))
    part_floor_mult: Fraction = Fraction(1)     # scales 4^h
    part_cap_mult: Fraction = Fraction(1)       # scales b/(8h)
    product_mult: Fraction = Fraction(1)        # scales (16^h (b+1) h)^(...)
    matching_div_mult: Fraction = Fraction(1)   # scales 64(b+1)h
    stop_green_mult: Fraction = Fraction(1)     # scales 4*m_ij
    stop_loop_mult: Fraction = Fraction(1)      # scales 5h*m_lt
    tcopy_mult: Fraction = Fraction(1)          # scales 8(b+1)
    gamma_mult: Fraction = Fraction(1)          # scales the master window
    low_bias_slope: Fraction = Fraction(1, 2)   # c in the trivial regime b+1 <= c*n
    extra_move_factor: int = 1                  # scales the t^2 spill budget
    matching_floor: int = 1                     # lower bound on the bundle thresholds

    def odd_bound(self, n: int, h: int) -> Fraction:
        return Fraction(n, 12 * h) * self.odd_bound_mult

    def even_bound(self, n: int, k: int, h: int) -> Fraction:
        return Fraction(n, 200 * k * (h - k + 1)) * self.even_bound_mult

    def part_floor(self, h: int) -> int:
        return max(1, ceil(4**h * self.part_floor_mult))

    def part_cap(self, b: int, h: int) -> Fraction:
        return Fraction(b, 8 * h) * self.part_cap_mult

    def product_floor(self, h: int, b: int, tree: bool, max_part: int) -> Fraction:
        base = Fraction((16**h) * (b + 1) * h)
        if tree:
            return base ** (h - 2) * max_part * self.product_mult
        return base ** (h - 1) * self.product_mult

    def bundle_matching_threshold(self, si: int, sj: int, b: int, h: int) -> int:
        raw = ceil(Fraction(si * sj, 64 * (b + 1) * h) / self.matching_div_mult)
        return max(self.matching_floor, 1, raw)

    def loop_matching_bound(self, sx: int, sy: int, b: int, h: int) -> Fraction:
        return Fraction(sx * sy, 256 * (b + 1) * h) / self.matching_div_mult

    def stop_green(self, m_ij: int) -> int:
        return max(1, ceil(4 * m_ij * self.stop_green_mult))

    def stop_loops(self, h: int, m_lt: int) -> int:
        return max(1, ceil(5 * h * m_lt * self.stop_loop_mult))

    def tree_copy_count(self, b: int) -> int:
        return max(1, ceil(8 * (b + 1) * self.tcopy_mult))

    def within_master_window(self, n: int, h: int, e: int, b: int) -> bool:
        """b+1 <= gamma * n^(e/(e-1)) with gamma = 1/(16^h h (2h)^(e/(e-1))).

        Compared exactly: ((b+1) * 16^h * h)^(e-1) * (2h)^e <= (gamma_mult^**) n^e.
        """
        lhs = ((b + 1) * 16**h * h) ** (e - 1) * (2 * h) ** e
        gm = self.gamma_mult
        # multiplier applied to gamma: window becomes b+1 <= gm*gamma*n^alpha
        return lhs * gm.denominator ** (e - 1) <= n**e * gm.numerator ** (e - 1)

    def threat_target(self, part_sizes: Sequence[int], b: int, h: int, e: int) -> Fraction:
        """prod |V_i| / (8^h (b+1) h)^(e-1), with the matching relaxation."""
        prod = 1
        for s in part_sizes:
            prod *= s
        denom = (Fraction(8**h * (b + 1) * h) / self.matching_div_mult) ** (e - 1)
        return Fraction(prod) / denom


PAPER_CONFIG = StrategyConfig()


def relaxed_config(**overrides) -> StrategyConfig:
    return replace(PAPER_CONFIG, **overrides)


# ---------------------------------------------------------------------------
# Endgame machinery
# ---------------------------------------------------------------------------


def residue_threshold(state: GameState) -> int:
    """Minimum over future Avoider turns of the free-edge count.

    If that many threats exist now, the non-threat preference corners
    Avoider on an all-threat board.
    """
    f = state.free_count
    if state.to_move == ENFORCER:
        f -= state.owed_now()
    if f <= 0:
        return 0
    return (f - 1) % (state.b + 1) + 1


def endgame_applicable(state: GameState, pattern: LabeledMultigraph, t_target: Optional[int] = None):
    """(applicable, threat_count_capped, needed).

    ``t_target`` requests the divisibility mode: threats >= t with the
    countdown aligned; otherwise threats >= b+1 decides.
    """
    need = residue_threshold(state)
    if t_target is not None:
        total = state.graph.edge_count
        if (total - t_target) % (state.b + 1) != 0:
            raise PreconditionError(
                f"edge count {total} - t {t_target} not divisible by b+1"
            )
        if t_target < 1:
            raise PreconditionError("t must be >= 1")
        cap = max(t_target, need) + 1
    else:
        cap = max(state.b + 1, need)
    tau = len(threats(state, pattern, cap=cap))
    return tau >= need, tau, need


def endgame_threats(state: GameState, pattern: LabeledMultigraph, t_target: Optional[int] = None) -> list:
    """One endgame move for the side to move (Enforcer).

    Raises :class:`PreconditionError` unless the threat count already
    guarantees the win (threats >= b+1, or >= t in divisibility mode).
    """
    if state.to_move != ENFORCER:
        raise PreconditionError("endgame move requested out of turn")
    ok, tau, need = endgame_applicable(state, pattern, t_target)
    floor = t_target if t_target is not None else state.b + 1
    if tau < min(floor, max(need, 1)) and tau < floor:
        raise PreconditionError(
            f"endgame needs at least {floor} threats (have {tau})"
        )
    pol = EndgameEnforcer()
    pol.reset(state, pattern, random.Random(0))
    return pol.choose(state)


class EndgameEnforcer(Policy):
    """Claim non-threats exhaustively; pad with as few threats as possible.

    A single ascending cursor visits every edge id at most once: claimed
    edges are skipped, threats are stashed (they persist forever), and
    everything else is claimed on sight.  When only stashed threats
    remain, Avoider faces an all-threat board.
    """

    name = "endgame"

    def __init__(self, arena_vertices: Optional[frozenset] = None):
        self.arena = arena_vertices

    def reset(self, state, pattern, rng):
        self.pattern = pattern
        self.cursor = 0
        self.stash: list[int] = []
        g = state.graph
        if self.arena is None:
            self.pool = None  # iterate ids directly
            self.limit = g.edge_count
        else:
            self.pool = [
                e.eid
                for e in g.edges
                if e.u in self.arena and e.v in self.arena
            ]
            self.limit = len(self.pool)
        if self.arena is not None:
            arena = self.arena
            self.vertex_ok = lambda pv, hv: hv in arena
        else:
            self.vertex_ok = None

    def _edge_at(self, i: int) -> int:
        return i if self.pool is None else self.pool[i]

    def _is_threat(self, state, eid) -> bool:
        from .threats import copy_through_edge, state_host

        e = state.graph.edge_by_id[eid]
        return (
            copy_through_edge(
                state_host(state), self.pattern, e.u, e.v, eid, vertex_ok=self.vertex_ok
            )
            is not None
        )

    def propose(self, state, quota: int) -> list:
        out: list[int] = []
        while len(out) < quota and self.cursor < self.limit:
            eid = self._edge_at(self.cursor)
            self.cursor += 1
            if not state.is_free(eid):
                continue
            if self._is_threat(state, eid):
                self.stash.append(eid)
                continue
            out.append(eid)
        if len(out) < quota:
            for eid in self.stash:
                if len(out) == quota:
                    break
                if state.is_free(eid) and eid not in out:
                    out.append(eid)
        return out

    def choose(self, state):
        return self.propose(state, state.owed_now())


def fill_any_free(state: GameState, out: list, quota: int) -> list:
    """Top up a move with the lowest free edges; last-resort legality guard."""
    if len(out) >= quota:
        return out[:quota]
    chosen = set(out)
    for eid in state.free_edge_ids():
        if len(out) == quota:
            break
        if eid not in chosen:
            out.append(eid)
            chosen.add(eid)
    return out


class _LazyPool:
    """Sorted edge ids with a cursor; pops skip non-free entries."""

    __slots__ = ("ids", "i")

    def __init__(self, ids):
        self.ids = sorted(ids)
        self.i = 0

    def pop_free(self, state) -> Optional[int]:
        while self.i < len(self.ids):
            eid = self.ids[self.i]
            self.i += 1
            if state.is_free(eid):
                return eid
        return None

    def exhausted_for(self, state) -> bool:
        while self.i < len(self.ids):
            if state.is_free(self.ids[self.i]):
                return False
            self.i += 1
        return True


# ---------------------------------------------------------------------------
# Odd one-cycle strategy
# ---------------------------------------------------------------------------


class OddUnicyclicEnforcer(Policy):
    """Two-sided split; claim only cross edges until they run out.

    Avoider's cross edges then carry many cycle-completing pairs that sit
    inside the sides, where Enforcer never played, so at the handover
    either she has lost or at least b+1 threats are free and the endgame
    preference finishes the job.
    """

    name = "odd-unicyclic"

    def __init__(self, config: StrategyConfig = PAPER_CONFIG,
                 arena_vertices: Optional[Sequence[int]] = None,
                 check_bound: bool = True):
        self.config = config
        self.arena = None if arena_vertices is None else tuple(sorted(arena_vertices))
        self.check_bound = check_bound
        self.handover_ok: Optional[bool] = None

    def reset(self, state, pattern, rng):
        try:
            dec = unicyclic_decompose(pattern)
        except Exception as exc:
            raise PreconditionError(f"pattern must have exactly one cycle: {exc}")
        if not dec.is_odd:
            raise PreconditionError("pattern's cycle must be odd")
        self.pattern = pattern
        g = state.graph
        verts = list(self.arena) if self.arena is not None else list(range(g.vertex_count))
        n, h = len(verts), pattern.vertex_count
        if self.check_bound and state.b + 1 > self.config.odd_bound(n, h):
            raise PreconditionError(
                f"needs b+1 <= n/(12h) (relaxed): {state.b + 1} > {self.config.odd_bound(n, h)}"
            )
        half = len(verts) // 2
        self.x_side = frozenset(verts[:half])
        self.y_side = frozenset(verts[half:])
        vset = set(verts)
        cross = [
            e.eid
            for e in g.edges
            if e.u in vset and e.v in vset
            and ((e.u in self.x_side) != (e.v in self.x_side))
        ]
        self.cross_pool = _LazyPool(cross)
        self.endgame = EndgameEnforcer(
            arena_vertices=frozenset(vset) if self.arena is not None else None
        )
        self.endgame.reset(state, pattern, rng)
        self.handover_ok = None

    def _handover_check(self, state) -> None:
        if self.handover_ok is not None:
            return
        if state.loss_witness is not None:
            self.handover_ok = True
            return
        vset = self.x_side | self.y_side
        vertex_ok = (lambda pv, hv: hv in vset) if self.arena is not None else None
        found = threats(state, self.pattern, cap=state.b + 1, vertex_ok=vertex_ok)
        self.handover_ok = len(found) >= state.b + 1

    def propose(self, state, quota: int) -> list:
        out: list[int] = []
        while len(out) < quota:
            eid = self.cross_pool.pop_free(state)
            if eid is None:
                break
            out.append(eid)
        if len(out) < quota:
            self._handover_check(state)
            # edges already in `out` are still free on the state, so filter
            # the endgame's proposals against them
            chosen = set(out)
            while len(out) < quota:
                got = [
                    e
                    for e in self.endgame.propose(state, quota - len(out))
                    if e not in chosen
                ]
                if not got:
                    break
                out.extend(got)
                chosen.update(got)
        return out

    def choose(self, state):
        return fill_any_free(state, self.propose(state, state.owed_now()), state.owed_now())


# ---------------------------------------------------------------------------
# Even one-cycle strategy
# ---------------------------------------------------------------------------


class EvenUnicyclicEnforcer(Policy):
    """Three stages: degree damping, irrelevant-edge sweep, anchored traps.

    Stage one answers every in-side Avoider edge {u,v} with half the quota
    at u and half at v inside the same side, which caps her in-side
    degrees at 3|X|/(b+1) (audited at runtime).  When the sides are full,
    either she has lost, or b+1 threats exist (endgame), or her in-side
    graphs are so dense that both sides carry many disjoint copies of the
    anchored path-of-trees gadget; stages two and three then clear all
    edges except the anchor grid and force a threat per touched pair of
    gadget copies.
    """

    name = "even-unicyclic"

    def __init__(self, config: StrategyConfig = PAPER_CONFIG,
                 check_bound: bool = True):
        self.config = config
        self.check_bound = check_bound

    def reset(self, state, pattern, rng):
        try:
            dec = unicyclic_decompose(pattern)
        except Exception as exc:
            raise PreconditionError(f"pattern must have exactly one cycle: {exc}")
        if dec.is_odd:
            raise PreconditionError("pattern's cycle must be even")
        if not pattern.is_simple:
            raise PreconditionError("even-cycle strategy needs a simple pattern")
        self.pattern = pattern
        self.dec = dec
        g = state.graph
        n, h, k = g.vertex_count, pattern.vertex_count, dec.cycle_length
        self.k = k
        if self.check_bound and state.b + 1 > self.config.even_bound(n, k, h):
            raise PreconditionError(
                f"needs b+1 <= n/(200k(h-k+1)) (relaxed): {state.b + 1} > "
                f"{self.config.even_bound(n, k, h)}"
            )
        half = n // 2
        self.x_side = frozenset(range(half))
        self.in_x = [False] * n
        for v in range(half):
            self.in_x[v] = True
        # per-vertex in-side incidence pools
        self.st_pool: list[list[int]] = [[] for _ in range(n)]
        in_side_ids = []
        for e in g.edges:
            same = self.in_x[e.u] == self.in_x[e.v]
            if same and not e.is_loop():
                self.st_pool[e.u].append(e.eid)
                self.st_pool[e.v].append(e.eid)
                in_side_ids.append(e.eid)
        for lst in self.st_pool:
            lst.sort()
        self.st_cursor = [0] * n
        self.side_pool = _LazyPool(in_side_ids)
        self.stage = 1
        self.last_avoider_edge: Optional[int] = None
        # degree audit
        self.av_deg = [0] * n
        self.degree_violations = 0
        self.max_degree_seen = 0
        self.sweep_pool: Optional[_LazyPool] = None
        self.anchor_grid: Optional[dict] = None
        self.trap_pool: Optional[_LazyPool] = None
        self.endgame = EndgameEnforcer()
        self.endgame.reset(state, pattern, rng)
        self.handover_threats: Optional[int] = None
        self.side_copy_counts: Optional[tuple] = None
        self.touched_pairs_ok: Optional[bool] = None
        self.b = state.b

    # -- observation / audit -------------------------------------------------

    def observe(self, state, actor, edge_ids):
        if actor != AVOIDER:
            return
        g = state.graph
        for eid in edge_ids:
            e = g.edge_by_id[eid]
            self.last_avoider_edge = eid
            if not e.is_loop() and self.in_x[e.u] == self.in_x[e.v]:
                self.av_deg[e.u] += 1
                self.av_deg[e.v] += 1
                side = self.x_side if self.in_x[e.u] else None
                size = len(self.x_side) if self.in_x[e.u] else g.vertex_count - len(self.x_side)
                bound = Fraction(3 * size, self.b + 1)
                worst = max(self.av_deg[e.u], self.av_deg[e.v])
                self.max_degree_seen = max(self.max_degree_seen, worst)
                if worst > bound:
                    self.degree_violations += 1

    # -- stage transitions ---------------------------------------------------

    def _stage1(self, state, quota: int, out: list) -> None:
        g = state.graph
        last = self.last_avoider_edge
        half = [0, 0]
        if last is not None:
            e = g.edge_by_id[last]
            if self.in_x[e.u] == self.in_x[e.v]:
                u, v = min(e.u, e.v), max(e.u, e.v)
                half = [quota // 2, quota - quota // 2]
                for who, want in ((u, half[0]), (v, half[1])):
                    lst = self.st_pool[who]
                    taken = 0
                    i = self.st_cursor[who]
                    while taken < want and i < len(lst):
                        eid = lst[i]
                        i += 1
                        if state.is_free(eid) and eid not in out:
                            out.append(eid)
                            taken += 1
                    self.st_cursor[who] = i
        while len(out) < quota:
            eid = self.side_pool.pop_free(state)
            if eid is None:
                break
            if eid in out:
                continue
            out.append(eid)
        # out may still be short: stage one is over
        if len(out) < quota and self.side_pool.exhausted_for(state):
            self._enter_stage2(state)

    def _enter_stage2(self, state) -> None:
        if state.loss_witness is not None:
            self.stage = 4
            return
        found = threats(state, self.pattern, cap=state.b + 1)
        self.handover_threats = len(found)
        if len(found) >= state.b + 1:
            self.stage = 4  # endgame directly
            return
        self._build_anchor_grid(state)
        self.stage = 2

    def _build_anchor_grid(self, state) -> None:
        g = state.graph
        apt = anchor_path_tree(self.pattern)
        r = self.config.tree_copy_count(state.b)
        sides = []
        for side_set in (self.x_side, frozenset(range(g.vertex_count)) - self.x_side):
            verts = sorted(side_set)
            remap = {v: i for i, v in enumerate(verts)}
            edges = [
                (remap[e.u], remap[e.v], e.eid)
                for e in g.edges
                if state.owner(e.eid) == 1
                and e.u in side_set
                and e.v in side_set
                and not e.is_loop()
            ]
            sub = LabeledMultigraph(len(verts), edges)
            fam = extract_disjoint_trees(sub, apt.tree)
            sides.append(
                [
                    tuple(verts[emb.vertex_map[a]] for a in apt.anchors)
                    for emb in fam.embeddings[:r]
                ]
            )
        self.side_copy_counts = (len(sides[0]), len(sides[1]))
        if min(self.side_copy_counts) < r:
            side = "first" if self.side_copy_counts[0] < r else "second"
            raise PreconditionError(
                f"gadget-copy shortfall on the {side} side: "
                f"{self.side_copy_counts} < {r}"
            )
        # anchor grid: every cross pair of anchor vertices
        pair_eid = {}
        for e in g.edges:
            pair_eid[e.pair()] = e.eid
        k = self.k
        grid: dict[int, tuple] = {}
        trap = []
        for i, p in enumerate(sides[0]):
            for j, q in enumerate(sides[1]):
                for a, pv in enumerate(p, start=1):
                    for bq, qv in enumerate(q, start=1):
                        key = (pv, qv) if pv <= qv else (qv, pv)
                        eid = pair_eid.get(key)
                        if eid is None:
                            continue
                        grid[eid] = (i, j, a, bq)
                        if a < k // 2 and bq < k // 2:
                            trap.append(eid)
        self.anchor_grid = grid
        self.anchors = sides
        self.trap_pool = _LazyPool(trap)
        self.sweep_pool = _LazyPool(
            [eid for eid in range(g.edge_count) if eid not in grid]
        )

    def _stage2(self, state, quota: int, out: list) -> None:
        while len(out) < quota:
            eid = self.sweep_pool.pop_free(state)
            if eid is None:
                self.stage = 3
                return
            if eid not in out:
                out.append(eid)

    def _stage3(self, state, quota: int, out: list) -> None:
        while len(out) < quota:
            eid = self.trap_pool.pop_free(state)
            if eid is None:
                self._finish_stage3(state)
                self.stage = 4
                return
            if eid not in out:
                out.append(eid)

    def _finish_stage3(self, state) -> None:
        """Touched pairs of gadget copies each leave a free (or Avoider)
        completion edge with aligned anchor offsets."""
        g = state.graph
        k = self.k
        touched: dict[tuple, tuple] = {}
        for eid, (i, j, a, bq) in self.anchor_grid.items():
            if state.owner(eid) == 1 and (i, j) not in touched:
                touched[(i, j)] = (a, bq, eid)
        ok = True
        pair_eid = {e.pair(): e.eid for e in g.edges}
        for (i, j), (a, bq, eid) in touched.items():
            off = k // 2 - 1
            if off == 0:
                continue
            gamma = a + off if a + off <= 3 * k // 2 else a - off
            delta = bq + off if bq + off <= 3 * k // 2 else bq - off
            pv = self.anchors[0][i][gamma - 1]
            qv = self.anchors[1][j][delta - 1]
            key = (pv, qv) if pv <= qv else (qv, pv)
            mate = pair_eid[key]
            if state.owner(mate) == 2:
                ok = False
        self.touched_pairs_ok = ok
        self.touched_pair_count = len(touched)

    def propose(self, state, quota: int) -> list:
        out: list[int] = []
        guard = 0
        while len(out) < quota and guard < 8:
            guard += 1
            if self.stage == 1:
                self._stage1(state, quota, out)
            elif self.stage == 2:
                self._stage2(state, quota, out)
            elif self.stage == 3:
                self._stage3(state, quota, out)
            else:
                got = self.endgame.propose(state, quota - len(out))
                got = [e for e in got if e not in out]
                out.extend(got)
                break
        return out

    def choose(self, state):
        return fill_any_free(state, self.propose(state, state.owed_now()), state.owed_now())


# ---------------------------------------------------------------------------
# Disconnected patterns: route games per part
# ---------------------------------------------------------------------------


class ArbitraryArenaEnforcer(Policy):
    """Lowest free edge inside a fixed arena (cross games, edge components)."""

    name = "arbitrary"

    def __init__(self, edge_ids):
        self.pool = _LazyPool(edge_ids)

    def reset(self, state, pattern, rng):
        pass

    def propose(self, state, quota):
        out = []
        while len(out) < quota:
            eid = self.pool.pop_free(state)
            if eid is None:
                break
            out.append(eid)
        return out


class DisconnectedEnforcer(Policy):
    """Split the vertices, run one game per component and per cross block.

    Every Avoider move is answered inside the same block.  When a block
    runs dry mid-move the remainder spills into other blocks, counting one
    extra move against each recipient; the spill budget is t^2 moves total
    and a breach is flagged (it would indicate a routing bug, not a
    strategy failure).
    """

    name = "disconnected"

    def __init__(self, config: StrategyConfig = PAPER_CONFIG, check_bound: bool = True):
        self.config = config
        self.check_bound = check_bound

    def reset(self, state, pattern, rng):
        self.pattern = pattern
        comps = [c for c in pattern.components()]
        comps_with_edges = []
        for comp in comps:
            eids = pattern.induced_edge_ids(comp)
            if eids:
                comps_with_edges.append((sorted(comp), eids))
        if len(comps_with_edges) < 1:
            raise PreconditionError("pattern has no edges")
        self.t = t = len(comps_with_edges)
        g = state.graph
        n = g.vertex_count
        bounds = [round(i * n / t) for i in range(t + 1)]
        self.parts = [frozenset(range(bounds[i], bounds[i + 1])) for i in range(t)]
        self.part_of = [0] * n
        for i, part in enumerate(self.parts):
            for v in part:
                self.part_of[v] = i
        # diagonal games: component policy per part
        self.diag: list[Policy] = []
        for i, (comp_vs, comp_eids) in enumerate(comps_with_edges):
            sub = pattern.subgraph(comp_vs, comp_eids)
            part = self.parts[i]
            if sub.edge_count == 1 and not sub.edges[0].is_loop():
                pol: Policy = ArbitraryArenaEnforcer(
                    [e.eid for e in g.edges if e.u in part and e.v in part]
                )
            else:
                dec = None
                try:
                    dec = unicyclic_decompose(sub)
                except Exception:
                    dec = None
                if dec is not None and dec.is_odd:
                    pol = OddUnicyclicEnforcer(
                        self.config, arena_vertices=part, check_bound=self.check_bound
                    )
                else:
                    # trees and even cycles at low bias: density alone wins,
                    # so the endgame preference inside the part suffices
                    pol = EndgameEnforcer(arena_vertices=part)
            pol.reset(state, sub, rng)
            self.diag.append(pol)
        self.sub_patterns = [
            pattern.subgraph(vs, es) for vs, es in comps_with_edges
        ]
        # cross games
        self.cross: dict[tuple, ArbitraryArenaEnforcer] = {}
        for i in range(t):
            for j in range(i + 1, t):
                ids = [
                    e.eid
                    for e in g.edges
                    if {self.part_of[e.u], self.part_of[e.v]} == {i, j}
                ]
                self.cross[(i, j)] = ArbitraryArenaEnforcer(ids)
        self.pending: Optional[tuple] = None
        self.extra_moves = 0
        self.extra_budget = self.config.extra_move_factor * t * t
        self.budget_exceeded = False

    def observe(self, state, actor, edge_ids):
        if actor == AVOIDER and edge_ids:
            e = state.graph.edge_by_id[edge_ids[-1]]
            i, j = self.part_of[e.u], self.part_of[e.v]
            self.pending = (min(i, j), max(i, j))
        for pol in self.diag:
            pol.observe(state, actor, edge_ids)

    def _game_policy(self, key) -> Policy:
        i, j = key
        return self.diag[i] if i == j else self.cross[key]

    def _spill_order(self, skip):
        for key in sorted(self.cross):
            if key != skip:
                yield key
        for i in range(self.t):
            if (i, i) != skip:
                yield (i, i)

    def propose(self, state, quota):
        out: list[int] = []
        key = self.pending if self.pending is not None else None
        if key is not None:
            got = self._game_policy(key).propose(state, quota)
            out.extend(e for e in got if e not in out)
        if len(out) < quota:
            for other in self._spill_order(key):
                if len(out) == quota:
                    break
                got = self._game_policy(other).propose(state, quota - len(out))
                got = [e for e in got if e not in out]
                if got:
                    self.extra_moves += 1
                    if self.extra_moves > self.extra_budget:
                        self.budget_exceeded = True
                    out.extend(got)
        return out

    def choose(self, state):
        return fill_any_free(state, self.propose(state, state.owed_now()), state.owed_now())


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


def make_enforcer(name: str, config: StrategyConfig = PAPER_CONFIG, **kwargs) -> Policy:
    from .blowup import BlowupMasterEnforcer, C2BaseEnforcer, MasterEnforcer  # noqa: F401 (registry)

    table = {
        "endgame": lambda: EndgameEnforcer(**kwargs),
        "odd-unicyclic": lambda: OddUnicyclicEnforcer(config, **kwargs),
        "even-unicyclic": lambda: EvenUnicyclicEnforcer(config, **kwargs),
        "blowup": lambda: BlowupMasterEnforcer(config, **kwargs),
        "master": lambda: MasterEnforcer(config, **kwargs),
        "disconnected": lambda: DisconnectedEnforcer(config, **kwargs),
    }
    try:
        return table[name]()
    except KeyError:
        raise ValueError(f"unknown enforcer policy {name!r}") from None


ENFORCER_POLICY_NAMES = (
    "endgame",
    "odd-unicyclic",
    "even-unicyclic",
    "blowup",
    "master",
    "disconnected",
)

"""Avoider-side machinery.

Two exact winning-condition checks (single pattern and pattern family)
plus the policies used throughout the test harness:

* ``potential``: minimises, over copies of the pattern containing the
  candidate edge and still free of Enforcer edges, the sum of
  lambda^-(free edges of the copy beyond the candidate).  Copy states are
  cached per board and updated incrementally.  Never claims an edge that
  completes a copy, or a threat, while an alternative exists.
* ``random``: uniform over free edges.
* ``greedy``: avoids suicide moves and minimises newly created threats
  over a candidate set (exhaustive on small boards, seeded sampling on
  large ones, where the full scan would be quadratic in the board).
* ``anti-endgame``: infers the opponent's two-sided vertex split from his
  claimed edges once enough exist and then plays inside the sides to
  disturb it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Optional, Sequence

from .engine import AVOIDER, ENFORCER, Policy
from .multigraph import LabeledMultigraph
from .threats import all_copies, is_threat, prospective_new_threats


# ---------------------------------------------------------------------------
# Winning conditions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AvoiderCondition:
    """Exact evaluation of the two winning-condition clauses."""

    n: int
    b: int
    q: Optional[int]
    pattern_sizes: tuple  # ((v(F), e(F)), ...) for the pattern or family
    remainder: int
    remainder_clause: Optional[bool]
    inequality_clause: bool

    @property
    def holds(self) -> bool:
        base = self.inequality_clause
        if self.remainder_clause is not None:
            base = base and self.remainder_clause
        return base

    def recompute(self) -> "AvoiderCondition":
        if self.q is None:
            raise ValueError("family conditions recompute via check_family_condition")
        v, e = self.pattern_sizes[0]
        return _evaluate_single(self.n, self.b, self.q, v, e)


def _evaluate_single(n: int, b: int, q: int, v: int, e: int) -> AvoiderCondition:
    remainder = comb(n, 2) % (b + 1)
    remainder_clause = remainder >= q + 1
    # n^v * (q/e + 1)^-e < 1  <=>  (q + e)^e > n^v * e^e
    inequality_clause = (q + e) ** e > n**v * e**e
    return AvoiderCondition(
        n, b, q, ((v, e),), remainder, remainder_clause, inequality_clause
    )


def check_avoiderwin(n: int, b: int, q: int, pattern: LabeledMultigraph) -> AvoiderCondition:
    """Both clauses of the single-pattern winning condition, exactly."""
    if min(n, b, q) < 1:
        raise ValueError("n, b, q must be positive")
    return _evaluate_single(n, b, q, pattern.vertex_count, pattern.edge_count)


def check_family_condition(
    n: int, b: int, family: Sequence[LabeledMultigraph]
) -> AvoiderCondition:
    """Exact sum clause for a family: sum n^v(F) (b/e(F)+1)^-e(F) < 1."""
    sizes = []
    total = Fraction(0)
    for f in family:
        if f.vertex_count < 2:
            raise ValueError("family members need at least two vertices")
        v, e = f.vertex_count, f.edge_count
        sizes.append((v, e))
        total += Fraction(n**v) / Fraction(b + e, e) ** e
    return AvoiderCondition(n, b, None, tuple(sizes), comb(n, 2) % (b + 1), None, total < 1)


# ---------------------------------------------------------------------------
# Policies
# ---------------------------------------------------------------------------


class RandomAvoider(Policy):
    name = "random"

    def reset(self, state, pattern, rng):
        self.rng = rng

    def choose(self, state):
        if state.free_count == 0:
            return []
        return [state.free_list[self.rng.randrange(state.free_count)]]


class PotentialAvoider(Policy):
    """Potential-minimising Avoider; see module docstring."""

    name = "potential"
    COPY_CAP = 200_000

    def __init__(self, lam: Optional[Fraction] = None, q: Optional[int] = None):
        self.lam = lam
        self.q = q

    def reset(self, state, pattern, rng):
        self.rng = rng
        e = pattern.edge_count
        if self.lam is None:
            q = self.q if self.q is not None else 3 * state.graph.vertex_count
            self.lam = 1 + Fraction(q, e)
        copies = all_copies(state.graph, pattern)
        if len(copies) > self.COPY_CAP:
            raise ValueError("board too rich for cached copy potentials")
        self.copy_edges = [tuple(sorted(c.host_edges())) for c in copies]
        self.blocked = [False] * len(copies)
        self.free_cnt = [len(ce) for ce in self.copy_edges]
        self.av_cnt = [0] * len(copies)
        self.by_edge: dict[int, list[int]] = {}
        for i, ce in enumerate(self.copy_edges):
            for eid in ce:
                self.by_edge.setdefault(eid, []).append(i)
        self.e_pattern = e
        # catch up on any pre-existing claims (mid-game adoption)
        for eid in range(state.graph.edge_count):
            o = state.owner(eid)
            if o:
                self._apply(eid, o)

    def _apply(self, eid: int, owner: int) -> None:
        for i in self.by_edge.get(eid, ()):
            self.free_cnt[i] -= 1
            if owner == 1:
                self.av_cnt[i] += 1
            else:
                self.blocked[i] = True

    def observe(self, state, actor, edge_ids):
        owner = 1 if actor == AVOIDER else 2
        for eid in edge_ids:
            self._apply(eid, owner)

    def choose(self, state):
        if state.free_count == 0:
            return []
        lam = self.lam
        best = None
        best_threat = None
        for eid in sorted(state.free_list):
            pot = Fraction(0)
            threat = False
            for i in self.by_edge.get(eid, ()):
                if self.blocked[i]:
                    continue
                rest = self.free_cnt[i] - 1
                if rest == 0 and self.av_cnt[i] == len(self.copy_edges[i]) - 1:
                    threat = True
                pot += lam ** (-rest)
            entry = (pot, eid)
            if threat:
                if best_threat is None or entry < best_threat:
                    best_threat = entry
            else:
                if best is None or entry < best:
                    best = entry
        chosen = best if best is not None else best_threat
        return [chosen[1]]


class GreedyMinThreatAvoider(Policy):
    name = "greedy"

    def __init__(self, sample_cap: int = 8, full_scan_edges: int = 300,
                 count_cap: int = 8):
        self.sample_cap = sample_cap
        self.full_scan_edges = full_scan_edges
        self.count_cap = count_cap

    def reset(self, state, pattern, rng):
        self.rng = rng
        self.pattern = pattern

    def choose(self, state):
        if state.free_count == 0:
            return []
        if state.graph.edge_count <= self.full_scan_edges:
            cands = sorted(state.free_list)
            cap = None
        else:
            k = min(self.sample_cap, state.free_count)
            cands = sorted(self.rng.sample(state.free_list, k))
            cap = self.count_cap
        # low-degree endpoints rarely create threats; try those first so the
        # zero-creation break usually fires on the first candidate
        g = state.graph
        def degsum(eid):
            e = g.edge_by_id[eid]
            return len(state.avoider_adjacency(e.u)) + len(state.avoider_adjacency(e.v))
        cands.sort(key=lambda eid: (degsum(eid), eid))
        best = None
        fallback = cands[0]
        for eid in cands:
            if is_threat(state, self.pattern, eid):
                continue  # suicide
            created = len(
                prospective_new_threats(state, self.pattern, eid, cap=cap)
            )
            entry = (created, eid)
            if best is None or entry < best:
                best = entry
            if entry[0] == 0:
                break  # cannot do better; keep scans short on big boards
        return [best[1] if best is not None else fallback]


class AntiEndgameAvoider(Policy):
    """Plays inside the opponent's inferred vertex split when detectable."""

    name = "anti-endgame"
    MIN_EVIDENCE = 24

    def reset(self, state, pattern, rng):
        self.rng = rng
        self.colour: Optional[list] = None
        self.enf_adj: list[list[int]] = [[] for _ in range(state.graph.vertex_count)]
        self.enf_edges = 0

    def observe(self, state, actor, edge_ids):
        if actor != ENFORCER or self.colour is not None:
            return
        g = state.graph
        for eid in edge_ids:
            e = g.edge_by_id[eid]
            if not e.is_loop():
                self.enf_adj[e.u].append(e.v)
                self.enf_adj[e.v].append(e.u)
                self.enf_edges += 1
        if self.enf_edges >= max(self.MIN_EVIDENCE, g.vertex_count):
            self._infer()

    def _infer(self):
        n = len(self.enf_adj)
        colour = [-1] * n
        ok = True
        for s in range(n):
            if colour[s] != -1 or not self.enf_adj[s]:
                continue
            colour[s] = 0
            queue = [s]
            while queue and ok:
                x = queue.pop()
                for y in self.enf_adj[x]:
                    if colour[y] == -1:
                        colour[y] = 1 - colour[x]
                        queue.append(y)
                    elif colour[y] == colour[x]:
                        ok = False
                        break
        self.colour = colour if ok else None
        self.enf_adj = [[] for _ in range(n)]  # stop accumulating either way
        self.enf_edges = -(10**9)

    def choose(self, state):
        if state.free_count == 0:
            return []
        k = min(64, state.free_count)
        sample = (
            state.free_list
            if state.free_count <= k
            else self.rng.sample(state.free_list, k)
        )
        if self.colour is not None:
            g = state.graph
            for eid in sorted(sample):
                e = g.edge_by_id[eid]
                cu, cv = self.colour[e.u], self.colour[e.v]
                if cu != -1 and cu == cv and not e.is_loop():
                    return [eid]
        return [sample[self.rng.randrange(len(sample))]]


AVOIDER_POLICIES = {
    "random": RandomAvoider,
    "greedy": GreedyMinThreatAvoider,
    "anti-endgame": AntiEndgameAvoider,
    "potential": PotentialAvoider,
}


def make_avoider(name: str, **kwargs) -> Policy:
    try:
        return AVOIDER_POLICIES[name](**kwargs)
    except KeyError:
        raise ValueError(f"unknown avoider policy {name!r}") from None

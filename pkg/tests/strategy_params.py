"""Shared desk-scale configurations and adversaries for blow-up play.

The published size conditions are astronomically conservative, so the
structural tests run at documented desk scales chosen from the honest
budget accounting:

* the filler pool holds |V|^2/4 edges and is drained at most (b+1) per
  round, so |V|^2/4 must cover the worst-case round count before a stop
  (the sum over stopping conditions of threshold-1, plus slack);
* the bias must dominate the per-round rule demand: one bundle's worth of
  meeting edges (~2|V|) plus separation edges, plus another bundle for
  the cycle-path plugs (~2|V| more) when the pattern has a cycle of
  length >= 3;
* bundle thresholds are floored at 2 (``matching_floor``), otherwise a
  single opening edge satisfies the initial-matching shortcut and the
  interesting play never happens at this scale.

Every configuration below satisfies the inequalities with margin; the
relaxation knobs used are exactly ``matching_floor=2`` plus halved
stopping thresholds where the budget needs them.
"""

from aegame.engine import Policy
from aegame.enforcer import relaxed_config
from aegame.patterns import (
    complete,
    cycle,
    doubled_edge,
    loop_plus_edge,
    parse_pattern,
    path,
    with_pendant,
)
from fractions import Fraction


DESK = relaxed_config(matching_floor=2)
DESK_HALF_GREEN = relaxed_config(matching_floor=2, stop_green_mult=Fraction(1, 2))
DESK_LOOP = relaxed_config(
    matching_floor=2, stop_loop_mult=Fraction(1, 2)
)


def step_scales():
    """name -> (pattern, sizes, bias, opening remainder, config)."""
    c2p = with_pendant(parse_pattern("C2"), at=1)
    return {
        "P3": (path(3), (152, 152, 152), 344, 17, DESK),
        "P4": (path(4), (208, 208, 208, 208), 456, 33, DESK),
        "K3": (complete(3), (392, 392, 392), 1632, 100, DESK),
        "C4": (cycle(4), (248, 248, 248, 248), 1056, 51, DESK_HALF_GREEN),
        "loop+edge": (loop_plus_edge(), (200, 200), 440, 11, DESK_LOOP),
        "C2+pendant-a": (c2p, (176, 176, 288), 768, 9, DESK),
        "C2+pendant-b": (c2p, (224, 224, 144), 960, 9, DESK),
    }


def master_scales():
    """name -> (pattern, sizes, bias, remainder, avoider kind, config)."""
    return {
        "P3": (path(3), (152, 152, 152), 344, 17, "random", DESK),
        "P4": (path(4), (208, 208, 208, 208), 456, 33, "random", DESK),
        "loop+edge": (loop_plus_edge(), (200, 200), 440, 11, "random", DESK_LOOP),
        "C2": (doubled_edge(), (64, 64), 16, 5, "random", DESK),
        "K3": (complete(3), (392, 392, 392), 1632, 100, "paths", DESK),
        "C4": (cycle(4), (248, 248, 248, 248), 1056, 51, "paths", DESK_HALF_GREEN),
    }


class FocusedAvoider(Policy):
    """Concentrates on one bundle at a time; drives the stopping counters."""

    name = "focused"

    def __init__(self, board=None):
        self.board_override = board

    def reset(self, state, pattern, rng):
        self.rng = rng
        board = self.board_override or state.blowup
        self.board = board
        groups = {}
        for eid, pe in board.edge_bundle.items():
            groups.setdefault(pe, []).append(eid)
        self.order = [sorted(groups[pe]) for pe in sorted(groups)]
        for pool in self.order:
            self.rng.shuffle(pool)
        self.idx = 0

    def choose(self, state):
        if state.free_count == 0:
            return []
        for _ in range(len(self.order)):
            pool = self.order[self.idx]
            while pool:
                eid = pool.pop()
                if state.is_free(eid):
                    return [eid]
            self.idx = (self.idx + 1) % len(self.order)
        return [state.free_list[self.rng.randrange(state.free_count)]]


class PathBuilderAvoider(Policy):
    """Grows canonical paths along the pattern's bundles.

    The natural attack on the cycle cases: she tries to assemble a copy
    one bundle edge at a time, which is exactly what the path rules must
    contain.
    """

    name = "paths"

    def __init__(self, board=None):
        self.board_override = board

    def reset(self, state, pattern, rng):
        self.rng = rng
        self.board = self.board_override or state.blowup
        self.tips = []  # endpoints of paths under construction

    def _extend(self, state, vertex):
        g = self.board.graph
        options = [
            (nb, eid)
            for nb, eid in g.adjacency[vertex]
            if state.is_free(eid) and nb != vertex
        ]
        self.rng.shuffle(options)
        for nb, eid in options:
            return eid, nb
        return None

    def choose(self, state):
        if state.free_count == 0:
            return []
        self.rng.shuffle(self.tips)
        while self.tips:
            tip = self.tips[-1]
            got = self._extend(state, tip)
            if got is None:
                self.tips.pop()
                continue
            eid, nb = got
            self.tips[-1] = nb
            return [eid]
        # start a fresh path from a random free edge
        eid = state.free_list[self.rng.randrange(state.free_count)]
        e = state.graph.edge_by_id[eid]
        if e.u != e.v:
            self.tips.extend((e.u, e.v))
        return [eid]


def make_step_avoider(kind, board, seed_rng=None):
    if kind == "focused":
        return FocusedAvoider(board)
    if kind == "paths":
        return PathBuilderAvoider(board)
    from aegame.avoider import RandomAvoider

    return RandomAvoider()

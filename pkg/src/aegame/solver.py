"""Exact ground truth: memoized minimax over full game trees.

Boards are capped at 16 edges; positions are bitmask pairs (Avoider's
edges, all taken edges) plus the side to move.  Early loss detection keeps
the reachable space small: any Avoider mask containing a copy is terminal,
so for sparse patterns her masks stay copy-free throughout the search.

The last-round exception is honoured: Enforcer claims min(b, free) edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .engine import AVOIDER, ENFORCER, GameState
from .multigraph import LabeledMultigraph
from .patterns import complete, graph_to_token
from .threats import all_copies

EDGE_CAP = 16


class BoardTooLarge(ValueError):
    pass


class Solver:
    """Game-theoretic winner for one (board, pattern, bias) triple.

    The memo table persists across queries, so repeatedly solving
    positions of the same game (as the optimal-play opponents do) is
    cheap.  Memoisation can be disabled to cross-check determinacy.
    """

    def __init__(
        self,
        board: LabeledMultigraph,
        pattern: LabeledMultigraph,
        b: int,
        use_memo: bool = True,
    ):
        if board.edge_count > EDGE_CAP:
            raise BoardTooLarge(
                f"solver handles at most {EDGE_CAP} edges, board has {board.edge_count}"
            )
        if not board.has_dense_ids:
            raise ValueError("solver boards need dense edge ids")
        self.board = board
        self.pattern = pattern
        self.b = b
        self.use_memo = use_memo
        self.full_mask = (1 << board.edge_count) - 1
        copies = all_copies(board, pattern)
        masks = sorted(
            {sum(1 << e for e in emb.host_edges()) for emb in copies}
        )
        self.copy_masks = masks
        self.copies_by_edge = [
            [m for m in masks if m >> e & 1] for e in range(board.edge_count)
        ]
        self.memo: dict = {}

    # -- mask-level search ---------------------------------------------------

    def _has_copy(self, av: int) -> bool:
        return any(m & ~av == 0 for m in self.copy_masks)

    def _completes(self, av_after: int, e: int) -> bool:
        return any(m & ~av_after == 0 for m in self.copies_by_edge[e])

    def enforcer_wins(self, av: int, taken: int, to_move: str) -> bool:
        """True iff Enforcer wins with optimal play from this position."""
        key = (av, taken, to_move)
        if self.use_memo and key in self.memo:
            return self.memo[key]
        free = self.full_mask & ~taken
        if free == 0:
            result = self._has_copy(av)
        elif to_move == AVOIDER:
            result = True  # she loses unless some move survives
            bits = _bits(free)
            for e in bits:
                av2 = av | (1 << e)
                if self._completes(av2, e):
                    continue  # immediate loss; Avoider avoids if possible
                if not self.enforcer_wins(av2, taken | (1 << e), ENFORCER):
                    result = False
                    break
        else:
            k = min(self.b, free.bit_count())
            bits = _bits(free)
            result = False
            for combo in combinations(bits, k):
                add = 0
                for e in combo:
                    add |= 1 << e
                if self.enforcer_wins(av, taken | add, AVOIDER):
                    result = True
                    break
        if self.use_memo:
            self.memo[key] = result
        return result

    # -- state-level API -----------------------------------------------------

    def masks_of(self, state: GameState) -> tuple:
        av = taken = 0
        for e in range(state.graph.edge_count):
            o = state.owner(e)
            if o:
                taken |= 1 << e
                if o == 1:
                    av |= 1 << e
        return av, taken

    def winner(self, state: Optional[GameState] = None) -> str:
        if state is None:
            wins = self.enforcer_wins(0, 0, AVOIDER)
        else:
            if state.b != self.b:
                raise ValueError("state bias differs from solver bias")
            av, taken = self.masks_of(state)
            wins = self.enforcer_wins(av, taken, state.to_move)
        return "enforcer" if wins else "avoider"

    def best_avoider_move(self, state: GameState) -> int:
        """A winning move when one exists, else the first non-suicidal edge."""
        av, taken = self.masks_of(state)
        fallback = None
        for e in sorted(state.free_edge_ids()):
            av2 = av | (1 << e)
            if self._completes(av2, e):
                continue
            if fallback is None:
                fallback = e
            if not self.enforcer_wins(av2, taken | (1 << e), ENFORCER):
                return e
        if fallback is not None:
            return fallback
        return min(state.free_edge_ids())


def _bits(mask: int) -> list:
    out = []
    e = 0
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return out


def solve(board, pattern, b: int, state: Optional[GameState] = None, use_memo: bool = True) -> str:
    return Solver(board, pattern, b, use_memo=use_memo).winner(state)


@dataclass(frozen=True)
class ThresholdReport:
    """Per-bias winners plus the two threshold biases.

    ``f_minus`` is the largest b0 with Enforcer winning at every b <= b0;
    ``f_plus`` the largest b where Enforcer wins at all (0 when none).
    """

    n: int
    pattern_desc: str
    winners: tuple  # ((b, "enforcer"|"avoider"), ...)
    f_minus: int
    f_plus: int

    def to_text(self) -> str:
        lines = [
            "aethresholds 1",
            f"n {self.n}",
            f"pattern {self.pattern_desc}",
        ]
        lines += [f"b {b} {w}" for b, w in self.winners]
        lines += [f"f_minus {self.f_minus}", f"f_plus {self.f_plus}", "end"]
        return "\n".join(lines) + "\n"


def thresholds(pattern: LabeledMultigraph, n: int) -> ThresholdReport:
    """Winner for every bias on the complete board K_n (exact)."""
    board = complete(n)
    if board.edge_count > EDGE_CAP:
        raise BoardTooLarge(f"K_{n} has {board.edge_count} > {EDGE_CAP} edges")
    winners = []
    f_minus = 0
    prefix = True
    f_plus = 0
    for b in range(1, board.edge_count + 1):
        w = Solver(board, pattern, b).winner()
        winners.append((b, w))
        if w == "enforcer":
            f_plus = b
            if prefix:
                f_minus = b
        else:
            prefix = False
    assert f_minus <= f_plus
    return ThresholdReport(n, graph_to_token(pattern), tuple(winners), f_minus, f_plus)

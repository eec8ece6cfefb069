"""Strict (1:b) Avoider-Enforcer game mechanics.

One round is one Avoider move (exactly one edge) followed by one Enforcer
move (exactly ``b`` edges, or everything left when fewer than ``b`` edges
remain).  Two variant rules cover the auxiliary games the strategies run:
``ModifiedFirstRound(r)`` lets Avoider open with any number of edges while
Enforcer must answer with exactly ``r``; ``EnforcerFirst`` swaps the order
within every round.

``GameState`` is the single source of truth during play.  It mutates in
place for speed (games can run to a million edges); ``copy()`` forks an
independent state for solvers and sessions.  Ownership never reverts and
the free count strictly decreases, so a loss, once detected, is final.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .multigraph import BlowUpBoard, LabeledMultigraph, blow_up
from .patterns import graph_from_token, graph_to_token, parse_pattern

AVOIDER = "A"
ENFORCER = "E"

FREE, OWNED_AVOIDER, OWNED_ENFORCER = 0, 1, 2


@dataclass(frozen=True)
class Standard:
    def describe(self) -> str:
        return "standard"


@dataclass(frozen=True)
class ModifiedFirstRound:
    r: int

    def describe(self) -> str:
        return f"modified {self.r}"


@dataclass(frozen=True)
class EnforcerFirst:
    def describe(self) -> str:
        return "enforcer-first"


Variant = Union[Standard, ModifiedFirstRound, EnforcerFirst]


def variant_from_text(text: str) -> Variant:
    tok = text.split()
    if tok[0] == "standard":
        return Standard()
    if tok[0] == "modified":
        return ModifiedFirstRound(int(tok[1]))
    if tok[0] == "enforcer-first":
        return EnforcerFirst()
    raise ValueError(f"unknown variant {text!r}")


class IllegalMove(ValueError):
    """A move violates turn order, freeness or cardinality rules."""


class GameState:
    """Edge ownership, bias, round counter and turn for one game."""

    __slots__ = (
        "graph",
        "blowup",
        "b",
        "variant",
        "round",
        "to_move",
        "ownership",
        "free_count",
        "free_list",
        "_free_pos",
        "avoider_count",
        "enforcer_count",
        "_av_adj",
        "_av_between",
        "loss_witness",
    )

    def __init__(self, board, b: int, variant: Variant = Standard()):
        if b < 1:
            raise ValueError("bias b must be >= 1")
        if isinstance(board, BlowUpBoard):
            self.blowup: Optional[BlowUpBoard] = board
            self.graph: LabeledMultigraph = board.graph
        else:
            self.blowup = None
            self.graph = board
        if not self.graph.has_dense_ids:
            raise ValueError("game boards need dense edge ids 0..m-1")
        if self.graph.edge_count == 0:
            raise ValueError("board has no edges")
        if isinstance(variant, ModifiedFirstRound) and not (0 <= variant.r <= b):
            raise ValueError("modified first round needs 0 <= r <= b")
        self.b = b
        self.variant = variant
        self.round = 1
        self.to_move = ENFORCER if isinstance(variant, EnforcerFirst) else AVOIDER
        m = self.graph.edge_count
        self.ownership = bytearray(m)
        self.free_count = m
        self.free_list = list(range(m))
        self._free_pos = list(range(m))
        self.avoider_count = 0
        self.enforcer_count = 0
        self._av_adj: list[list] = [[] for _ in range(self.graph.vertex_count)]
        self._av_between: dict = {}
        self.loss_witness = None

    # -- forks -------------------------------------------------------------

    def copy(self) -> "GameState":
        other = object.__new__(GameState)
        other.graph = self.graph
        other.blowup = self.blowup
        other.b = self.b
        other.variant = self.variant
        other.round = self.round
        other.to_move = self.to_move
        other.ownership = bytearray(self.ownership)
        other.free_count = self.free_count
        other.free_list = list(self.free_list)
        other._free_pos = list(self._free_pos)
        other.avoider_count = self.avoider_count
        other.enforcer_count = self.enforcer_count
        other._av_adj = [list(a) for a in self._av_adj]
        other._av_between = {k: list(v) for k, v in self._av_between.items()}
        other.loss_witness = self.loss_witness
        return other

    # -- accessors used by the oracles --------------------------------------

    def is_free(self, eid: int) -> bool:
        return self.ownership[eid] == FREE

    def owner(self, eid: int) -> int:
        return self.ownership[eid]

    def free_edge_ids(self):
        return (eid for eid in range(len(self.ownership)) if not self.ownership[eid])

    def avoider_adjacency(self, x: int):
        return self._av_adj[x]

    def avoider_edges_between(self, u: int, v: int):
        key = (u, v) if u <= v else (v, u)
        return self._av_between.get(key, ())

    def avoider_edge_ids(self):
        return (eid for eid in range(len(self.ownership)) if self.ownership[eid] == OWNED_AVOIDER)

    def avoider_graph(self) -> LabeledMultigraph:
        """Avoider's edges as a standalone graph on the board's vertices."""
        es = [
            (e.u, e.v, e.eid)
            for e in self.graph.edges
            if self.ownership[e.eid] == OWNED_AVOIDER
        ]
        fp = [
            (a, b)
            for a, b in self.graph.friend_pairs.items()
            if a < b
            and self.ownership[a] == OWNED_AVOIDER
            and self.ownership[b] == OWNED_AVOIDER
        ]
        return LabeledMultigraph(self.graph.vertex_count, es, fp)

    @property
    def is_over(self) -> bool:
        return self.free_count == 0

    def owed_now(self) -> int:
        """Edges the player to move must claim right now."""
        if self.to_move == AVOIDER:
            if self.free_count == 0:
                return 0
            if isinstance(self.variant, ModifiedFirstRound) and self.round == 1:
                return -1  # any number
            return 1
        quota = self.b
        if isinstance(self.variant, ModifiedFirstRound) and self.round == 1:
            quota = self.variant.r
        return min(quota, self.free_count)

    # -- moves ---------------------------------------------------------------

    def _claim(self, eid: int, who: int) -> None:
        if self.ownership[eid] != FREE:
            raise IllegalMove(f"edge {eid} is not free")
        self.ownership[eid] = who
        pos = self._free_pos[eid]
        last = self.free_list[-1]
        self.free_list[pos] = last
        self._free_pos[last] = pos
        self.free_list.pop()
        self.free_count -= 1
        if who == OWNED_AVOIDER:
            e = self.graph.edge_by_id[eid]
            if e.is_loop():
                self._av_adj[e.u].append((e.u, eid))
            else:
                self._av_adj[e.u].append((e.v, eid))
                self._av_adj[e.v].append((e.u, eid))
            self._av_between.setdefault(e.pair(), []).append(eid)
            self.avoider_count += 1
        else:
            self.enforcer_count += 1

    def apply_avoider(self, edge_ids: Iterable[int]) -> "GameState":
        ids = list(edge_ids)
        if self.to_move != AVOIDER:
            raise IllegalMove("not Avoider's turn")
        if len(set(ids)) != len(ids):
            raise IllegalMove("repeated edge ids in move")
        if self.free_count == 0:
            if ids:
                raise IllegalMove("no free edges remain; move must be empty")
        elif isinstance(self.variant, ModifiedFirstRound) and self.round == 1:
            pass  # any count, including zero
        elif len(ids) != 1:
            raise IllegalMove(f"Avoider claims exactly one edge, got {len(ids)}")
        for eid in ids:
            self._claim(eid, OWNED_AVOIDER)
        self.to_move = ENFORCER
        if isinstance(self.variant, EnforcerFirst):
            self.round += 1
        return self

    def apply_enforcer(self, edge_ids: Iterable[int]) -> "GameState":
        ids = list(edge_ids)
        if self.to_move != ENFORCER:
            raise IllegalMove("not Enforcer's turn")
        if len(set(ids)) != len(ids):
            raise IllegalMove("repeated edge ids in move")
        owed = self.owed_now()
        if len(ids) != owed:
            raise IllegalMove(f"Enforcer must claim exactly {owed} edges, got {len(ids)}")
        for eid in ids:
            self._claim(eid, OWNED_ENFORCER)
        self.to_move = AVOIDER
        if not isinstance(self.variant, EnforcerFirst):
            self.round += 1
        return self

    # -- verdicts ------------------------------------------------------------

    def note_avoider_edge(self, pattern: LabeledMultigraph, eid: int):
        """Cheap incremental loss check anchored at Avoider's newest edge."""
        if self.loss_witness is not None:
            return self.loss_witness
        from .threats import avoider_copy_using

        emb = avoider_copy_using(self, pattern, eid)
        if emb is not None:
            self.loss_witness = emb
        return emb

    def verdict(self, pattern: LabeledMultigraph):
        """(status, witness): status one of ongoing/avoider_wins/avoider_loses.

        A loss is reported as soon as Avoider's graph holds a copy (her
        graph only grows, so the terminal verdict is the same as under
        end-of-game evaluation); a win needs the whole board claimed.
        """
        from .threats import _search, state_host

        if self.loss_witness is None:
            emb = _search(pattern, state_host(self))
            if emb is not None:
                self.loss_witness = emb
        if self.loss_witness is not None:
            return ("avoider_loses", self.loss_witness)
        if self.free_count == 0:
            return ("avoider_wins", None)
        return ("ongoing", None)


# ---------------------------------------------------------------------------
# Policies and matches
# ---------------------------------------------------------------------------


class Policy:
    """Base for both sides; stateful per game, confined to one game."""

    name = "policy"

    def reset(self, state: GameState, pattern: LabeledMultigraph, rng: random.Random) -> None:
        pass

    def observe(self, state: GameState, actor: str, edge_ids: Sequence[int]) -> None:
        pass

    def choose(self, state: GameState) -> list[int]:
        raise NotImplementedError


@dataclass
class MoveRecord:
    round: int
    actor: str
    edge_ids: tuple

    def line(self) -> str:
        return f"move {self.round} {self.actor} " + " ".join(map(str, self.edge_ids))


@dataclass
class Transcript:
    """Replayable move log with the terminal verdict.

    Replaying the moves from the initial descriptor reproduces the verdict
    bit for bit; see :meth:`replay`.
    """

    board_desc: str
    pattern_desc: str
    b: int
    variant_desc: str
    seed: int
    moves: list = field(default_factory=list)
    verdict: str = "ongoing"
    witness: tuple = ()
    snapshots: list = field(default_factory=list)

    VERSION = 1

    def to_text(self) -> str:
        lines = [
            f"aetranscript {self.VERSION}",
            f"board {self.board_desc}",
            f"pattern {self.pattern_desc}",
            f"bias {self.b}",
            f"variant {self.variant_desc}",
            f"seed {self.seed}",
        ]
        lines += [m.line() for m in self.moves]
        for snap in self.snapshots:
            lines.append("snapshot " + " ".join(map(str, snap)))
        v = f"verdict {self.verdict}"
        if self.witness:
            v += " witness " + " ".join(map(str, self.witness))
        lines.append(v)
        lines.append("end")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Transcript":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("aetranscript "):
            raise ValueError("missing aetranscript header")
        if lines[0].split()[1] != str(cls.VERSION):
            raise ValueError("unsupported transcript version")
        t = cls("", "", 1, "standard", 0)
        for idx, ln in enumerate(lines[1:], start=2):
            tok = ln.split()
            if tok[0] == "board":
                t.board_desc = " ".join(tok[1:])
            elif tok[0] == "pattern":
                t.pattern_desc = " ".join(tok[1:])
            elif tok[0] == "bias":
                t.b = int(tok[1])
            elif tok[0] == "variant":
                t.variant_desc = " ".join(tok[1:])
            elif tok[0] == "seed":
                t.seed = int(tok[1])
            elif tok[0] == "move":
                t.moves.append(
                    MoveRecord(int(tok[1]), tok[2], tuple(int(x) for x in tok[3:]))
                )
            elif tok[0] == "snapshot":
                t.snapshots.append(tuple(int(x) for x in tok[1:]))
            elif tok[0] == "verdict":
                t.verdict = tok[1]
                if len(tok) > 2 and tok[2] == "witness":
                    t.witness = tuple(int(x) for x in tok[3:])
            elif tok[0] == "end":
                break
            else:
                raise ValueError(f"line {idx}: unknown transcript line {ln!r}")
        return t

    def replay(self):
        """Rebuild the game and re-apply every move; returns (verdict, state)."""
        board = board_from_desc(self.board_desc)
        pattern = pattern_from_desc(self.pattern_desc)
        state = GameState(board, self.b, variant_from_text(self.variant_desc))
        verdict = "ongoing"
        witness = None
        for mv in self.moves:
            if mv.actor == AVOIDER:
                state.apply_avoider(mv.edge_ids)
                for eid in mv.edge_ids:
                    emb = state.note_avoider_edge(pattern, eid)
                    if emb is not None:
                        verdict = "avoider_loses"
                        witness = emb
            else:
                state.apply_enforcer(mv.edge_ids)
        if verdict == "ongoing":
            verdict, emb = state.verdict(pattern)
            witness = emb
        if self.verdict.startswith("forfeit") or self.verdict == "stopped":
            verdict = self.verdict  # policy-level outcomes replay as recorded
        return verdict, state


def _load_graph_file(path: str):
    from .patterns import graph_from_text

    with open(path) as fh:
        return graph_from_text(fh.read())


def board_from_desc(desc: str):
    tok = desc.split()
    if tok[0] == "kn":
        from .patterns import complete

        return complete(int(tok[1]))
    if tok[0] == "blowup":
        pattern = pattern_from_desc(tok[1])
        sizes = tuple(int(x) for x in tok[2].split(","))
        return blow_up(pattern, sizes)
    if tok[0].startswith("mg:"):
        return graph_from_token(tok[0])
    if tok[0].startswith("@"):
        graph, parts = _load_graph_file(tok[0][1:])
        if parts:
            raise ValueError(
                "board files with part assignments are not supported; "
                "use a 'blowup' descriptor instead"
            )
        return graph
    raise ValueError(f"unknown board descriptor {desc!r}")


def pattern_from_desc(desc: str) -> LabeledMultigraph:
    desc = desc.strip()
    if desc.startswith("mg:"):
        return graph_from_token(desc)
    if desc.startswith("@"):
        return _load_graph_file(desc[1:])[0]
    return parse_pattern(desc)


def describe_board(board) -> str:
    if isinstance(board, BlowUpBoard):
        sizes = ",".join(str(len(p)) for p in board.parts)
        return f"blowup {graph_to_token(board.pattern)} {sizes}"
    return graph_to_token(board)


def play_match(
    avoider: Policy,
    enforcer: Policy,
    board,
    pattern: LabeledMultigraph,
    b: int,
    variant: Variant = Standard(),
    seed: int = 0,
    *,
    snapshots: bool = False,
    max_rounds: Optional[int] = None,
) -> Transcript:
    """Run one full game; deterministic given the seed.

    A policy returning an illegal move forfeits (the transcript records
    which side).  An enforcer policy may set ``finished`` once its goal
    condition holds, which ends the run with verdict ``stopped``.
    """
    state = GameState(board, b, variant)
    transcript = Transcript(
        describe_board(board),
        graph_to_token(pattern),
        b,
        variant.describe(),
        seed,
    )
    av_rng = random.Random((seed << 1) ^ 0xA5A5A5)
    en_rng = random.Random((seed << 1) ^ 0x5A5A5A ^ 1)
    avoider.reset(state, pattern, av_rng)
    enforcer.reset(state, pattern, en_rng)

    while not state.is_over:
        if max_rounds is not None and state.round > max_rounds:
            transcript.verdict = "stopped"
            return transcript
        actor = state.to_move
        policy = avoider if actor == AVOIDER else enforcer
        try:
            ids = list(policy.choose(state))
            rec = MoveRecord(state.round, actor, tuple(sorted(ids)))
            if actor == AVOIDER:
                state.apply_avoider(ids)
            else:
                state.apply_enforcer(ids)
        except IllegalMove:
            transcript.verdict = (
                "forfeit_avoider" if actor == AVOIDER else "forfeit_enforcer"
            )
            return transcript
        transcript.moves.append(rec)
        avoider.observe(state, actor, ids)
        enforcer.observe(state, actor, ids)
        if actor == AVOIDER:
            for eid in ids:
                emb = state.note_avoider_edge(pattern, eid)
                if emb is not None:
                    transcript.verdict = "avoider_loses"
                    transcript.witness = tuple(sorted(emb.host_edges()))
                    return transcript
        if snapshots and actor == ENFORCER:
            transcript.snapshots.append(
                (state.round, state.free_count, state.avoider_count, state.enforcer_count)
            )
        if getattr(enforcer, "finished", False):
            transcript.verdict = "stopped"
            return transcript

    verdict, emb = state.verdict(pattern)
    transcript.verdict = verdict
    if emb is not None:
        transcript.witness = tuple(sorted(emb.host_edges()))
    return transcript

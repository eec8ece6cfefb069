"""Interactive play service: a small HTTP facade over the engine.

Sessions live in memory.  A human plays one side (usually Avoider); the
machine side answers within the same request, so every response carries a
complete, current view.  Views and requests use the same versioned
line-oriented text formats as the CLI transcripts; threat sets are
computed server side and shipped with witnesses so clients need no graph
logic at all.
"""

from __future__ import annotations

import random
import threading
import time
import uuid
from dataclasses import dataclass, field
from fastapi import FastAPI, Request, Response

from .avoider import AVOIDER_POLICIES, make_avoider
from .engine import (
    AVOIDER,
    ENFORCER,
    GameState,
    IllegalMove,
    MoveRecord,
    Standard,
    Transcript,
    board_from_desc,
    describe_board,
    pattern_from_desc,
)
from .enforcer import (
    ENFORCER_POLICY_NAMES,
    PreconditionError,
    make_enforcer,
    relaxed_config,
)
from .patterns import graph_to_token
from .threats import threats

VIEW_VERSION = 1
INTERACTIVE_EDGE_CAP = 600


class ServiceError(Exception):
    def __init__(self, status: int, reason: str):
        super().__init__(reason)
        self.status = status
        self.reason = reason


@dataclass
class SessionRecord:
    sid: str
    state: GameState
    pattern: object
    pattern_desc: str
    human: str  # "avoider" | "enforcer"
    policy_name: str
    policy: object
    seed: int
    created: float
    transcript: Transcript
    warning: str = ""
    verdict: str = "ongoing"
    witness: tuple = ()
    last_machine: tuple = ()
    lock: threading.Lock = field(default_factory=threading.Lock)


class PlayService:
    def __init__(self, max_n: int = 30):
        self.max_n = max_n
        self.sessions: dict[str, SessionRecord] = {}

    # -- session lifecycle ---------------------------------------------------

    def create(self, text: str) -> SessionRecord:
        fields = _parse_kv(text, "aecreate")
        board_desc = fields.get("board", "kn 6")
        pattern_desc = fields.get("pattern", "P3")
        b = int(fields.get("bias", 1))
        human = fields.get("human", "avoider")
        policy_name = fields.get("policy", "endgame")
        seed = int(fields.get("seed", 0))
        board = board_from_desc(board_desc)
        graph = board.graph if hasattr(board, "graph") else board
        if graph.vertex_count > self.max_n or graph.edge_count > INTERACTIVE_EDGE_CAP:
            raise ServiceError(400, f"board exceeds the interactive cap (n <= {self.max_n})")
        pattern = pattern_from_desc(pattern_desc)
        state = GameState(board, b, Standard())
        warning = ""
        rng = random.Random(seed)
        if human == "avoider":
            try:
                policy = make_enforcer(policy_name)
                policy.reset(state, pattern, rng)
            except PreconditionError as exc:
                # entry bounds rarely hold at interactive sizes; relax and warn
                try:
                    policy = make_enforcer(
                        policy_name, config=relaxed_config(
                            odd_bound_mult=1000, even_bound_mult=1000
                        )
                    )
                    policy.reset(state, pattern, rng)
                    warning = f"policy precondition relaxed: {exc}"
                except Exception as exc2:
                    raise ServiceError(400, f"policy unusable here: {exc2}")
            except ValueError:
                raise ServiceError(400, f"unknown policy {policy_name!r}")
        else:
            try:
                policy = make_avoider(policy_name)
                policy.reset(state, pattern, rng)
            except ValueError:
                raise ServiceError(400, f"unknown policy {policy_name!r}")
        sid = uuid.uuid4().hex[:12]
        transcript = Transcript(
            board_desc if not hasattr(board, "graph") else describe_board(board),
            graph_to_token(pattern), b, "standard", seed,
        )
        rec = SessionRecord(
            sid, state, pattern, pattern_desc, human, policy_name, policy,
            seed, time.time(), transcript, warning,
        )
        self.sessions[sid] = rec
        with rec.lock:
            if self._machine_to_move(rec):
                self._machine_reply(rec)
        return rec

    def get(self, sid: str) -> SessionRecord:
        rec = self.sessions.get(sid)
        if rec is None:
            raise ServiceError(404, f"unknown session {sid}")
        return rec

    # -- play ------------------------------------------------------------------

    def _machine_to_move(self, rec: SessionRecord) -> bool:
        side = AVOIDER if rec.human == "enforcer" else ENFORCER
        return rec.verdict == "ongoing" and not rec.state.is_over and rec.state.to_move == side

    def _apply(self, rec: SessionRecord, actor: str, ids: list) -> None:
        state = rec.state
        move = MoveRecord(state.round, actor, tuple(sorted(ids)))
        if actor == AVOIDER:
            state.apply_avoider(ids)
        else:
            state.apply_enforcer(ids)
        rec.transcript.moves.append(move)
        if hasattr(rec.policy, "observe"):
            rec.policy.observe(state, actor, ids)
        if actor == AVOIDER:
            for eid in ids:
                emb = state.note_avoider_edge(rec.pattern, eid)
                if emb is not None:
                    rec.verdict = "avoider_loses"
                    rec.witness = tuple(sorted(emb.host_edges()))
                    rec.transcript.verdict = rec.verdict
                    rec.transcript.witness = rec.witness
                    return
        if state.is_over and rec.verdict == "ongoing":
            verdict, emb = state.verdict(rec.pattern)
            rec.verdict = verdict
            if emb is not None:
                rec.witness = tuple(sorted(emb.host_edges()))
            rec.transcript.verdict = rec.verdict
            rec.transcript.witness = rec.witness

    def _machine_reply(self, rec: SessionRecord) -> None:
        while self._machine_to_move(rec):
            actor = rec.state.to_move
            ids = list(rec.policy.choose(rec.state))
            self._apply(rec, actor, ids)
            rec.last_machine = (actor, tuple(sorted(ids)))
            if actor == ENFORCER or rec.human == "avoider":
                break

    def move(self, sid: str, text: str) -> SessionRecord:
        rec = self.get(sid)
        with rec.lock:
            if rec.verdict != "ongoing":
                raise ServiceError(409, "game is over")
            ids = _parse_move(text)
            side = AVOIDER if rec.human == "avoider" else ENFORCER
            if rec.state.to_move != side:
                raise ServiceError(409, "not your turn")
            try:
                self._apply(rec, side, ids)
            except IllegalMove as exc:
                raise ServiceError(422, str(exc))
            if rec.verdict == "ongoing":
                self._machine_reply(rec)
        return rec

    # -- views -------------------------------------------------------------------

    def view(self, rec: SessionRecord) -> str:
        state = rec.state
        g = state.graph
        lines = [
            f"aeview {VIEW_VERSION}",
            f"session {rec.sid}",
            f"pattern {rec.pattern_desc}",
            f"vertices {g.vertex_count}",
            f"bias {state.b}",
            f"human {rec.human}",
            f"round {state.round}",
            f"turn {'over' if rec.verdict != 'ongoing' or state.is_over else ('avoider' if state.to_move == AVOIDER else 'enforcer')}",
            f"verdict {rec.verdict if rec.verdict != 'ongoing' and rec.verdict else ('avoider_wins' if state.is_over else 'ongoing')}",
        ]
        if rec.warning:
            lines.append(f"warning {rec.warning}")
        owner_names = {0: "free", 1: "avoider", 2: "enforcer"}
        for e in g.edges:
            lines.append(
                f"edge {e.eid} {e.u} {e.v} {owner_names[state.owner(e.eid)]}"
            )
        if rec.verdict == "ongoing" and not state.is_over:
            found = threats(state, rec.pattern)
            for eid in sorted(found.edges):
                wit = " ".join(map(str, sorted(found.witnesses[eid].host_edges())))
                lines.append(f"threat {eid} witness {wit}")
        if rec.witness:
            lines.append("witness " + " ".join(map(str, rec.witness)))
        if rec.last_machine:
            actor, ids = rec.last_machine
            lines.append(f"machine {actor} " + " ".join(map(str, ids)))
        lines.append("end")
        return "\n".join(lines) + "\n"

    def policies_text(self) -> str:
        lines = ["aepolicies 1"]
        lines += [f"enforcer {n}" for n in ENFORCER_POLICY_NAMES]
        lines += [f"avoider {n}" for n in sorted(AVOIDER_POLICIES)]
        lines.append("end")
        return "\n".join(lines) + "\n"


def _parse_kv(text: str, header: str) -> dict:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith(header):
        raise ServiceError(400, f"missing {header} header")
    out = {}
    for ln in lines[1:]:
        if ln == "end":
            break
        key, _, value = ln.partition(" ")
        out[key] = value.strip()
    return out


def _parse_move(text: str) -> list:
    tokens = text.split()
    if tokens and tokens[0] == "move":
        tokens = tokens[1:]
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ServiceError(400, f"bad move payload {text!r}")


def build_app(max_n: int = 30) -> FastAPI:
    service = PlayService(max_n=max_n)
    app = FastAPI(title="avoider-enforcer play service")
    app.state.service = service

    def text(content: str, status: int = 200) -> Response:
        return Response(content, status_code=status, media_type="text/plain")

    @app.exception_handler(ServiceError)
    async def on_error(request, exc):
        return Response(f"error {exc.reason}\n", status_code=exc.status,
                        media_type="text/plain")

    @app.get("/policies")
    async def policies():
        return text(service.policies_text())

    @app.post("/games")
    async def create(request: Request):
        body = (await request.body()).decode()
        rec = service.create(body)
        return text(service.view(rec), 201)

    @app.get("/games/{sid}")
    async def get_state(sid: str):
        return text(service.view(service.get(sid)))

    @app.post("/games/{sid}/moves")
    async def move(sid: str, request: Request):
        body = (await request.body()).decode()
        rec = service.move(sid, body)
        return text(service.view(rec))

    @app.get("/games/{sid}/transcript")
    async def transcript(sid: str):
        return text(service.get(sid).transcript.to_text())

    return app

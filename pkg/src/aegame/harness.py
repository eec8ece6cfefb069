"""Batch experiment runner: simulations, sweeps, audits, reproducible output.

An experiment is a finite run matrix (board family x bias set x policy
pair x seeds).  Results are plain rows; rerunning a spec with the same
seeds reproduces the table byte for byte.  Output is CSV plus a run
manifest carrying every input needed to reproduce the table.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .avoider import make_avoider
from .engine import (
    ModifiedFirstRound,
    Standard,
    Transcript,
    board_from_desc,
    pattern_from_desc,
    play_match,
)
from .enforcer import PAPER_CONFIG, StrategyConfig, make_enforcer
from .threats import threats


@dataclass
class ExperimentSpec:
    """One run matrix; seeds are explicit so nothing hides entropy."""

    pattern: str
    boards: Sequence[str]
    biases: Sequence[int]
    avoider: str
    enforcer: str
    seeds: Sequence[int]
    variant_r: Optional[int] = None  # opening remainder, if modified
    audit: str = "none"  # none | paper
    config: StrategyConfig = field(default_factory=lambda: PAPER_CONFIG)
    out_path: Optional[str] = None
    transcript_dir: Optional[str] = None

    def validate(self) -> None:
        if not self.boards or not self.biases or not self.seeds:
            raise ValueError("boards, biases and seeds must be non-empty")
        pattern_from_desc(self.pattern)
        for bd in self.boards:
            board_from_desc(bd)

    def cells(self):
        for bd in self.boards:
            for b in self.biases:
                for seed in self.seeds:
                    yield (bd, b, seed)


@dataclass
class ResultRow:
    board: str
    bias: int
    seed: int
    avoider: str
    enforcer: str
    verdict: str
    rounds: int
    final_threats: int
    audit_violations: int
    wall_time: float
    error: str = ""

    HEADER = (
        "board,bias,seed,avoider,enforcer,verdict,rounds,"
        "final_threats,audit_violations,error"
    )

    def csv(self, timing: bool = False) -> str:
        row = (
            f"{self.board},{self.bias},{self.seed},{self.avoider},"
            f"{self.enforcer},{self.verdict},{self.rounds},"
            f"{self.final_threats},{self.audit_violations},{self.error}"
        )
        if timing:
            row += f",{self.wall_time:.3f}"
        return row


def _count_final_threats(transcript: Transcript, pattern, cap: int = 64) -> int:
    try:
        verdict, state = transcript.replay()
    except Exception:
        return -1
    if state.free_count == 0 or state.loss_witness is not None:
        return 0
    return len(threats(state, pattern, cap=cap))


def run(spec: ExperimentSpec, count_threats: bool = False) -> list:
    """Execute every cell; per-cell errors land in rows, the run continues."""
    spec.validate()
    pattern = pattern_from_desc(spec.pattern)
    rows = []
    for bd, b, seed in spec.cells():
        t0 = time.perf_counter()
        try:
            board = board_from_desc(bd)
            avoider = make_avoider(spec.avoider)
            enforcer = make_enforcer(spec.enforcer, config=spec.config)
            variant = (
                ModifiedFirstRound(spec.variant_r)
                if spec.variant_r is not None
                else Standard()
            )
            transcript = play_match(
                avoider, enforcer, board, pattern, b, variant, seed=seed
            )
            violations = len(getattr(enforcer, "audit_violations", ()) or ())
            if spec.audit == "paper":
                violations += int(getattr(enforcer, "degree_violations", 0) or 0)
            rows.append(
                ResultRow(
                    bd, b, seed, spec.avoider, spec.enforcer,
                    transcript.verdict, transcript.moves[-1].round if transcript.moves else 0,
                    _count_final_threats(transcript, pattern) if count_threats else -1,
                    violations, time.perf_counter() - t0,
                )
            )
            if spec.transcript_dir:
                import os

                os.makedirs(spec.transcript_dir, exist_ok=True)
                name = f"{spec.enforcer}-{b}-{seed}.aet"
                with open(os.path.join(spec.transcript_dir, name), "w") as fh:
                    fh.write(transcript.to_text())
        except Exception as exc:  # per-cell isolation
            rows.append(
                ResultRow(
                    bd, b, seed, spec.avoider, spec.enforcer,
                    "error", 0, -1, -1, time.perf_counter() - t0,
                    type(exc).__name__,
                )
            )
    return rows


def rows_to_csv(rows: Sequence[ResultRow], timing: bool = False) -> str:
    """Timing is opt-in: without it the table is reproducible byte for byte."""
    header = ResultRow.HEADER + (",wall_time" if timing else "")
    return "\n".join([header] + [r.csv(timing) for r in rows]) + "\n"


def manifest(spec: ExperimentSpec) -> str:
    from . import __version__

    return json.dumps(
        {
            "version": __version__,
            "pattern": spec.pattern,
            "boards": list(spec.boards),
            "biases": list(spec.biases),
            "avoider": spec.avoider,
            "enforcer": spec.enforcer,
            "seeds": list(spec.seeds),
            "variant_r": spec.variant_r,
            "audit": spec.audit,
        },
        indent=2,
        sort_keys=True,
    )


@dataclass
class SweepReport:
    """Per-bias win fractions for one policy pair.

    These are policy-relative transition estimates; only the exact solver
    earns the game-theoretic threshold names.
    """

    pattern: str
    board: str
    rows: list  # (bias, enforcer_wins, games)
    largest_all_wins: int
    largest_any_win: int

    def to_text(self) -> str:
        lines = [
            "aesweep 1  (policy-relative, not game-theoretic)",
            f"pattern {self.pattern}",
            f"board {self.board}",
        ]
        for b, w, g in self.rows:
            lines.append(f"bias {b} wins {w}/{g}")
        lines.append(f"largest_all_wins {self.largest_all_wins}")
        lines.append(f"largest_any_win {self.largest_any_win}")
        lines.append("end")
        return "\n".join(lines) + "\n"


def sweep_threshold(
    pattern_desc: str,
    board_desc: str,
    avoider: str,
    enforcer: str,
    biases: Sequence[int],
    seeds: Sequence[int],
    config: StrategyConfig = PAPER_CONFIG,
) -> SweepReport:
    pattern = pattern_from_desc(pattern_desc)
    rows = []
    largest_all = 0
    prefix = True
    largest_any = 0
    for b in sorted(biases):
        wins = 0
        for seed in seeds:
            board = board_from_desc(board_desc)
            try:
                t = play_match(
                    make_avoider(avoider),
                    make_enforcer(enforcer, config=config),
                    board, pattern, b, seed=seed,
                )
                wins += t.verdict == "avoider_loses"
            except Exception:
                pass
        rows.append((b, wins, len(seeds)))
        if wins == len(seeds):
            largest_any = b
            if prefix:
                largest_all = b
        else:
            prefix = False
            if wins > 0:
                largest_any = b
    return SweepReport(pattern_desc, board_desc, rows, largest_all, largest_any)

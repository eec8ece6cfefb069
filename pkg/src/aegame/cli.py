"""Command-line surface.

Subcommands: simulate, sweep, solve, thresholds, nt {div,div2,bigrem},
audit, replay, serve.  Tables go to stdout or --out; a machine-readable
manifest accompanies every simulation table.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .engine import Transcript
from .enforcer import PAPER_CONFIG, relaxed_config
from .harness import ExperimentSpec, manifest, rows_to_csv, run, sweep_threshold
from .numbertheory import (
    construct_aligned_divisor,
    construct_odd_divisor,
    find_large_remainder_bias,
)
from .patterns import parse_pattern
from .solver import solve as solve_game
from .solver import thresholds as solve_thresholds
from .engine import board_from_desc, pattern_from_desc


def _parse_relax(text):
    """name=value pairs, e.g. odd_bound_mult=3 matching_div_mult=1/2."""
    if not text:
        return PAPER_CONFIG
    overrides = {}
    for item in text:
        name, _, value = item.partition("=")
        overrides[name] = Fraction(value)
    return relaxed_config(**overrides)


def _write_out(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common(p):
    p.add_argument("--pattern", required=True, help="pattern name or mg: token")
    p.add_argument("--out", default=None)


def cmd_simulate(args) -> int:
    spec = ExperimentSpec(
        pattern=args.pattern,
        boards=args.board,
        biases=args.bias,
        avoider=args.avoider,
        enforcer=args.enforcer,
        seeds=args.seeds,
        variant_r=args.modified_r,
        audit=args.audit,
        config=_parse_relax(args.relax),
        transcript_dir=args.transcripts,
    )
    rows = run(spec)
    _write_out(rows_to_csv(rows), args.out)
    if args.manifest:
        with open(args.manifest, "w") as fh:
            fh.write(manifest(spec))
    bad = [r for r in rows if r.verdict == "error"]
    return 1 if bad and args.strict else 0


def cmd_sweep(args) -> int:
    rep = sweep_threshold(
        args.pattern, args.board[0], args.avoider, args.enforcer,
        args.bias, args.seeds, config=_parse_relax(args.relax),
    )
    _write_out(rep.to_text(), args.out)
    return 0


def cmd_solve(args) -> int:
    board = board_from_desc(args.board[0])
    pattern = pattern_from_desc(args.pattern)
    winner = solve_game(board, pattern, args.bias[0])
    _write_out(f"winner {winner}\n", args.out)
    return 0


def cmd_thresholds(args) -> int:
    rep = solve_thresholds(parse_pattern(args.pattern), args.n)
    _write_out(rep.to_text(), args.out)
    return 0


def cmd_nt(args) -> int:
    if args.kind == "div":
        cert = construct_odd_divisor(Fraction(args.alpha), args.C, args.k)
        _write_out(cert.to_text(), args.out)
    elif args.kind == "div2":
        cert = construct_aligned_divisor(args.n, Fraction(args.alpha), Fraction(args.c))
        _write_out(cert.to_text(), args.out)
    else:
        cert = find_large_remainder_bias(
            args.N, args.q, Fraction(args.alpha),
            Fraction(args.c1), Fraction(args.c2), args.C,
        )
        _write_out(cert.to_text(), args.out)
    return 0


def cmd_replay(args) -> int:
    with open(args.file) as fh:
        transcript = Transcript.from_text(fh.read())
    verdict, state = transcript.replay()
    ok = verdict == transcript.verdict
    _write_out(
        f"recorded {transcript.verdict}\nreplayed {verdict}\n"
        f"match {'yes' if ok else 'NO'}\n",
        args.out,
    )
    return 0 if ok else 1


def cmd_audit(args) -> int:
    args.audit = "paper"
    return cmd_simulate(args)


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    app = build_app(max_n=args.max_n)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aegame")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sim = sub.add_parser("simulate", help="run a simulation matrix")
    _add_common(sim)
    sim.add_argument("--board", nargs="+", required=True,
                     help='board descriptors, e.g. "kn 72" or "blowup P3 8,8,8"')
    sim.add_argument("--bias", type=int, nargs="+", required=True)
    sim.add_argument("--avoider", default="random")
    sim.add_argument("--enforcer", default="endgame")
    sim.add_argument("--seeds", type=int, nargs="+", default=[0])
    sim.add_argument("--modified-r", type=int, default=None)
    sim.add_argument("--audit", choices=["none", "paper"], default="none")
    sim.add_argument("--relax", nargs="*", default=None,
                     help="multiplier overrides name=fraction")
    sim.add_argument("--manifest", default=None)
    sim.add_argument("--transcripts", default=None)
    sim.add_argument("--strict", action="store_true")
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="empirical bias transition (policy-relative)")
    _add_common(sw)
    sw.add_argument("--board", nargs=1, required=True)
    sw.add_argument("--bias", type=int, nargs="+", required=True)
    sw.add_argument("--avoider", default="random")
    sw.add_argument("--enforcer", default="endgame")
    sw.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    sw.add_argument("--relax", nargs="*", default=None)
    sw.set_defaults(func=cmd_sweep)

    so = sub.add_parser("solve", help="exact winner on a small board")
    _add_common(so)
    so.add_argument("--board", nargs=1, required=True)
    so.add_argument("--bias", type=int, nargs=1, required=True)
    so.set_defaults(func=cmd_solve)

    th = sub.add_parser("thresholds", help="exact per-bias winners on K_n")
    _add_common(th)
    th.add_argument("--n", type=int, required=True)
    th.set_defaults(func=cmd_thresholds)

    nt = sub.add_parser("nt", help="number-theoretic certificates")
    ntsub = nt.add_subparsers(dest="kind", required=True)
    d1 = ntsub.add_parser("div")
    d1.add_argument("--alpha", required=True)
    d1.add_argument("--C", type=int, default=2)
    d1.add_argument("--k", type=int, default=1)
    d1.add_argument("--out", default=None)
    d1.set_defaults(func=cmd_nt)
    d2 = ntsub.add_parser("div2")
    d2.add_argument("--n", type=int, required=True)
    d2.add_argument("--alpha", required=True)
    d2.add_argument("--c", default="1")
    d2.add_argument("--out", default=None)
    d2.set_defaults(func=cmd_nt)
    d3 = ntsub.add_parser("bigrem")
    d3.add_argument("--N", type=int, required=True)
    d3.add_argument("--q", type=int, required=True)
    d3.add_argument("--alpha", default="2")
    d3.add_argument("--c1", default="1")
    d3.add_argument("--c2", default="1/4")
    d3.add_argument("--C", type=int, default=3)
    d3.add_argument("--out", default=None)
    d3.set_defaults(func=cmd_nt)

    au = sub.add_parser("audit", help="simulate with every runtime assertion on")
    _add_common(au)
    au.add_argument("--board", nargs="+", required=True)
    au.add_argument("--bias", type=int, nargs="+", required=True)
    au.add_argument("--avoider", default="random")
    au.add_argument("--enforcer", default="endgame")
    au.add_argument("--seeds", type=int, nargs="+", default=[0])
    au.add_argument("--modified-r", type=int, default=None)
    au.add_argument("--relax", nargs="*", default=None)
    au.add_argument("--manifest", default=None)
    au.add_argument("--transcripts", default=None)
    au.add_argument("--strict", action="store_true")
    au.set_defaults(func=cmd_audit)

    rp = sub.add_parser("replay", help="verify a transcript reproduces its verdict")
    rp.add_argument("file")
    rp.add_argument("--out", default=None)
    rp.set_defaults(func=cmd_replay)

    sv = sub.add_parser("serve", help="run the interactive play service")
    sv.add_argument("--port", type=int, default=8023)
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--max-n", type=int, default=30)
    sv.set_defaults(func=cmd_serve)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

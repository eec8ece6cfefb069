"""Acceptance suite: one test per criterion, each printing a pass line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines.  Tolerances are pinned here; stated time budgets are asserted.
"""

import random
import time
from fractions import Fraction
from math import ceil, comb

import pytest

from aegame.avoider import (
    AntiEndgameAvoider,
    GreedyMinThreatAvoider,
    PotentialAvoider,
    RandomAvoider,
    check_avoiderwin,
)
from aegame.blowup import (
    BlowupMasterEnforcer,
    BlowupStepEngine,
    C2BaseEnforcer,
    check_step_certificate,
)
from aegame.engine import GameState, ModifiedFirstRound, play_match
from aegame.enforcer import (
    DisconnectedEnforcer,
    EndgameEnforcer,
    EvenUnicyclicEnforcer,
    OddUnicyclicEnforcer,
    PAPER_CONFIG,
    make_enforcer,
    relaxed_config,
)
from aegame.multigraph import LabeledMultigraph, anchor_path_tree, blow_up
from aegame.numbertheory import (
    BIGREM_PRESETS,
    aligned_divisor_min_n,
    check_remainder_transfer,
    construct_aligned_divisor,
    construct_odd_divisor,
    find_large_remainder_bias,
    signed_remainder,
)
from aegame.patterns import complete, cycle, disjoint_union, parse_pattern, path
from aegame.solver import Solver, thresholds
from aegame.supersat import extract_disjoint_trees, packing_lower_bound, verify_cycle_threat_bound
from aegame.threats import is_threat, threats

from strategy_params import make_step_avoider, master_scales, step_scales


def report(name: str, started: float, budget_s: float, detail: str = "") -> None:
    elapsed = time.time() - started
    print(f"[acceptance] {name}: PASS ({elapsed:.1f}s / {budget_s:.0f}s budget) {detail}")
    assert elapsed < budget_s, f"{name} exceeded its time budget"


def random_graph(rng, n, p):
    return LabeledMultigraph(
        n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    )


class TestExactThresholds:
    def test_p3_formula(self):
        t0 = time.time()
        for n in (4, 5, 6):
            rep = thresholds(path(3), n)
            assert rep.f_plus == comb(n, 2) - 2, n
            assert rep.f_minus <= rep.f_plus
        report("exact-thresholds-P3", t0, 300)


class TestEndgameSoundness:
    def test_500_threat_rich_states(self):
        t0 = time.time()
        rng = random.Random(2024)
        boards = {}
        for i in range(8):
            n = 6 + (i % 2)
            g = random_graph(rng, n, 0.55)
            while not (8 <= g.edge_count <= 14):
                g = random_graph(rng, n, 0.55)
            boards[f"r{i}"] = g
        boards["k4"] = complete(4)
        boards["k5"] = complete(5)
        pats = {"P3": path(3), "K3": complete(3)}
        solvers = {}
        wins = trials = 0
        attempts = 0
        while trials < 500 and attempts < 40000:
            attempts += 1
            bname = rng.choice(sorted(boards))
            board = boards[bname]
            pname = "P3" if rng.random() < 0.65 else "K3"
            pat = pats[pname]
            b = rng.randint(1, 3 if pname == "P3" else 2)
            state = GameState(board, b)
            dead = False
            for _ in range(2 * rng.randint(1, 4) - 1):
                if state.is_over:
                    dead = True
                    break
                free = list(state.free_edge_ids())
                if state.to_move == "A":
                    safe = [e for e in free if not is_threat(state, pat, e)]
                    if not safe:
                        dead = True
                        break
                    state.apply_avoider([rng.choice(safe)])
                else:
                    state.apply_enforcer(rng.sample(free, state.owed_now()))
            if dead or state.to_move != "E":
                continue
            if len(threats(state, pat, cap=b + 1)) < b + 1:
                continue
            trials += 1
            key = (bname, pname, b)
            solver = solvers.get(key)
            if solver is None:
                solver = solvers[key] = Solver(board, pat, b)
            pol = EndgameEnforcer()
            pol.reset(state, pat, rng)
            lost = False
            while not state.is_over:
                if state.to_move == "E":
                    state.apply_enforcer(pol.choose(state))
                else:
                    e = solver.best_avoider_move(state)
                    state.apply_avoider([e])
                    if state.note_avoider_edge(pat, e):
                        lost = True
                        break
            if not lost:
                lost = state.verdict(pat)[0] == "avoider_loses"
            wins += lost
        assert trials == 500, f"only generated {trials} qualifying states"
        assert wins == 500, f"endgame lost {500 - wins} of 500"
        report("endgame-soundness-500", t0, 600)


class TestOddCycleAtPublishedConstants:
    def test_k3_all_biases_all_avoiders(self):
        t0 = time.time()
        combos = []
        for n in (72, 108):
            b = 1
            while (b + 1) * 36 <= n:
                combos.append((n, b))
                b += 1
        assert combos == [(72, 1), (108, 1), (108, 2)]
        makers = (RandomAvoider, GreedyMinThreatAvoider, AntiEndgameAvoider)
        games = wins = 0
        for n, b in combos:
            board = complete(n)
            for seed in range(50):
                for mk in makers:
                    enf = OddUnicyclicEnforcer(PAPER_CONFIG)
                    t = play_match(mk(), enf, board, complete(3), b, seed=seed)
                    games += 1
                    wins += t.verdict == "avoider_loses"
                    # handover condition: win before the cross pool empties,
                    # or at least b+1 threats at the handover
                    assert enf.handover_ok in (None, True), (n, b, seed)
        assert games == 450
        assert wins == games, f"{games - wins} losses"
        report("odd-cycle-published-constants", t0, 600, f"{games} games")


class TestEvenCycleAtPublishedConstants:
    def test_c4_n1600(self):
        t0 = time.time()
        board = complete(1600)
        wins = 0
        for seed in range(10):
            for mk in (RandomAvoider, AntiEndgameAvoider):
                enf = EvenUnicyclicEnforcer(PAPER_CONFIG)
                t = play_match(mk(), enf, board, cycle(4), 1, seed=seed)
                wins += t.verdict == "avoider_loses"
                assert enf.degree_violations == 0, (seed, mk)
        assert wins == 20
        # gadget-count clause: the hand-off hypotheses guarantee 16 disjoint
        # anchored-path copies per side.  No real game reaches the hand-off
        # (the sides force a copy long before they fill), so the count is
        # verified on synthetic end-of-stage-one states meeting the degree
        # and density hypotheses.
        apt = anchor_path_tree(cycle(4))
        t_h = apt.tree.vertex_count
        assert t_h == 6
        rng = random.Random(7)
        half = 800
        need_edges = 25 * t_h * half
        for side in range(2):
            edges = set()
            while len(edges) < need_edges:
                u = rng.randrange(half)
                v = rng.randrange(half)
                if u != v:
                    edges.add((min(u, v), max(u, v)))
            g = LabeledMultigraph(half, sorted(edges))
            maxdeg = max(g.degree(v) for v in range(half))
            assert maxdeg <= 3 * half / 2  # the degree hypothesis, b = 1
            fam = extract_disjoint_trees(g, apt.tree)
            assert len(fam) >= 16, f"side {side}: {len(fam)}"
        report("even-cycle-published-constants", t0, 1800)


class TestBlowupStructural:
    def test_step_certificates_and_claims(self):
        t0 = time.time()
        names = sorted(step_scales())
        for name in names:
            pattern, sizes, b, r, cfg = step_scales()[name]
            board = blow_up(pattern, sizes)
            kinds = (
                ("focused", "random")
                if pattern.cycle_rank() == 0
                else ("focused", "paths")
            )
            from test_blowup import drive_step

            for seed in range(10):
                kind = kinds[seed % 2]
                engine, state = drive_step(
                    board, b, r, make_step_avoider(kind, board), seed, cfg
                )
                assert engine is not None and engine.certificate is not None, (name, seed)
                assert engine.tracker.violations == [], (name, seed, engine.tracker.violations)
                assert not engine.bin_exhausted and not engine.demand_overflow, (name, seed)
                fails = check_step_certificate(engine.certificate, state, cfg)
                assert fails == [], (name, seed, fails)
        report("blowup-step-certificates", t0, 1200, f"{len(names)}x10 runs")

    def test_c2_base_case(self):
        t0 = time.time()
        board = blow_up(parse_pattern("C2"), (64, 64))
        done = 0
        for seed in range(20):
            pol = C2BaseEnforcer(PAPER_CONFIG, stop_on_declare=True)
            t = play_match(
                RandomAvoider(), pol, board, parse_pattern("C2"), 8,
                ModifiedFirstRound(5), seed=seed,
            )
            assert t.verdict in ("stopped", "avoider_loses"), seed
            if t.verdict == "stopped":
                assert pol.outcome["declared"] >= pol.outcome["target"]
                assert pol.audit_violations == []
            done += 1
        assert done == 20
        report("blowup-c2-base", t0, 300)

    def test_master_terminates_with_copy_or_target(self):
        t0 = time.time()
        for name in sorted(master_scales()):
            pattern, sizes, b, r, avoider_kind, cfg = master_scales()[name]
            board = blow_up(pattern, sizes)
            for seed in range(20):
                pol = BlowupMasterEnforcer(cfg, stop_on_declare=True)
                t = play_match(
                    make_step_avoider(avoider_kind, board), pol, board,
                    pattern, b, ModifiedFirstRound(r), seed=seed,
                )
                assert t.verdict in ("stopped", "avoider_loses"), (name, seed, t.verdict)
                if t.verdict == "stopped":
                    assert pol.outcome is not None, (name, seed)
                    if pol.outcome["kind"] == "threats":
                        assert pol.outcome["met"], (name, seed, pol.outcome)
                assert pol.audit_violations == [], (name, seed)
        report("blowup-master-termination", t0, 1200)


class TestCycleThreatCount:
    def test_300_random_graphs(self):
        t0 = time.time()
        rng = random.Random(99)
        pats = [complete(3), cycle(4), cycle(5), parse_pattern("C4+pendant")]
        checked = 0
        for i in range(300):
            pat = pats[i % 4]
            n = rng.randint(3, 12)
            g = random_graph(rng, n, rng.choice([0.15, 0.35, 0.6, 0.85]))
            count, bound, ok = verify_cycle_threat_bound(g, pat)
            assert ok, (i, count, bound)
            checked += 1
        assert checked == 300
        report("cycle-threat-count-bound", t0, 300)


class TestDisjointCopies:
    def test_300_instances(self):
        t0 = time.time()
        rng = random.Random(4)
        spider = LabeledMultigraph(5, [(0, 1), (1, 2), (0, 3), (0, 4)])
        trees = [path(3), path(4), parse_pattern("S4"), spider]
        for i in range(300):
            tree = trees[i % 4]
            n = rng.randint(tree.vertex_count, 40)
            g = random_graph(rng, n, rng.choice([0.08, 0.25, 0.5, 0.8]))
            fam = extract_disjoint_trees(g, tree)
            fam.validate(g)
            assert len(fam) >= packing_lower_bound(g, tree), i
        report("disjoint-tree-packing", t0, 300)


class TestNumberTheoryAcceptance:
    def test_a_signed_remainder_inequalities(self):
        t0 = time.time()
        rng = random.Random(1)
        for _ in range(100_000):
            s = rng.randint(1, 10**6)
            m = rng.randint(-(10**9), 10**9)
            mp = rng.randint(-(10**9), 10**9)
            r = lambda x: abs(signed_remainder(s, x).value)
            assert r(m + mp) <= r(m) + r(mp)
            assert r(m) <= r(m + mp) + r(mp)
        report("signed-remainder-inequalities", t0, 600)

    def test_b_remainder_transfer_exhaustive(self):
        t0 = time.time()
        checked = 0
        for s in range(1, 201):
            for j in range(1, s // 2 + 1):
                m_cap = (s * s) // (16 * j) + 2
                for m in range(1, m_cap):
                    if s <= j:
                        continue
                    rprev = abs(signed_remainder(s - j, m).value)
                    y_min = max(rprev, (4 * j * m) // s + 1, 1)
                    if 4 * y_min >= s:
                        continue
                    chk = check_remainder_transfer(s, j, y_min, m)
                    if chk.premises_ok:
                        checked += 1
                        assert chk.conclusion_ok, (s, j, y_min, m)
        assert checked > 10000
        report("remainder-transfer-exhaustive", t0, 600, f"{checked} tuples")

    def test_c_odd_divisor_cases(self):
        t0 = time.time()
        cert = construct_odd_divisor(Fraction(3, 2), 3, 1)
        assert (cert.n, cert.q) == (20, 21) and (comb(20, 2) - 1) % 21 == 0
        rng = random.Random(8)
        alphas = [Fraction(1, 2), Fraction(2, 3), Fraction(1), Fraction(6, 5),
                  Fraction(4, 3), Fraction(3, 2), Fraction(7, 4), Fraction(2)]
        for i in range(50):
            alpha = alphas[i % len(alphas)]
            C = rng.randint(1, 4)
            k = rng.choice([1, 3, 5, 7, 9, 11, 13])
            cert = construct_odd_divisor(alpha, C, k)
            assert cert.q % 2 == 1
            assert (comb(cert.n, 2) - 1) % cert.q == 0
            assert cert.verify()
        report("odd-divisor-construction", t0, 600)

    def test_d_aligned_divisor_ranges(self):
        t0 = time.time()
        cert = construct_aligned_divisor(100, Fraction(3, 2), Fraction(1))
        assert (cert.t, cert.q) == (45, 545) and comb(100, 2) - 45 == 545 * 9
        for alpha in (Fraction(6, 5), Fraction(3, 2), Fraction(9, 5)):
            n0 = aligned_divisor_min_n(alpha)
            for n in range(n0, n0 + 501):
                cert = construct_aligned_divisor(n, alpha)
                assert cert.q % 2 == 1
                assert cert.verify(), (alpha, n)
        report("aligned-divisor-ranges", t0, 600)

    def test_e_remainder_bias_presets(self):
        t0 = time.time()
        rng = random.Random(17)
        for name, preset in BIGREM_PRESETS.items():
            found = 0
            for _ in range(1000):
                q = rng.randint(200, 2500)
                lo = int(float(preset.c2) * q ** float(preset.alpha)) + 1
                hi = int(float(preset.c1) * q ** float(preset.alpha)) - 1
                N = rng.randint(lo, hi)
                cert = find_large_remainder_bias(
                    N, q, preset.alpha, preset.c1, preset.c2, preset.C
                )
                assert cert.verify()
                found += 1
            assert found == 1000, name
        report("large-remainder-bias-presets", t0, 600)


class TestAvoiderSide:
    @staticmethod
    def qualifying_tuples():
        out = []
        for n in range(13, 31):
            binom = comb(n, 2)
            q = 3 * n - 2
            hits = 0
            for bp1 in range(binom, 2, -1):
                if binom % bp1 >= q + 1:
                    cond = check_avoiderwin(n, bp1 - 1, q, complete(3))
                    if cond.holds:
                        out.append((n, bp1 - 1, q))
                        hits += 1
                        if hits == 2:
                            break
            if len(out) >= 20:
                break
        return out[:20]

    def test_potential_wins_under_condition(self):
        t0 = time.time()
        tuples = self.qualifying_tuples()
        assert len(tuples) == 20
        for n, b, q, in tuples:
            cond = check_avoiderwin(n, b, q, complete(3))
            assert cond.holds
        games = 0
        for n, b, q in tuples:
            board = complete(n)
            suite = [
                ("endgame", lambda: make_enforcer("endgame")),
                ("odd", lambda: OddUnicyclicEnforcer(check_bound=False)),
                ("disconnected", lambda: DisconnectedEnforcer(check_bound=False)),
            ]
            if b % 2 == 0:
                from aegame.blowup import MasterEnforcer

                suite.append(("master", lambda: MasterEnforcer(PAPER_CONFIG)))
            for pname, mk in suite:
                t = play_match(
                    PotentialAvoider(q=q), mk(), board, complete(3), b, seed=n
                )
                games += 1
                assert t.verdict == "avoider_wins", (n, b, pname, t.verdict)
        # solver-cap clause: no qualifying tuple fits a 16-edge board, since
        # the remainder clause needs binom(n,2) >= 3n-1, impossible for n<=6
        for n in range(2, 7):
            assert comb(n, 2) < 3 * n - 1
        # small-board sanity in the same spirit: where the solver says the
        # game is Avoider's, potential play wins it
        for n, b in ((4, 5), (5, 9)):
            solver = Solver(complete(n), path(3), b)
            assert solver.winner() == "avoider"
            t = play_match(
                PotentialAvoider(), make_enforcer("endgame"),
                complete(n), path(3), b, seed=1,
            )
            assert t.verdict == "avoider_wins"
        report("avoider-side-condition", t0, 900, f"{games} games")


class TestDisconnectedRouting:
    def test_two_triangles_240(self):
        t0 = time.time()
        pat = disjoint_union(complete(3), complete(3))
        board = complete(240)
        games = 0
        for b in (1, 2):
            for seed in range(20):
                for mk in (RandomAvoider, AntiEndgameAvoider):
                    enf = DisconnectedEnforcer(PAPER_CONFIG)
                    t = play_match(mk(), enf, board, pat, b, seed=seed)
                    games += 1
                    assert t.verdict == "avoider_loses", (b, seed, mk)
                    assert enf.extra_moves <= 4, (b, seed, enf.extra_moves)
        assert games == 80
        report("disconnected-routing", t0, 600, f"{games} games")

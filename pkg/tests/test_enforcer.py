"""Endgame preference, the two one-cycle strategies, routing."""

import random
from fractions import Fraction

import pytest

from aegame.avoider import (
    AntiEndgameAvoider,
    GreedyMinThreatAvoider,
    PotentialAvoider,
    RandomAvoider,
)
from aegame.engine import GameState, Policy, play_match
from aegame.enforcer import (
    DisconnectedEnforcer,
    EndgameEnforcer,
    EvenUnicyclicEnforcer,
    OddUnicyclicEnforcer,
    PAPER_CONFIG,
    PreconditionError,
    endgame_applicable,
    endgame_threats,
    make_enforcer,
    relaxed_config,
    residue_threshold,
)
from aegame.patterns import complete, cycle, disjoint_union, parse_pattern, path
from aegame.solver import Solver
from aegame.threats import is_threat, threats


class TestEndgame:
    def test_worked_k4_example(self):
        # threats {13,14,23,24}, one non-threat {34}; 6-1 divisible by b+1=5
        s = GameState(complete(4), 4)
        s.apply_avoider([0])
        mv = endgame_threats(s, path(3), t_target=1)
        assert sorted(mv) == [1, 2, 3, 5]
        s.apply_enforcer(mv)
        last = next(iter(s.free_edge_ids()))
        assert is_threat(s, path(3), last)

    def test_precondition_error_without_threats(self):
        s = GameState(complete(4), 1)
        with pytest.raises(PreconditionError):
            endgame_threats(s, path(3))

    def test_residue_threshold(self):
        s = GameState(complete(4), 4)  # 6 edges
        s.apply_avoider([0])
        # enforcer to move owing 4: next avoider turn sees 1 free edge
        assert residue_threshold(s) == 1

    def test_applicable_via_divisibility(self):
        s = GameState(complete(4), 4)
        s.apply_avoider([0])
        ok, tau, need = endgame_applicable(s, path(3), t_target=1)
        assert ok and tau >= 1 and need == 1

    def test_wins_from_threat_rich_states(self):
        # random mid-states with threats >= b+1: endgame vs solver-best play
        rng = random.Random(11)
        wins = trials = 0
        solvers = {}
        for attempt in range(400):
            if trials >= 25:
                break
            n = rng.randint(4, 5)
            pat = path(3) if rng.random() < 0.6 else complete(3)
            b = rng.randint(1, 3 if pat.edge_count == 2 else 1)
            board = complete(n)
            state = GameState(board, b)
            dead = False
            for _ in range(2 * rng.randint(1, 3) - 1):
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
            key = (n, b, pat.edge_count)
            solver = solvers.setdefault(key, Solver(board, pat, b))
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
        assert trials >= 10
        assert wins == trials


class TestOddUnicyclic:
    def test_bound_precondition(self):
        state = GameState(complete(20), 2)
        pol = OddUnicyclicEnforcer()
        with pytest.raises(PreconditionError):
            pol.reset(state, complete(3), random.Random(0))  # 3 > 20/36

    def test_even_pattern_rejected(self):
        state = GameState(complete(200), 2)
        pol = OddUnicyclicEnforcer()
        with pytest.raises(PreconditionError):
            pol.reset(state, cycle(4), random.Random(0))

    def test_wins_at_published_bound(self):
        for n, b in ((72, 1), (108, 2)):
            for seed in range(3):
                enf = OddUnicyclicEnforcer()
                t = play_match(
                    RandomAvoider(), enf, complete(n), complete(3), b, seed=seed
                )
                assert t.verdict == "avoider_loses"
                assert enf.handover_ok in (None, True)

    def test_handover_condition_when_reached(self):
        # with a resilient avoider the cross pool can empty; the handover
        # assertion must then hold
        enf = OddUnicyclicEnforcer()
        t = play_match(
            GreedyMinThreatAvoider(), enf, complete(72), complete(3), 1, seed=5
        )
        assert t.verdict == "avoider_loses"
        assert enf.handover_ok in (None, True)

    def test_loop_pattern_counts_as_odd(self):
        cfg = relaxed_config(odd_bound_mult=Fraction(100))
        enf = OddUnicyclicEnforcer(cfg)
        t = play_match(
            RandomAvoider(), enf, complete(30), parse_pattern("loop+edge"), 2, seed=0
        )
        # no loops on a complete board: Avoider can never hold a copy
        assert t.verdict == "avoider_wins"


class TestEvenUnicyclic:
    def test_bound_precondition(self):
        state = GameState(complete(100), 2)
        pol = EvenUnicyclicEnforcer()
        with pytest.raises(PreconditionError):
            pol.reset(state, cycle(4), random.Random(0))

    def test_odd_pattern_rejected(self):
        state = GameState(complete(3300), 2)
        pol = EvenUnicyclicEnforcer()
        with pytest.raises(PreconditionError):
            pol.reset(state, complete(3), random.Random(0))

    def test_small_relaxed_game_wins(self):
        cfg = relaxed_config(even_bound_mult=Fraction(200))
        for seed in range(3):
            enf = EvenUnicyclicEnforcer(cfg)
            t = play_match(RandomAvoider(), enf, complete(40), cycle(4), 1, seed=seed)
            assert t.verdict == "avoider_loses"
            assert enf.degree_violations == 0

    def test_degree_audit_tracks(self):
        cfg = relaxed_config(even_bound_mult=Fraction(200))
        enf = EvenUnicyclicEnforcer(cfg)
        t = play_match(RandomAvoider(), enf, complete(30), cycle(4), 2, seed=1)
        assert enf.max_degree_seen <= 3 * 15 / (2 + 1) + 1e-9

    def test_anchor_grid_arithmetic(self):
        # offsets: alpha and gamma differ by k/2-1 with gamma in [k/2, 3k/2]
        k = 4
        off = k // 2 - 1
        for a in range(1, 3 * k // 2 + 1):
            gamma = a + off if a + off <= 3 * k // 2 else a - off
            assert k // 2 <= gamma <= 3 * k // 2
            assert abs(a - gamma) == off


class TestAlignedAnchorFact:
    def test_two_gadget_copies_plus_aligned_edges_contain_copy(self):
        # structural fact behind stage three: disjoint gadget copies joined
        # by two edges with both anchor offsets k/2-1 contain the pattern
        from aegame.multigraph import anchor_path_tree, LabeledMultigraph
        from aegame.patterns import with_pendant
        from aegame.threats import contains_copy

        for pat in (cycle(4), with_pendant(cycle(4), at=0)):
            apt = anchor_path_tree(pat)
            k = 4
            block = apt.tree.vertex_count
            edges = []
            for off in (0, block):
                for e in apt.tree.edges:
                    edges.append((e.u + off, e.v + off))
            # join anchors alpha=1,beta=1 and gamma=2,delta=2 (offset 1 each)
            a1, g1 = apt.anchors[0], apt.anchors[1]
            edges.append((a1, block + a1))
            edges.append((g1, block + g1))
            host = LabeledMultigraph(2 * block, edges)
            assert contains_copy(host, pat) is not None


class TestDisconnected:
    def test_two_triangles_routing(self):
        pat = disjoint_union(complete(3), complete(3))
        for b in (1, 2):
            for seed in range(2):
                enf = DisconnectedEnforcer()
                t = play_match(RandomAvoider(), enf, complete(240), pat, b, seed=seed)
                assert t.verdict == "avoider_loses", (b, seed)
                assert enf.extra_moves <= enf.extra_budget
                assert not enf.budget_exceeded

    def test_triangle_plus_edge(self):
        pat = disjoint_union(complete(3), path(2))
        enf = DisconnectedEnforcer()
        t = play_match(RandomAvoider(), enf, complete(160), pat, 1, seed=3)
        assert t.verdict == "avoider_loses"

    def test_routing_answers_in_same_block(self):
        pat = disjoint_union(complete(3), complete(3))
        board = complete(240)
        state = GameState(board, 2)
        enf = DisconnectedEnforcer()
        enf.reset(state, pat, random.Random(0))
        # avoider plays across blocks: the reply stays in the cross block
        cross_edge = [
            e.eid for e in board.edges if e.u < 120 and e.v >= 120
        ][0]
        state.apply_avoider([cross_edge])
        enf.observe(state, "A", [cross_edge])
        mv = enf.choose(state)
        for eid in mv:
            e = board.edge_by_id[eid]
            assert (e.u < 120) != (e.v < 120)


class TestRegistry:
    def test_make_all(self):
        for name in ("endgame", "odd-unicyclic", "even-unicyclic",
                     "blowup", "master", "disconnected"):
            assert make_enforcer(name) is not None
        with pytest.raises(ValueError):
            make_enforcer("nope")

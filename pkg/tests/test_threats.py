"""Copy detection, threat oracles, cycle-threat pairs."""

import itertools
import random

import pytest

from aegame.engine import GameState
from aegame.multigraph import GraphStructureError, LabeledMultigraph, PatternSizeError, blow_up
from aegame.patterns import (
    complete,
    cycle,
    disjoint_union,
    doubled_edge,
    loop_plus_edge,
    looped_vertex,
    parse_pattern,
    path,
)
from aegame.threats import (
    all_copies,
    canonical_threats,
    contains_copy,
    cycle_threats,
    is_threat,
    new_threats_after,
    threats,
)


def brute_force_threats(state, pattern):
    """Definition-level oracle: free e is a threat iff G_A + e has a copy
    not contained in G_A (checked by full, unanchored search)."""
    out = set()
    base = state.avoider_graph()
    base_copies = {emb.host_edges() for emb in all_copies(base, pattern)}
    for eid in state.free_edge_ids():
        e = state.graph.edge_by_id[eid]
        fp = []
        f = state.graph.friend_of(eid)
        if f is not None and state.owner(f) == 1:
            fp = [(eid, f)]
        aug = LabeledMultigraph(
            state.graph.vertex_count,
            [(x.u, x.v, x.eid) for x in base.edges] + [(e.u, e.v, eid)],
            [(a, b) for a, b in base.friend_pairs.items() if a < b] + fp,
        )
        for emb in all_copies(aug, pattern):
            if emb.host_edges() not in base_copies:
                out.add(eid)
                break
    return out


class TestContainsCopy:
    def test_p3_in_c4(self):
        emb = contains_copy(cycle(4), path(3))
        assert emb is not None
        emb.validate(path(3), cycle(4))

    def test_no_p3_in_matching(self):
        g = LabeledMultigraph(6, [(0, 1), (2, 3), (4, 5)])
        assert contains_copy(g, path(3)) is None

    def test_c2_needs_both_parallels(self):
        g = doubled_edge()
        emb = contains_copy(g, doubled_edge())
        assert emb is not None
        assert len(emb.host_edges()) == 2
        single = path(2)
        assert contains_copy(single, doubled_edge()) is None

    def test_loop_pattern(self):
        assert contains_copy(looped_vertex(), looped_vertex()) is not None
        assert contains_copy(path(2), looped_vertex()) is None
        assert contains_copy(loop_plus_edge(), loop_plus_edge()) is not None

    def test_disconnected_pattern(self):
        g = disjoint_union(complete(3), complete(3))
        assert contains_copy(g, g) is not None
        one = complete(3)
        assert contains_copy(one, g) is None
        # two triangles sharing a vertex do not contain 2K3
        shared = LabeledMultigraph(5, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])
        assert contains_copy(shared, g) is None

    def test_oversized_pattern(self):
        with pytest.raises(PatternSizeError):
            contains_copy(complete(13), complete(13))

    def test_matches_networkx_style_bruteforce(self):
        rng = random.Random(42)
        pats = [path(3), path(4), complete(3), cycle(4), parse_pattern("S4")]
        for _ in range(40):
            n = rng.randint(3, 7)
            edges = [
                (i, j)
                for i in range(n)
                for j in range(i + 1, n)
                if rng.random() < 0.4
            ]
            if not edges:
                continue
            g = LabeledMultigraph(n, edges)
            for pat in pats:
                got = contains_copy(g, pat) is not None
                want = _brute_copy_exists(g, pat)
                assert got == want, (n, edges, pat)


def _brute_copy_exists(g, pat):
    """Oracle: try all injective vertex maps."""
    gv = range(g.vertex_count)
    pairs = {e.pair() for e in g.edges}
    if pat.vertex_count > g.vertex_count:
        return False
    for perm in itertools.permutations(gv, pat.vertex_count):
        ok = True
        for e in pat.edges:
            a, b = perm[e.u], perm[e.v]
            key = (a, b) if a <= b else (b, a)
            if key not in pairs:
                ok = False
                break
        if ok:
            return True
    return False


class TestThreats:
    def test_k4_single_edge_p3(self):
        state = GameState(complete(4), 1)
        # K4 edge ids in order: (0,1)=0 (0,2)=1 (0,3)=2 (1,2)=3 (1,3)=4 (2,3)=5
        state.apply_avoider([0])
        ts = threats(state, path(3))
        assert ts.edges == frozenset({1, 2, 3, 4})

    def test_k5_triangle_threat(self):
        state = GameState(complete(5), 1)
        # edges (0,1)=0,(0,2)=1 -> only (1,2) completes a triangle
        state.apply_avoider([0])
        state.apply_enforcer([9])
        state.apply_avoider([1])
        ts = threats(state, complete(3))
        e12 = [
            e.eid for e in complete(5).edges if e.pair() == (1, 2)
        ][0]
        assert ts.edges == frozenset({e12})

    def test_empty_avoider_graph_no_threats(self):
        state = GameState(complete(5), 2)
        assert len(threats(state, path(3))) == 0

    def test_witnesses_use_their_edge(self):
        state = GameState(complete(4), 1)
        state.apply_avoider([0])
        ts = threats(state, path(3))
        for eid, emb in ts.witnesses.items():
            assert eid in emb.host_edges()
            for heid in emb.host_edges():
                assert heid == eid or state.owner(heid) == 1

    def test_oracle_equivalence_random_states(self):
        rng = random.Random(99)
        pats = [path(3), complete(3), cycle(4), path(4)]
        boards = [complete(5), complete(6), cycle(6), blow_up(path(3), (2, 2, 2)).graph]
        for trial in range(200):
            board = boards[trial % len(boards)]
            pat = pats[trial % len(pats)]
            state = GameState(board, rng.randint(1, 3))
            # play a random legal prefix without letting Avoider lose
            for _ in range(rng.randint(0, 4)):
                if state.is_over:
                    break
                free = list(state.free_edge_ids())
                if state.to_move == "A":
                    state.apply_avoider([rng.choice(free)])
                else:
                    k = state.owed_now()
                    state.apply_enforcer(rng.sample(free, k))
            if state.verdict(pat)[0] != "ongoing":
                continue
            got = threats(state, pat).edges
            want = brute_force_threats(state, pat)
            assert got == want

    def test_threat_persistence_under_play(self):
        rng = random.Random(5)
        for _ in range(125):
            state = GameState(complete(6), 2)
            state.apply_avoider([rng.randrange(15)])
            pat = complete(3)
            prior = threats(state, pat).edges
            # play on without touching prior threats and without a copy
            for _ in range(4):
                if state.is_over or state.verdict(pat)[0] != "ongoing":
                    break
                free = [e for e in state.free_edge_ids() if e not in prior]
                if state.to_move == "A":
                    safe = [e for e in free if not is_threat(state, pat, e)]
                    if not safe:
                        break
                    state.apply_avoider([rng.choice(safe)])
                else:
                    k = state.owed_now()
                    if len(free) < k:
                        break
                    state.apply_enforcer(rng.sample(free, k))
                now = threats(state, pat).edges
                assert prior <= now
                prior = now


class TestIncrementalThreats:
    def test_matches_full_recompute(self):
        rng = random.Random(31)
        pats = [path(3), complete(3), cycle(4)]
        for trial in range(40):
            pat = pats[trial % len(pats)]
            state = GameState(complete(6), 2)
            known = set()
            ok = True
            while ok and not state.is_over:
                free = list(state.free_edge_ids())
                if state.to_move == "A":
                    safe = [e for e in free if e not in known and not is_threat(state, pat, e)]
                    if not safe:
                        break
                    eid = rng.choice(safe)
                    state.apply_avoider([eid])
                    fresh = new_threats_after(state, pat, eid)
                    known |= set(fresh)
                    known &= {e for e in state.free_edge_ids()}
                    assert known == threats(state, pat).edges
                else:
                    k = state.owed_now()
                    state.apply_enforcer(rng.sample(free, k))
                    known &= {e for e in state.free_edge_ids()}


class TestCanonicalThreats:
    def test_path_blowup_single(self):
        board = blow_up(path(3), (1, 1, 1))
        state = GameState(board, 1)
        e01 = [e.eid for e in board.graph.edges if board.part_of[e.u] != board.part_of[e.v]][0]
        state.apply_avoider([e01])
        ts = canonical_threats(state, path(3))
        assert len(ts) == 1

    def test_friend_completion(self):
        board = blow_up(doubled_edge(), (2, 2))
        state = GameState(board, 1)
        state.apply_avoider([0])
        ts = canonical_threats(state, doubled_edge())
        assert ts.edges == frozenset({board.graph.friend_of(0)})

    def test_non_canonical_copy_filtered(self):
        # pattern P3 blow-up; a copy with middle vertex in a wrong part
        board = blow_up(path(3), (2, 1, 2))
        state = GameState(board, 1)
        g = board.graph
        # find edges (a0-b) and threats across; claim a path 0-1 then 1-2 uses
        # parts correctly, so instead claim two part-0/part-1 edges sharing
        # the part-1 vertex: a copy of P3 exists but is not canonical
        b_vertex = board.parts[1][0]
        inc = [eid for (n, eid) in g.adjacency[b_vertex] if board.part_of[n] == 0]
        state.apply_avoider([inc[0]])
        state.apply_enforcer([inc[1]])
        assert len(canonical_threats(state, path(3))) > 0  # across to part 2
        # claims on the part-2 side complete canonically only via b_vertex
        for eid in canonical_threats(state, path(3)).edges:
            e = g.edge_by_id[eid]
            assert b_vertex in (e.u, e.v)

    def test_requires_blowup(self):
        state = GameState(complete(4), 1)
        with pytest.raises(ValueError):
            canonical_threats(state, path(3))


class TestCycleThreats:
    def test_path_triangle(self):
        g = path(3)  # a-b-c
        out = cycle_threats(g, complete(3))
        assert set(out) == {(0, 2)}

    def test_k4_triangle_all_pairs(self):
        out = cycle_threats(complete(4), complete(3))
        assert len(out) == 6

    def test_c5_triangle_distance2(self):
        out = cycle_threats(cycle(5), complete(3))
        assert len(out) == 5
        for x, y in out:
            assert (x, y) not in {e.pair() for e in cycle(5).edges}

    def test_count_bound_random(self):
        rng = random.Random(12)
        pats = {
            "K3": complete(3),
            "C4": cycle(4),
            "C4+pendant": parse_pattern("C4+pendant"),
            "C5": cycle(5),
        }
        for name, pat in pats.items():
            h = pat.vertex_count
            for _ in range(25):
                n = rng.randint(3, 9)
                edges = [
                    (i, j)
                    for i in range(n)
                    for j in range(i + 1, n)
                    if rng.random() < rng.choice([0.2, 0.5, 0.8])
                ]
                g = LabeledMultigraph(n, edges)
                cnt = len(cycle_threats(g, pat))
                assert cnt >= len(edges) - (h - 2) * n

    def test_rejects_non_unicyclic(self):
        with pytest.raises(GraphStructureError):
            cycle_threats(complete(4), path(3))
        with pytest.raises(GraphStructureError):
            cycle_threats(complete(4), complete(4))

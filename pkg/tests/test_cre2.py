import itertools
import random

import pytest

from hamcycle.config import ConstantsConfig
from hamcycle.cre2 import (STEP1, STEP4, STEP5, STEP6, SmallCore, absorb_components,
                           compute_small, core_cycle, exhaustive_exchange, figure1_exchange,
                           is_maximum_two_matching, patch_missing, rotation_exchange, run_cre2,
                           two_matching)
from hamcycle.graph import (AdjacencyGraph, OrientedCycle, StageFailed, verify_cycle_in,
                            verify_hamilton_cycle)
from hamcycle.oracle import GnpOracle

from _graphs import random_graph, star

DESK = ConstantsConfig.desk()


def test_compute_small_examples():
    assert compute_small(AdjacencyGraph.complete(10), 5) == frozenset()
    assert compute_small(star(9), 5) == frozenset(range(1, 10))
    with pytest.raises(StageFailed) as err:
        compute_small(star(9), 5, ConstantsConfig().small_size_limit(10))
    assert err.value.site == STEP1


def test_default_threshold_swallows_moderate_graphs():
    g = GnpOracle(1000, 0.9, 1).materialize()
    cfg = ConstantsConfig()
    assert cfg.small_degree_threshold(1000) > max(g.degrees)
    with pytest.raises(StageFailed):
        compute_small(g, cfg.small_degree_threshold(1000), cfg.small_size_limit(1000))


def test_two_matching_capacity_two():
    g = AdjacencyGraph(8, [(0, 5), (0, 6), (0, 7)])
    m, u = two_matching(g, {0})
    assert len(m) == 2 and len(u) == 2
    assert all(0 in e for e in m)


def test_two_matching_shared_neighbour_pads():
    g = AdjacencyGraph(8, [(0, 5), (1, 5)])
    m, u = two_matching(g, {0, 1})
    assert len(m) == 1
    assert u == (2, 3, 5)


def test_two_matching_empty_small():
    m, u = two_matching(AdjacencyGraph.complete(5), set())
    assert m == frozenset() and u == (0,)


def test_two_matching_graph_too_small():
    with pytest.raises(StageFailed, match="too small"):
        two_matching(AdjacencyGraph(4, [(0, 3)]), {0, 1, 2})


def test_two_matching_needs_augmenting_paths():
    # greedy in id order would give 0 both of {4, 5}; the maximum re-routes one to 1
    g = AdjacencyGraph(7, [(0, 4), (0, 5), (0, 6), (1, 4)])
    m, _ = two_matching(g, {0, 1})
    assert len(m) == 3
    assert is_maximum_two_matching(g, {0, 1}, m)
    assert not is_maximum_two_matching(g, {0, 1}, frozenset({(0, 4), (0, 5)}))


def test_core_cycle_routes_small_vertex_through_fake_edges():
    g = AdjacencyGraph(8, [(0, 5), (0, 6)])
    c, missing = core_cycle(g, {0}, (5, 6, 7))
    assert c.canonical() == (0, 5, 7, 6)
    assert sorted(missing) == [(5, 7), (6, 7)]


def test_core_cycle_real_edges_are_not_missing():
    g = AdjacencyGraph(8, [(0, 5), (0, 6), (5, 7)])
    _, missing = core_cycle(g, {0}, (5, 6, 7))
    assert missing == [(6, 7)]


def test_core_cycle_isolated_small_vertex():
    assert core_cycle(AdjacencyGraph(8, [(5, 6)]), {0}, (5, 6)) is None


def _core(g, small, u, cycle):
    c = OrientedCycle(cycle)
    missing = [e for e in c.edges() if not g.has_edge(*e)]
    return SmallCore(frozenset(small), frozenset(), tuple(u), c, sorted(missing))


def test_patch_missing_nothing_to_do():
    g = AdjacencyGraph.complete(4)
    core = _core(g, {0}, (1, 2, 3), [0, 1, 2, 3])
    assert patch_missing(g, core) == core.cycle


def test_patch_missing_short_detour():
    g = AdjacencyGraph(10, [(0, 5), (0, 6), (6, 7), (5, 9), (9, 7)])
    core = _core(g, {0}, (5, 6, 7), [0, 5, 7, 6])
    s0 = patch_missing(g, core)
    assert s0.canonical() == (0, 5, 9, 7, 6)
    assert verify_cycle_in(g, s0)


def test_patch_missing_blocked():
    # 5 and 7 only see core vertices within two steps
    g = AdjacencyGraph(10, [(0, 5), (0, 6), (6, 7), (5, 6), (7, 0), (8, 9)])
    core = _core(g, {0}, (5, 6, 7), [0, 5, 7, 6])
    with pytest.raises(StageFailed) as err:
        patch_missing(g, core)
    assert err.value.site == STEP4


def test_patch_missing_respects_depth():
    chain = [(5, 8), (8, 9), (9, 10), (10, 11), (11, 7)]
    g = AdjacencyGraph(12, [(0, 5), (0, 6), (6, 7)] + chain)
    core = _core(g, {0}, (5, 6, 7), [0, 5, 7, 6])
    with pytest.raises(StageFailed):
        patch_missing(g, core, ConstantsConfig(patch_depth=4))
    assert len(patch_missing(g, core, ConstantsConfig(patch_depth=5))) == 8


def test_absorb_single_component():
    g = AdjacencyGraph(7, [(i, (i + 1) % 6) for i in range(6)] + [(6, 0), (6, 2), (1, 3)])
    out = absorb_components(g, OrientedCycle(range(6)))
    assert out.edges() == {(0, 6), (2, 6), (1, 2), (1, 3), (3, 4), (4, 5), (0, 5)}
    assert verify_hamilton_cycle(g, out)


def test_absorb_independent_successors_fails():
    g = AdjacencyGraph(7, [(i, (i + 1) % 6) for i in range(6)] + [(6, 0), (6, 2)])
    with pytest.raises(StageFailed) as err:
        absorb_components(g, OrientedCycle(range(6)))
    assert err.value.site == STEP5


def test_absorb_nothing_outside():
    c = OrientedCycle(range(5))
    assert absorb_components(AdjacencyGraph.complete(5), c) is c


def test_absorb_hands_off_small_components():
    g = AdjacencyGraph(7, [(i, (i + 1) % 6) for i in range(6)] + [(6, 0), (6, 2)])
    cfg = ConstantsConfig(step5_cycle_fraction=0.5, step5_component_coefficient=1)
    assert absorb_components(g, OrientedCycle(range(6)), cfg) == OrientedCycle(range(6))


def test_rotation_exchange_adjacent_pair():
    g = AdjacencyGraph(5, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1)])
    assert rotation_exchange(g, OrientedCycle(range(4)), 4) == OrientedCycle([0, 4, 1, 2, 3])


def test_rotation_exchange_complete_graph():
    out = rotation_exchange(AdjacencyGraph.complete(6), OrientedCycle(range(5)), 5)
    assert out == OrientedCycle([0, 5, 1, 2, 3, 4])


PATTERN_EDGES = [(0, 1), (0, 9), (0, 10), (0, 11), (1, 2), (1, 5), (2, 3), (2, 4), (2, 10),
                 (3, 4), (3, 11), (4, 5), (4, 6), (4, 10), (5, 6), (5, 8), (6, 7), (6, 11),
                 (7, 8), (8, 9), (8, 11), (9, 10)]


def test_pattern_exchange_twelve_vertices():
    g = AdjacencyGraph(12, PATTERN_EDGES)
    s = OrientedCycle(range(11))
    nbrs = g.sorted_neighbors(11)
    assert not any(s.successor(u) in nbrs for u in nbrs)
    trace = []
    out = figure1_exchange(g, s, 11, trace)
    assert out is not None and verify_hamilton_cycle(g, out)
    assert trace[-1].chosen is not None
    assert rotation_exchange(g, s, 11, ConstantsConfig(exhaustive_fallback_max_n=1)) == out
    other = exhaustive_exchange(g, s, 11)
    assert other is not None and verify_hamilton_cycle(g, other)


def test_rotation_exchange_failure():
    # v sees two antipodal vertices of a chordless 6-cycle: no exchange exists
    g = AdjacencyGraph(7, [(i, (i + 1) % 6) for i in range(6)] + [(6, 0), (6, 3)])
    with pytest.raises(StageFailed) as err:
        rotation_exchange(g, OrientedCycle(range(6)), 6)
    assert err.value.site == STEP6


def test_rotation_exchange_preconditions():
    with pytest.raises(ValueError):
        rotation_exchange(AdjacencyGraph.complete(4), OrientedCycle(range(4)), 2)
    with pytest.raises(StageFailed):
        rotation_exchange(AdjacencyGraph(5, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 0)]),
                          OrientedCycle(range(4)), 4)


def test_exhaustive_exchange_matches_brute_force():
    # brute force over vertex orders: an exchange with |E1| <= 4 exists iff some
    # Hamilton cycle of S+v shares at least |S|-4 edges with S
    rng = random.Random(6)
    for _ in range(60):
        n = rng.randint(5, 8)
        order = list(range(n - 1))
        rng.shuffle(order)
        s = OrientedCycle(order)
        edges = s.edges() | {e for e in itertools.combinations(range(n), 2) if rng.random() < 0.3}
        g = AdjacencyGraph(n, edges)
        best = _closest_cycle(g, s)
        found = exhaustive_exchange(g, s, n - 1)
        if found is not None:
            assert verify_hamilton_cycle(g, found)
            assert len(s.edges() - found.edges()) <= 4
        assert (found is not None) == (best is not None and best <= 4)


def _closest_cycle(g, s):
    n = g.n
    best = None
    for perm in itertools.permutations(range(1, n)):
        seq = (0,) + perm
        if all(g.has_edge(seq[i - 1], seq[i]) for i in range(n)):
            c = OrientedCycle(seq)
            lost = len(s.edges() - c.edges())
            best = lost if best is None else min(best, lost)
    return best


def test_run_cre2_complete_graph():
    out = run_cre2(AdjacencyGraph.complete(9), DESK)
    assert out.is_hamiltonian


def test_run_cre2_isolated_vertex():
    g = AdjacencyGraph.complete(8)
    g = AdjacencyGraph(9, list(g.edges()))
    assert run_cre2(g, DESK).tag.value == "NotHamiltonian"


def test_run_cre2_records_step_timings():
    timings = {}
    run_cre2(AdjacencyGraph.complete(12), DESK, timings)
    assert set(timings) == {f"cre2.step{i}" for i in range(1, 7)}


def test_run_cre2_default_constants_fail_honestly():
    out = run_cre2(GnpOracle(60, 0.5, 2).materialize())
    assert out.failed and out.failure_site == STEP1


def test_two_matching_maximal_on_random_graphs():
    rng = random.Random(21)
    for _ in range(200):
        n = rng.randint(6, 20)
        g = random_graph(rng, n, rng.choice((0.1, 0.3, 0.6)))
        small = set(rng.sample(range(n), rng.randint(0, n // 3)))
        m, u = two_matching(g, small)
        assert is_maximum_two_matching(g, small, m)
        assert len(u) >= len(small) + 1 and not set(u) & small


def test_patch_interiors_disjoint_and_outside_core():
    rng = random.Random(3)
    checked = 0
    for _ in range(400):
        n = rng.randint(12, 24)
        g = random_graph(rng, n, rng.choice((0.3, 0.5)))
        threshold = DESK.small_degree_threshold(n) * 1.5
        small = compute_small(g, threshold)
        try:
            m, u = two_matching(g, small)
        except StageFailed:
            continue
        if len(small) + len(u) < 3:
            continue
        found = core_cycle(g, small, u)
        if found is None or not found[1]:
            continue
        core = SmallCore(small, m, u, *found)
        try:
            s0 = patch_missing(g, core)
        except StageFailed:
            continue
        fresh = [v for v in s0.vertices if v not in core.cycle.position]
        assert len(set(fresh)) == len(fresh)
        assert not set(fresh) & (set(small) | set(u))
        assert verify_cycle_in(g, s0)
        assert len(s0) == len(core.cycle) + len(fresh)
        checked += 1
    assert checked >= 20


def test_absorb_grows_cycle_on_random_graphs():
    rng = random.Random(4)
    grown = 0
    for _ in range(200):
        n = rng.randint(10, 30)
        g = random_graph(rng, n, 0.4)
        k = rng.randint(3, n // 2)
        core = sorted(rng.sample(range(n), k))
        sub, labels = g.induced(core)
        from hamcycle.exact import held_karp
        c = held_karp(sub)
        if c is None:
            continue
        s0 = OrientedCycle(labels[i] for i in c)
        try:
            out = absorb_components(g, s0, DESK)
        except StageFailed:
            continue
        assert verify_cycle_in(g, out)
        assert set(s0.vertices) <= set(out.vertices)
        grown += len(out) > len(s0)
    assert grown >= 20

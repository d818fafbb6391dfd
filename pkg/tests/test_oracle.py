import math
import random

import pytest

from hamcycle.graph import AdjacencyGraph
from hamcycle.oracle import (MATERIALIZE, FixedGraphOracle, GnpOracle, _unrank, pair_index,
                             splitmix64_at, wrap_fixed_graph)


def test_splitmix64_reference_stream():
    # first outputs of the reference generator seeded with 0 and with 1234567
    assert splitmix64_at(0, 1) == 0xE220A8397B1DCDAF
    assert splitmix64_at(0, 2) == 0x6E789E6AA1B965F4
    assert splitmix64_at(1234567, 1) == 0x599ED017FB08FC85


def test_pair_index_round_trip():
    n = 37
    ks = [pair_index(n, u, v) for u in range(n) for v in range(u + 1, n)]
    assert ks == list(range(n * (n - 1) // 2))
    for k in (0, 1, 35, 36, 400, len(ks) - 1):
        u, v = _unrank(n, k)
        assert pair_index(n, u, v) == k


def test_certain_and_impossible_edges():
    assert GnpOracle(10, 1.0, 3).query(2, 7)
    assert not GnpOracle(10, 0.0, 3).query(2, 7)


def test_memoized_queries_are_free():
    o = GnpOracle(50, 0.5, 11)
    first = o.query(3, 9, "a")
    assert o.query(9, 3, "b") == first
    assert o.ledger.fresh == 1
    assert o.ledger.to_dict() == {"a": {"fresh": 1, "positive": int(first)}}


def test_query_errors():
    o = GnpOracle(5, 0.5, 0)
    with pytest.raises(ValueError):
        o.query(2, 2)
    with pytest.raises(ValueError):
        o.query(0, 5)
    with pytest.raises(ValueError):
        GnpOracle(5, 1.5, 0)


def test_materialize_examples():
    o = GnpOracle(3, 1.0, 0)
    assert o.materialize() == AdjacencyGraph.complete(3)
    assert o.ledger.fresh == 3
    assert GnpOracle(3, 0.0, 0).materialize() == AdjacencyGraph.empty(3)
    o = GnpOracle(4, 1.0, 0)
    o.query(0, 1)
    o.materialize()
    assert o.ledger.stage(MATERIALIZE) == (5, 5)
    o.materialize()
    assert o.ledger.fresh == 6


def test_materialize_agrees_with_scalar_coins():
    o = GnpOracle(60, 0.37, 99)
    g = o.materialize()
    scalar = GnpOracle(60, 0.37, 99)
    for u in range(60):
        for v in range(u + 1, 60):
            assert scalar.query(u, v) == g.has_edge(u, v)


def test_revealed_graph_is_order_independent():
    pairs = [(u, v) for u in range(40) for v in range(u + 1, 40)]
    a, b = GnpOracle(40, 0.5, 5), GnpOracle(40, 0.5, 5)
    for u, v in pairs:
        a.query(u, v)
    shuffled = pairs[:]
    random.Random(1).shuffle(shuffled)
    for u, v in shuffled:
        b.query(v, u)
    assert a.revealed_graph() == b.revealed_graph()
    assert a.ledger.positive == b.ledger.positive


def test_positive_rate_within_four_sigma():
    n, p = 400, 0.3
    o = GnpOracle(n, p, 2024)
    g = o.materialize()
    trials = n * (n - 1) // 2
    sigma = math.sqrt(trials * p * (1 - p))
    assert abs(g.m - trials * p) < 4 * sigma
    assert o.ledger.positive == g.m


def test_fixed_graph_oracle():
    k3 = AdjacencyGraph.complete(3)
    assert wrap_fixed_graph(k3).query(0, 1)
    assert not wrap_fixed_graph(AdjacencyGraph.empty(3)).query(0, 1)
    o = FixedGraphOracle(k3)
    assert o.p == 1.0
    o.query(0, 1)
    assert o.materialize() == k3
    assert o.ledger.fresh == 3
    assert o.query(1, 2)

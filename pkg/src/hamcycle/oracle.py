"""Lazy edge oracles that reveal a graph one vertex pair at a time.

Every pair ``u < v`` has a fixed index ``k`` in the row-major enumeration of
the upper triangle. For a random oracle the pair's coin is the ``k+1``-th
output of a SplitMix64 stream seeded with ``seed``, mapped to a double in
``[0, 1)`` and compared against ``p``. The revealed graph therefore depends
only on ``(n, p, seed)``, never on the order in which pairs are queried.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import AdjacencyGraph

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TO_UNIT = 2.0 ** -53

MATERIALIZE = "materialize"


def splitmix64_at(seed: int, k: int) -> int:
    """The ``k``-th output (1-based) of a SplitMix64 generator seeded with ``seed``."""
    z = (seed + k * GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _splitmix64_vec(seed: int, ks: np.ndarray) -> np.ndarray:
    z = np.uint64(seed & MASK64) + ks.astype(np.uint64) * np.uint64(GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def pair_index(n: int, u: int, v: int) -> int:
    if u > v:
        u, v = v, u
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


@dataclass
class QueryLedger:
    """Counts of fresh (first-time) queries and of positive answers, per stage."""

    fresh: int = 0
    positive: int = 0
    by_stage: dict[str, list[int]] = field(default_factory=dict)

    def charge(self, stage: str, fresh: int, positive: int) -> None:
        self.fresh += fresh
        self.positive += positive
        slot = self.by_stage.setdefault(stage, [0, 0])
        slot[0] += fresh
        slot[1] += positive

    def stage(self, label: str) -> tuple[int, int]:
        f, pos = self.by_stage.get(label, (0, 0))
        return f, pos

    def to_dict(self) -> dict[str, dict[str, int]]:
        return {k: {"fresh": f, "positive": pos} for k, (f, pos) in sorted(self.by_stage.items())}


class EdgeOracle:
    """Base oracle: memoization and accounting around a pair-coin function.

    Subclasses provide :meth:`_coin` and optionally a faster
    :meth:`_all_coins` for materialization.
    """

    def __init__(self, n: int, p: float):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"edge probability {p} outside [0, 1]")
        if n > (1 << 32):
            raise ValueError("vertex count too large for 64-bit pair indices")
        self.n = n
        self.p = p
        self.ledger = QueryLedger()
        self.memo: dict[int, bool] = {}
        self._graph: AdjacencyGraph | None = None

    def _coin(self, u: int, v: int) -> bool:
        raise NotImplementedError

    def _all_coins(self) -> AdjacencyGraph:
        n = self.n
        return AdjacencyGraph(
            n, ((u, v) for u in range(n) for v in range(u + 1, n) if self._coin(u, v)))

    def query(self, u: int, v: int, stage: str = "default") -> bool:
        if u == v:
            raise ValueError(f"query on a self-pair ({u}, {u})")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"pair ({u}, {v}) out of range for n={self.n}")
        if self._graph is not None:
            return v in self._graph.adjacency[u]
        if u > v:
            u, v = v, u
        k = u * (2 * self.n - u - 1) // 2 + (v - u - 1)
        hit = self.memo.get(k)
        if hit is None:
            hit = self._coin(u, v)
            self.memo[k] = hit
            self.ledger.charge(stage, 1, int(hit))
        return hit

    def is_revealed(self, u: int, v: int) -> bool:
        return self._graph is not None or pair_index(self.n, u, v) in self.memo

    @property
    def materialized(self) -> bool:
        return self._graph is not None

    def revealed_graph(self) -> AdjacencyGraph:
        """Graph of the positive pairs revealed so far (no queries charged)."""
        if self._graph is not None:
            return self._graph
        return AdjacencyGraph(self.n, (_unrank(self.n, k) for k, hit in self.memo.items() if hit))

    def materialize(self) -> AdjacencyGraph:
        """Reveal every pair, charging unrevealed ones to the ``materialize`` stage."""
        if self._graph is not None:
            return self._graph
        g = self._all_coins()
        total = self.n * (self.n - 1) // 2
        revealed_pos = sum(1 for hit in self.memo.values() if hit)
        fresh = total - len(self.memo)
        positive = g.m - revealed_pos
        self.ledger.charge(MATERIALIZE, fresh, positive)
        self._graph = g
        self.memo.clear()
        return g


def _unrank(n: int, k: int) -> tuple[int, int]:
    # Inverse of pair_index; rows are short near the end, so walk a bisection.
    lo, hi = 0, n - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid * (2 * n - mid - 1) // 2 <= k:
            lo = mid
        else:
            hi = mid - 1
    u = lo
    v = k - u * (2 * n - u - 1) // 2 + u + 1
    return u, v


class GnpOracle(EdgeOracle):
    """G(n, p) revealed lazily through a seeded, order-independent coin per pair."""

    def __init__(self, n: int, p: float, seed: int):
        super().__init__(n, p)
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.seed = seed & MASK64

    def _coin(self, u: int, v: int) -> bool:
        k = u * (2 * self.n - u - 1) // 2 + (v - u - 1)
        return (splitmix64_at(self.seed, k + 1) >> 11) * _TO_UNIT < self.p

    def _all_coins(self) -> AdjacencyGraph:
        n = self.n
        adjacency: list[list[int]] = [[] for _ in range(n)]
        with np.errstate(over="ignore"):
            for u in range(n - 1):
                base = u * (2 * n - u - 1) // 2
                vs = np.arange(u + 1, n, dtype=np.int64)
                ks = np.arange(base + 1, base + 1 + len(vs), dtype=np.uint64)
                coins = (_splitmix64_vec(self.seed, ks) >> np.uint64(11)).astype(np.float64) * _TO_UNIT
                hits = vs[coins < self.p]
                row = hits.tolist()
                adjacency[u].extend(row)
                for v in row:
                    adjacency[v].append(u)
        return AdjacencyGraph.from_adjacency(adjacency)


class FixedGraphOracle(EdgeOracle):
    """Oracle answering from a known graph, with the same query accounting."""

    def __init__(self, g: AdjacencyGraph, p: float | None = None):
        pairs = g.n * (g.n - 1) // 2
        if p is None:
            p = g.m / pairs if pairs else 0.0
        super().__init__(g.n, p)
        self.source = g

    def _coin(self, u: int, v: int) -> bool:
        return v in self.source.adjacency[u]

    def _all_coins(self) -> AdjacencyGraph:
        return self.source


def wrap_fixed_graph(g: AdjacencyGraph, p: float | None = None) -> FixedGraphOracle:
    return FixedGraphOracle(g, p)

"""Exact Hamiltonicity solvers.

``hpa3`` is the linear-space divide-and-conquer search for a Hamilton
s-t path: guess the middle vertex ``c`` and the half ``A`` of the vertices
that precede it, and solve both halves recursively. Nothing is memoized.

``held_karp`` is the classic O(2^n n^2)-time, O(2^n)-space bitmask DP and
serves as an independent test oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional

from .graph import AdjacencyGraph, OrientedCycle, OrientedPath, SolverOutcome

HELD_KARP_MAX_N = 24


class Subproblem(NamedTuple):
    mask: int
    s: int
    t: int


@dataclass
class HPA3Stats:
    """Instrumentation for the recursion: call count and stack footprint."""

    calls: int = 0
    depth: int = 0
    max_depth: int = 0
    live: int = 0
    max_live: int = 0


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def split_candidates(sub: Subproblem) -> Iterator[tuple[int, tuple[int, ...]]]:
    """All ``(c, A)`` pairs tried for a subproblem, in the fixed search order.

    ``c`` runs over the inner vertices in ascending order and ``A`` over the
    ``floor((k-3)/2)``-subsets of the remaining inner vertices in
    lexicographic (combinatorial-rank) order.
    """
    inner = _bits(sub.mask & ~(1 << sub.s) & ~(1 << sub.t))
    size = (sub.mask.bit_count() - 3) // 2
    for c in inner:
        others = [x for x in inner if x != c]
        for a in itertools.combinations(others, size):
            yield c, a


def _feasible(adj: tuple[int, ...], mask: int, s: int, t: int) -> bool:
    # Necessary conditions for a Hamilton s-t path on at least 3 vertices.
    inner = mask & ~(1 << s) & ~(1 << t)
    if not adj[s] & inner or not adj[t] & inner:
        return False
    m = inner
    while m:
        low = m & -m
        x = low.bit_length() - 1
        if (adj[x] & mask).bit_count() < 2:
            return False
        m ^= low
    seen = 1 << s
    frontier = seen
    while frontier:
        nxt = 0
        m = frontier
        while m:
            low = m & -m
            nxt |= adj[low.bit_length() - 1]
            m ^= low
        nxt &= mask & ~seen
        seen |= nxt
        frontier = nxt
    return seen == mask


def _hpa3(adj: tuple[int, ...], mask: int, s: int, t: int,
          prune: bool, stats: Optional[HPA3Stats]) -> Optional[list[int]]:
    k = mask.bit_count()
    if stats is not None:
        stats.calls += 1
        stats.depth += 1
        stats.live += k
        stats.max_depth = max(stats.max_depth, stats.depth)
        stats.max_live = max(stats.max_live, stats.live)
    try:
        if k == 2:
            return [s, t] if adj[s] >> t & 1 else None
        if prune and not _feasible(adj, mask, s, t):
            return None
        base_left = (1 << s)
        drop_s = mask & ~(1 << s)
        for c, a in split_candidates(Subproblem(mask, s, t)):
            amask = 0
            for x in a:
                amask |= 1 << x
            left = _hpa3(adj, amask | base_left | (1 << c), s, c, prune, stats)
            if left is None:
                continue
            right = _hpa3(adj, drop_s & ~amask, c, t, prune, stats)
            if right is not None:
                return left + right[1:]
        return None
    finally:
        if stats is not None:
            stats.depth -= 1
            stats.live -= k


def hpa3(g: AdjacencyGraph, subset: Optional[Iterable[int]], s: int, t: int, *,
         prune: bool = True, stats: Optional[HPA3Stats] = None,
         adjacency: Optional[tuple[int, ...]] = None) -> Optional[OrientedPath]:
    """Hamilton path from ``s`` to ``t`` through exactly ``subset``, or None.

    ``subset=None`` means all vertices. With ``prune`` the recursion skips
    subproblems that fail a cheap necessary condition (degrees, connectivity);
    the verdict is the same either way. ``adjacency`` overrides ``g.masks``.
    """
    if subset is None:
        mask = (1 << g.n) - 1
    else:
        mask = 0
        for v in subset:
            mask |= 1 << v
    if s == t or not (mask >> s & 1) or not (mask >> t & 1):
        raise ValueError("s and t must be distinct members of the subset")
    adj = g.masks if adjacency is None else adjacency
    found = _hpa3(adj, mask, s, t, prune, stats)
    return None if found is None else OrientedPath(found)


def hpa3_cycle(g: AdjacencyGraph, *, prune: bool = True,
               stats: Optional[HPA3Stats] = None) -> Optional[OrientedCycle]:
    n = g.n
    if n < 3:
        return None
    s = 0
    full = (1 << n) - 1
    base = g.masks
    for t in g.sorted_neighbors(s):
        # the s-t edge itself may not serve as the path
        adj = list(base)
        adj[s] &= ~(1 << t)
        adj[t] &= ~(1 << s)
        found = _hpa3(tuple(adj), full, s, t, prune, stats)
        if found is not None:
            return OrientedCycle(found)
    return None


def held_karp(g: AdjacencyGraph) -> Optional[OrientedCycle]:
    n = g.n
    if n > HELD_KARP_MAX_N:
        raise ValueError(f"Held-Karp is limited to n <= {HELD_KARP_MAX_N}")
    if n < 3:
        return None
    adj = g.masks
    # reach[m]: endpoints e (as a vertex bitmask) of paths that start at 0 and
    # visit exactly {0} plus the vertices of m, where bit i of m is vertex i+1.
    size = 1 << (n - 1)
    reach = [0] * size
    for m in range(1, size):
        r = 0
        rem = m
        while rem:
            low = rem & -rem
            w = low.bit_length()  # vertex id of this bit
            prev = m ^ low
            if prev:
                if reach[prev] & adj[w]:
                    r |= 1 << w
            elif adj[0] >> w & 1:
                r |= 1 << w
            rem ^= low
        reach[m] = r
    m = size - 1
    ends = reach[m] & adj[0]
    if not ends:
        return None
    e = (ends & -ends).bit_length() - 1
    path = [e]
    while m & (m - 1):
        m ^= 1 << (e - 1)
        cands = reach[m] & adj[e]
        e = (cands & -cands).bit_length() - 1
        path.append(e)
    path.append(0)
    path.reverse()
    return OrientedCycle(path)


def run_cre3(g: AdjacencyGraph) -> SolverOutcome:
    cycle = hpa3_cycle(g)
    if cycle is None:
        return SolverOutcome.not_hamiltonian()
    return SolverOutcome.hamiltonian(cycle)

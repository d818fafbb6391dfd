"""Undirected graphs, oriented paths and cycles, and cycle verification.

Edges are always handled as canonical ``(min, max)`` tuples.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

Edge = tuple[int, int]


def edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class InvalidSplice(ValueError):
    """The requested rewiring does not yield a single cycle."""


class StageFailed(Exception):
    """A solver stage gave up; ``site`` names the step, e.g. ``cre2.step4``."""

    def __init__(self, site: str, reason: str = ""):
        super().__init__(f"{site}: {reason}" if reason else site)
        self.site = site
        self.reason = reason


class AdjacencyGraph:
    """Simple undirected graph on vertices ``0..n-1``.

    Immutable once built. ``adjacency[v]`` is a frozenset; use
    :meth:`sorted_neighbors` for a deterministic iteration order.
    """

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        sets: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            sets[u].add(v)
            sets[v].add(u)
        self.n = n
        self.adjacency = tuple(frozenset(s) for s in sets)
        self.degrees = tuple(len(s) for s in sets)

    @classmethod
    def from_adjacency(cls, adjacency: Sequence[Iterable[int]]) -> "AdjacencyGraph":
        n = len(adjacency)
        return cls(n, ((u, v) for u in range(n) for v in adjacency[u] if u < v))

    @classmethod
    def complete(cls, n: int) -> "AdjacencyGraph":
        return cls(n, itertools.combinations(range(n), 2))

    @classmethod
    def empty(cls, n: int) -> "AdjacencyGraph":
        return cls(n)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def sorted_neighbors(self, v: int) -> list[int]:
        return sorted(self.adjacency[v])

    def edges(self) -> Iterator[Edge]:
        for u in range(self.n):
            for v in sorted(self.adjacency[u]):
                if u < v:
                    yield (u, v)

    @property
    def m(self) -> int:
        return sum(self.degrees) // 2

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Neighbourhoods as integer bitmasks, for the exponential solvers."""
        return tuple(sum(1 << w for w in nbrs) for nbrs in self.adjacency)

    def induced(self, vertices: Iterable[int]) -> tuple["AdjacencyGraph", list[int]]:
        """Induced subgraph relabelled to ``0..k-1`` plus the label map back."""
        labels = sorted(set(vertices))
        index = {v: i for i, v in enumerate(labels)}
        sub = AdjacencyGraph(
            len(labels),
            ((index[u], index[w]) for u in labels for w in self.adjacency[u]
             if w in index and u < w),
        )
        return sub, labels

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AdjacencyGraph):
            return NotImplemented
        return self.n == other.n and self.adjacency == other.adjacency

    def __hash__(self) -> int:
        return hash((self.n, self.adjacency))

    def __repr__(self) -> str:
        return f"AdjacencyGraph(n={self.n}, m={self.m})"


def neighbors_in(g: AdjacencyGraph, v: int, s: Iterable[int]) -> set[int]:
    """Neighbours of ``v`` that lie in ``s``."""
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} not in graph")
    return g.adjacency[v].intersection(s)


class OrientedPath:
    """A sequence of distinct vertices with O(1) position lookup."""

    __slots__ = ("vertices", "position")

    def __init__(self, vertices: Iterable[int]):
        self.vertices = tuple(vertices)
        self.position = {v: i for i, v in enumerate(self.vertices)}
        if len(self.position) != len(self.vertices):
            raise ValueError("path vertices must be distinct")

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices)

    def __contains__(self, v: object) -> bool:
        return v in self.position

    def __getitem__(self, i: int) -> int:
        return self.vertices[i]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, OrientedPath):
            return self.vertices == other.vertices
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return f"OrientedPath({list(self.vertices)})"

    @property
    def first(self) -> int:
        return self.vertices[0]

    @property
    def last(self) -> int:
        return self.vertices[-1]

    def successor(self, v: int) -> Optional[int]:
        i = self.position[v] + 1
        return self.vertices[i] if i < len(self.vertices) else None

    def predecessor(self, v: int) -> Optional[int]:
        i = self.position[v] - 1
        return self.vertices[i] if i >= 0 else None

    def sub(self, v: int, u: int) -> "OrientedPath":
        """Subpath from ``v`` to ``u``; ``v`` must not come after ``u``."""
        i, j = self.position[v], self.position[u]
        if i > j:
            raise ValueError(f"{v} comes after {u} on the path")
        return OrientedPath(self.vertices[i:j + 1])

    def edges(self) -> set[Edge]:
        vs = self.vertices
        return {edge(vs[i], vs[i + 1]) for i in range(len(vs) - 1)}

    def reversed(self) -> "OrientedPath":
        return OrientedPath(reversed(self.vertices))


class OrientedCycle:
    """A cyclically ordered sequence of at least three distinct vertices."""

    __slots__ = ("vertices", "position")

    def __init__(self, vertices: Iterable[int]):
        self.vertices = tuple(vertices)
        if len(self.vertices) < 3:
            raise ValueError("a cycle needs at least 3 vertices")
        self.position = {v: i for i, v in enumerate(self.vertices)}
        if len(self.position) != len(self.vertices):
            raise ValueError("cycle vertices must be distinct")

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices)

    def __contains__(self, v: object) -> bool:
        return v in self.position

    def __eq__(self, other: object) -> bool:
        if isinstance(other, OrientedCycle):
            return self.vertices == other.vertices
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return f"OrientedCycle({list(self.vertices)})"

    def successor(self, v: int) -> int:
        i = self.position[v] + 1
        return self.vertices[i if i < len(self.vertices) else 0]

    def predecessor(self, v: int) -> int:
        return self.vertices[self.position[v] - 1]

    def segment(self, v: int, u: int) -> OrientedPath:
        return segment(self, v, u)

    def edges(self) -> set[Edge]:
        vs = self.vertices
        return {edge(vs[i - 1], vs[i]) for i in range(len(vs))}

    def reversed(self) -> "OrientedCycle":
        return OrientedCycle(reversed(self.vertices))

    def rotated(self, start: int) -> "OrientedCycle":
        i = self.position[start]
        return OrientedCycle(self.vertices[i:] + self.vertices[:i])

    def canonical(self) -> tuple[int, ...]:
        """Orientation- and rotation-free representative of the cycle."""
        c = self.rotated(min(self.vertices))
        vs = c.vertices
        if vs[-1] < vs[1]:
            vs = (vs[0],) + tuple(reversed(vs[1:]))
        return vs


def segment(c: OrientedCycle, v: int, u: int) -> OrientedPath:
    """The path from ``v`` to ``u`` following the orientation of ``c``.

    ``segment(c, v, v)`` is the single-vertex path ``(v,)``.
    """
    if v not in c.position or u not in c.position:
        raise ValueError(f"segment endpoints {v}, {u} must lie on the cycle")
    i, j = c.position[v], c.position[u]
    vs = c.vertices
    if i <= j:
        return OrientedPath(vs[i:j + 1])
    return OrientedPath(vs[i:] + vs[:j + 1])


def splice(c: OrientedCycle, removed: Iterable[Sequence[int]],
           added: Iterable[Sequence[int]]) -> OrientedCycle:
    """Replace the edges ``removed`` of ``c`` by ``added``.

    The result must be a single cycle through every vertex of ``c`` plus
    any new vertex touched by ``added``; otherwise :class:`InvalidSplice`
    is raised. The result starts at ``c``'s first vertex and runs in the
    direction followed by most of the surviving cycle edges.
    """
    removed_set = {edge(*e) for e in removed}
    added_set = {edge(*e) for e in added}
    old_edges_of = _cycle_edge_lookup(c)
    for a, b in removed_set:
        if not old_edges_of(a, b):
            raise InvalidSplice(f"edge ({a}, {b}) is not on the cycle")
    for a, b in added_set:
        if a == b:
            raise InvalidSplice(f"self-loop ({a}, {a})")
        if old_edges_of(a, b):
            raise InvalidSplice(f"edge ({a}, {b}) is already on the cycle")

    # Only touched vertices get an explicit neighbour list; everything else
    # keeps its cycle neighbours.
    touched: dict[int, list[int]] = {}

    def nbrs(x: int) -> list[int]:
        if x not in touched:
            if x in c.position:
                touched[x] = [c.predecessor(x), c.successor(x)]
            else:
                touched[x] = []
        return touched[x]

    for a, b in removed_set:
        nbrs(a).remove(b)
        nbrs(b).remove(a)
    for a, b in added_set:
        nbrs(a).append(b)
        nbrs(b).append(a)
    for x, lst in touched.items():
        if len(lst) != 2:
            raise InvalidSplice(f"vertex {x} would have degree {len(lst)}")

    total = len(c) + sum(1 for x in touched if x not in c.position)
    start = c.vertices[0]
    order = [start]
    cur = start
    nxt = c.successor(start)
    if start in touched and nxt not in touched[start]:
        nxt = touched[start][0]
    while True:
        prev, cur = cur, nxt
        if cur == start:
            break
        order.append(cur)
        if len(order) > total:
            raise InvalidSplice("walk does not close")
        if cur in touched:
            a, b = touched[cur]
            nxt = b if a == prev else a
        else:
            s = c.successor(cur)
            nxt = c.predecessor(cur) if s == prev else s
    if len(order) != total:
        raise InvalidSplice(
            f"result splits into several cycles ({len(order)} of {total} vertices reached)")
    pos = c.position
    forward = backward = 0
    for i in range(len(order)):
        a, b = order[i - 1], order[i]
        if a in pos and b in pos:
            if c.successor(a) == b:
                forward += 1
            elif c.predecessor(a) == b:
                backward += 1
    if backward > forward:
        order = [order[0]] + order[:0:-1]
    return OrientedCycle(order)


def _cycle_edge_lookup(c: OrientedCycle):
    pos = c.position
    k = len(c)

    def on_cycle(a: int, b: int) -> bool:
        i, j = pos.get(a), pos.get(b)
        if i is None or j is None:
            return False
        d = (i - j) % k
        return d == 1 or d == k - 1

    return on_cycle


def rewire(c: OrientedCycle, removed: Iterable[Sequence[int]],
           added: Iterable[Sequence[int]]) -> OrientedCycle:
    """:func:`splice` after cancelling edges that are both removed and re-added."""
    r = {edge(*e) for e in removed}
    a = {edge(*e) for e in added}
    common = r & a
    return splice(c, r - common, a - common)


def verify_hamilton_cycle(g: AdjacencyGraph, c: Optional[OrientedCycle]) -> bool:
    if c is None or len(c) != g.n or g.n < 3:
        return False
    vs = c.vertices
    if set(vs) != set(range(g.n)):
        return False
    return all(vs[i] in g.adjacency[vs[i - 1]] for i in range(len(vs)))


def verify_cycle_in(g: AdjacencyGraph, c: OrientedCycle) -> bool:
    """True iff every edge of ``c`` (not necessarily spanning) is in ``g``."""
    vs = c.vertices
    return all(0 <= v < g.n for v in vs) and all(
        vs[i] in g.adjacency[vs[i - 1]] for i in range(len(vs)))


# -- property (P) ---------------------------------------------------------

PROPERTY_P_MAX_N = 22


def property_p_bound(n: int, p: float, a: int, b: int) -> float:
    """Lower bound that ``e(U, W)`` must strictly exceed for |U|=a, |W|=b."""
    return a * b * p * (1.0 - math.sqrt(n ** 1.5 / (10.0 * a * b)))


def check_property_P(g: AdjacencyGraph, p: float) -> bool:
    """Edge-distribution condition over all disjoint nonempty vertex sets.

    For a fixed ``U`` the bound only depends on ``|W|``, so the worst ``W``
    of each size is made of the vertices with fewest neighbours in ``U``.
    Runs over all ``2^n`` sets ``U``.
    """
    n = g.n
    if n > PROPERTY_P_MAX_N:
        raise ValueError(f"exhaustive check limited to n <= {PROPERTY_P_MAX_N}")
    masks = g.masks
    full = (1 << n) - 1
    for umask in range(1, full):
        a = umask.bit_count()
        counts = sorted((masks[w] & umask).bit_count()
                        for w in range(n) if not umask >> w & 1)
        running = 0
        for k, d in enumerate(counts, start=1):
            running += d
            if not running > property_p_bound(n, p, a, k):
                return False
    return True


def check_property_P_direct(g: AdjacencyGraph, p: float) -> bool:
    """Literal evaluation over every ordered pair of disjoint nonempty sets (3^n)."""
    n = g.n
    if n > PROPERTY_P_MAX_N:
        raise ValueError(f"exhaustive check limited to n <= {PROPERTY_P_MAX_N}")
    masks = g.masks
    full = (1 << n) - 1
    bound = [[property_p_bound(n, p, a, b) if a and b else 0.0 for b in range(n + 1)]
             for a in range(n + 1)]
    for umask in range(1, full):
        a = umask.bit_count()
        row = bound[a]
        rest = full ^ umask
        # W runs over the nonempty submasks of the complement; e(U, W) is
        # summed vertex by vertex
        w = rest
        while w:
            e = 0
            m = w
            while m:
                low = m & -m
                e += (masks[low.bit_length() - 1] & umask).bit_count()
                m ^= low
            if not e > row[w.bit_count()]:
                return False
            w = (w - 1) & rest
    return True


# -- solver outcome -----------------------------------------------------------

class Verdict(str, enum.Enum):
    HAMILTON_CYCLE = "HamiltonCycle"
    NOT_HAMILTONIAN = "NotHamiltonian"
    STAGE_FAILURE = "StageFailure"


@dataclass(frozen=True)
class SolverOutcome:
    tag: Verdict
    cycle: Optional[OrientedCycle] = None
    failure_site: Optional[str] = None

    def __post_init__(self):
        if (self.tag is Verdict.HAMILTON_CYCLE) != (self.cycle is not None):
            raise ValueError("a cycle is present iff the verdict is HamiltonCycle")
        if (self.tag is Verdict.STAGE_FAILURE) != (self.failure_site is not None):
            raise ValueError("a failure site is present iff the verdict is StageFailure")

    @classmethod
    def hamiltonian(cls, cycle: OrientedCycle) -> "SolverOutcome":
        return cls(Verdict.HAMILTON_CYCLE, cycle=cycle)

    @classmethod
    def not_hamiltonian(cls) -> "SolverOutcome":
        return cls(Verdict.NOT_HAMILTONIAN)

    @classmethod
    def failure(cls, site: str) -> "SolverOutcome":
        return cls(Verdict.STAGE_FAILURE, failure_site=site)

    @property
    def failed(self) -> bool:
        return self.tag is Verdict.STAGE_FAILURE

    @property
    def is_hamiltonian(self) -> bool:
        return self.tag is Verdict.HAMILTON_CYCLE

"""Greedy stage: two greedy paths, one merge, then double-rotation inserts.

Every edge this stage relies on is revealed through the oracle, so its cost
is the number of fresh queries charged to the ``cre1.step*`` stages.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .config import ConstantsConfig
from .graph import (InvalidSplice, OrientedCycle, OrientedPath, SolverOutcome, StageFailed,
                    rewire)
from .oracle import EdgeOracle

log = logging.getLogger(__name__)

STEP1, STEP2, STEP3 = "cre1.step1", "cre1.step2", "cre1.step3"


@dataclass
class Cre1State:
    n: int
    halves: tuple[frozenset[int], frozenset[int]]
    path1: Optional[OrientedPath] = None
    path2: Optional[OrientedPath] = None
    cycle: Optional[OrientedCycle] = None
    # entry[h]: vertex of half h whose predecessor on the merged cycle lies in
    # the other half; exit[h]: the one whose successor does.
    entry: tuple[int, int] = (-1, -1)
    exit: tuple[int, int] = (-1, -1)
    anchors: tuple[int, int, int, int] = (0, 0, 0, 0)
    leftover: set[int] = field(default_factory=set)
    used: tuple[set[int], set[int]] = field(default_factory=lambda: (set(), set()))
    inserted: int = 0

    @classmethod
    def split(cls, n: int) -> "Cre1State":
        half = n // 2
        return cls(n, (frozenset(range(half)), frozenset(range(half, n))))

    def half_of(self, v: int) -> int:
        return 0 if v in self.halves[0] else 1

    @property
    def paths(self) -> tuple[OrientedPath, OrientedPath]:
        assert self.path1 is not None and self.path2 is not None
        return self.path1, self.path2

    @property
    def n1(self) -> int:
        return len(self.halves[0]) - (len(self.path1) if self.path1 else 0)

    @property
    def n2(self) -> int:
        return len(self.halves[1]) - (len(self.path2) if self.path2 else 0)


def greedy_path(o: EdgeOracle, pool: Iterable[int], cfg: Optional[ConstantsConfig] = None,
                stage: str = STEP1) -> OrientedPath:
    """Grow a path from the smallest pool vertex, always taking the first hit.

    The end vertex is queried against the remaining pool vertices in
    ascending order; the first positive answer is appended. Raises
    :class:`StageFailed` when more than the leftover limit stays unused.
    """
    cfg = cfg or ConstantsConfig()
    verts = sorted(pool)
    m = len(verts)
    if m < 2:
        raise ValueError("pool needs at least two vertices")
    # singly linked list over remaining pool indices; m is the head sentinel
    nxt = list(range(1, m + 1)) + [1]
    nxt[m - 1] = -1
    path = [verts[0]]
    while True:
        end = path[-1]
        prev, cur = m, nxt[m]
        while cur != -1:
            if o.query(end, verts[cur], stage):
                nxt[prev] = nxt[cur]
                path.append(verts[cur])
                break
            prev, cur = cur, nxt[cur]
        else:
            break
    leftover = m - len(path)
    if leftover > cfg.leftover_limit(o.n):
        raise StageFailed(stage, f"{leftover} pool vertices left off the greedy path")
    return OrientedPath(path)


def merge_paths(o: EdgeOracle, st: Cre1State, cfg: Optional[ConstantsConfig] = None,
                stage: str = STEP2) -> OrientedCycle:
    """Close the two paths into one cycle with two cross edges.

    Index quadruples (1-based i, l and 0-based j, k, as offsets from the
    start of P1 / end of P2 / end of P1 / start of P2) are tried by
    increasing sum, ties in lexicographic order; the cross edges are
    ``(v_i, u_{b-j})`` and ``(v_{a-k}, u_l)``.
    """
    cfg = cfg or ConstantsConfig()
    p1, p2 = st.paths
    a, b = len(p1), len(p2)
    limit = cfg.leftover_limit(o.n)
    first: dict[tuple[int, int], bool] = {}

    def e1(i: int, j: int) -> bool:
        key = (i, j)
        hit = first.get(key)
        if hit is None:
            hit = first[key] = o.query(p1[i - 1], p2[b - j - 1], stage)
        return hit

    for total in range(2, limit + 1):
        for i in range(1, min(a, total - 1) + 1):
            for j in range(0, min(b - 1, total - i - 1) + 1):
                if not e1(i, j):
                    continue
                for k in range(0, min(a - i, total - i - j - 1) + 1):
                    l = total - i - j - k
                    if l < 1 or l > b - j:
                        continue
                    if (a - k - i + 1) + (b - j - l + 1) < 3:
                        continue
                    if not o.query(p1[a - k - 1], p2[l - 1], stage):
                        continue
                    verts = p1.vertices[i - 1:a - k] + p2.vertices[l - 1:b - j]
                    st.anchors = (i, j, k, l)
                    st.entry = (p1[i - 1], p2[l - 1])
                    st.exit = (p1[a - k - 1], p2[b - j - 1])
                    st.cycle = OrientedCycle(verts)
                    st.leftover = set(range(o.n)) - set(verts)
                    return st.cycle
    raise StageFailed(stage, "no cross edges within the index budget")


def insert_vertex(o: EdgeOracle, st: Cre1State, v: int,
                  cfg: Optional[ConstantsConfig] = None, stage: str = STEP3) -> OrientedCycle:
    """Absorb leftover vertex ``v`` with one double rotation.

    Gathers a set X of neighbours of ``v`` on the other half's path, then a
    set Y of neighbours of ``s(z)`` on ``v``'s own path (``z`` the last of
    X in path order), and looks for an edge ``(s(x), p(y))``.
    """
    cfg = cfg or ConstantsConfig()
    cycle = st.cycle
    assert cycle is not None
    if v in cycle:
        raise ValueError(f"vertex {v} is already on the cycle")
    r = cfg.rotation_size(o.n)
    h = st.half_of(v)
    oh = 1 - h
    own_path, opp_path = st.paths[h], st.paths[oh]
    pos = cycle.position

    X = []
    banned_x = st.exit[oh]
    used_opp = st.used[oh]
    for x in opp_path:
        if x in pos and x != banned_x and x not in used_opp and o.query(v, x, stage):
            X.append(x)
            if len(X) == r:
                break
    if len(X) < r:
        raise StageFailed(stage, f"vertex {v}: fewer than {r} usable neighbours")
    z = pivot(cycle, X)
    X.remove(z)
    sz = cycle.successor(z)

    Y = []
    banned_y = st.entry[h]
    used_own = st.used[h]
    for y in own_path:
        if (y in pos and y != banned_y and y != sz and y not in used_own
                and o.query(sz, y, stage)):
            Y.append(y)
            if len(Y) == r:
                break
    if len(Y) < r:
        raise StageFailed(stage, f"pivot {sz}: fewer than {r} usable neighbours")

    for x in X:
        sx = cycle.successor(x)
        for y in Y:
            py = cycle.predecessor(y)
            if sx == py or not o.query(sx, py, stage):
                continue
            try:
                new = rewire(cycle,
                             removed=[(x, sx), (py, y), (z, sz)],
                             added=[(v, x), (y, sz), (py, sx), (z, v)])
            except InvalidSplice:
                continue
            if len(new) != len(cycle) + 1:
                continue
            used_opp.update(X)
            used_opp.add(z)
            used_own.update(Y)
            st.used[st.half_of(sz)].add(sz)
            st.cycle = new
            st.leftover.discard(v)
            st.inserted += 1
            log.debug("cre1 insert %d via x=%d y=%d z=%d: |S|=%d", v, x, y, z, len(new))
            return new
    raise StageFailed(stage, f"vertex {v}: no closing edge between s(X) and p(Y)")


def pivot(cycle: OrientedCycle, X: list[int]) -> int:
    """The member of ``X`` followed by the longest stretch of the cycle free of ``X``.

    On the freshly merged cycle the other half's path is traversed in path
    order, so this is the member of ``X`` that is last on that path. After
    rotations it is the choice that keeps the other members of ``X`` at the
    end of the forward walk from ``s(z)``, which the rotation needs.
    """
    k = len(cycle)
    order = sorted(X, key=cycle.position.__getitem__)
    best, best_gap = order[-1], -1
    for idx, x in enumerate(order):
        nxt = order[(idx + 1) % len(order)]
        gap = (cycle.position[nxt] - cycle.position[x]) % k or k
        if gap > best_gap:
            best, best_gap = x, gap
    return best


def _cycle_revealed(o: EdgeOracle, c: OrientedCycle) -> bool:
    vs = c.vertices
    if len(vs) != o.n or set(vs) != set(range(o.n)):
        return False
    for i in range(len(vs)):
        u, w = vs[i - 1], vs[i]
        if not o.is_revealed(u, w) or not o.query(u, w, "verify"):
            return False
    return True


def run_cre1(o: EdgeOracle, cfg: Optional[ConstantsConfig] = None,
             timings: Optional[dict[str, float]] = None,
             state: Optional[Cre1State] = None) -> SolverOutcome:
    """Run the greedy stage; returns a verified cycle or a stage failure."""
    cfg = cfg or ConstantsConfig()
    n = o.n
    if n < 6:
        raise ValueError("the greedy stage needs at least 6 vertices")
    st = state or Cre1State.split(n)
    clock = time.perf_counter
    step, started = STEP1, clock()

    def advance(nxt: str) -> None:
        nonlocal step, started
        now = clock()
        _record(timings, step, now - started)
        step, started = nxt, now

    try:
        st.path1 = greedy_path(o, st.halves[0], cfg)
        st.path2 = greedy_path(o, st.halves[1], cfg)
        advance(STEP2)
        merge_paths(o, st, cfg)
        advance(STEP3)
        while st.leftover:
            insert_vertex(o, st, min(st.leftover), cfg)
        advance("")
    except StageFailed as exc:
        log.debug("cre1 failed: %s", exc)
        advance("")
        return SolverOutcome.failure(exc.site)
    assert st.cycle is not None
    if not _cycle_revealed(o, st.cycle):
        raise AssertionError("greedy stage produced a cycle that is not in the revealed graph")
    return SolverOutcome.hamiltonian(st.cycle)


def _record(timings: Optional[dict[str, float]], stage: str, seconds: float) -> None:
    if timings is not None:
        timings[stage] = timings.get(stage, 0.0) + seconds

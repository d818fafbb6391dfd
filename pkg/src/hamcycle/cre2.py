"""Polynomial repair stage, run on a fully revealed graph.

Low-degree vertices are routed exactly through a small core, the core cycle
is patched into the dense part, components outside the cycle are absorbed
by rotation, and the last stray vertices are inserted by edge exchanges.
"""

from __future__ import annotations

import itertools
import logging
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from .config import ConstantsConfig
from .exact import hpa3_cycle
from .graph import (AdjacencyGraph, Edge, InvalidSplice, OrientedCycle, SolverOutcome,
                    StageFailed, edge, rewire, verify_hamilton_cycle)

log = logging.getLogger(__name__)

STEPS = tuple(f"cre2.step{i}" for i in range(1, 7))
STEP1, STEP2, STEP3, STEP4, STEP5, STEP6 = STEPS


@dataclass
class SmallCore:
    small: frozenset[int]
    matching: frozenset[Edge]
    u_set: tuple[int, ...]
    cycle: Optional[OrientedCycle] = None
    missing: list[Edge] = field(default_factory=list)


@dataclass
class RotationFrame:
    """Bookkeeping for one attempt of the pattern exchange anchored at ``u``."""

    v: int
    u: int
    t0: int
    Q: list[int]
    c_v: int
    c_t0: int
    c: int
    W: list[int]
    T: list[int]
    O: dict[int, list[tuple[int, int]]]
    chosen: Optional[tuple[int, int, int]] = None


# -- step 1 -------------------------------------------------------------------

def compute_small(g: AdjacencyGraph, threshold: float,
                  size_limit: Optional[float] = None) -> frozenset[int]:
    small = frozenset(v for v in range(g.n) if g.degrees[v] < threshold)
    if size_limit is not None and len(small) > size_limit:
        raise StageFailed(STEP1, f"{len(small)} low-degree vertices exceed {size_limit:.2f}")
    return small


# -- step 2 -------------------------------------------------------------------

class _TwoMatcher:
    # Unit-capacity flow: source -> small (cap 2) -> other (cap 1) -> sink (cap 1).

    def __init__(self, g: AdjacencyGraph, small: frozenset[int]):
        self.small = sorted(small)
        self.nbrs = {x: [y for y in g.sorted_neighbors(x) if y not in small] for x in self.small}
        self.load = {x: 0 for x in self.small}
        self.mate: dict[int, int] = {}

    def _search(self) -> Optional[tuple[int, dict[int, tuple[int, int]]]]:
        parent: dict[int, tuple[int, int]] = {}
        seen = set()
        queue = deque()
        for x in self.small:
            if self.load[x] < 2:
                seen.add(x)
                queue.append(x)
        while queue:
            x = queue.popleft()
            for y in self.nbrs[x]:
                owner = self.mate.get(y)
                if owner == x:
                    continue
                if owner is None:
                    parent[-1] = (y, x)
                    return y, parent
                if owner not in seen:
                    seen.add(owner)
                    parent[owner] = (y, x)
                    queue.append(owner)
        return None

    def augment(self) -> bool:
        found = self._search()
        if found is None:
            return False
        y, parent = found
        x = parent[-1][1]
        while True:
            prev = parent.get(x)
            self.mate[y] = x
            if prev is None:
                self.load[x] += 1
                return True
            y, x = prev

    def has_augmenting_path(self) -> bool:
        return self._search() is not None

    def edges(self) -> frozenset[Edge]:
        return frozenset(edge(x, y) for y, x in self.mate.items())


def two_matching(g: AdjacencyGraph, small: frozenset[int] | set[int]
                 ) -> tuple[frozenset[Edge], tuple[int, ...]]:
    """Maximum <=2-matching from ``small`` into the rest, and the padded u-set."""
    small = frozenset(small)
    tm = _TwoMatcher(g, small)
    while tm.augment():
        pass
    u_set = sorted(tm.mate)
    need = len(small) + 1
    if len(u_set) < need:
        taken = set(u_set)
        spare = (y for y in range(g.n) if y not in small and y not in taken)
        u_set.extend(itertools.islice(spare, need - len(u_set)))
        if len(u_set) < need:
            raise StageFailed(STEP2, "graph too small to pad the u-set")
    return tm.edges(), tuple(sorted(u_set))


def is_maximum_two_matching(g: AdjacencyGraph, small: frozenset[int] | set[int],
                            matching: frozenset[Edge]) -> bool:
    """True iff ``matching`` is a valid <=2-matching admitting no augmenting path."""
    small = frozenset(small)
    tm = _TwoMatcher(g, small)
    for a, b in matching:
        x, y = (a, b) if a in small else (b, a)
        if x not in small or y in small or not g.has_edge(x, y) or y in tm.mate:
            return False
        tm.mate[y] = x
        tm.load[x] += 1
        if tm.load[x] > 2:
            return False
    return not tm.has_augmenting_path()


# -- step 3 -------------------------------------------------------------------

def core_cycle(g: AdjacencyGraph, small: frozenset[int] | set[int], u_set
               ) -> Optional[tuple[OrientedCycle, list[Edge]]]:
    """Hamilton cycle of the core helper graph, plus its edges missing from ``g``.

    Returns None when the helper graph (real edges inside the core plus all
    pairs inside ``u_set``) has no Hamilton cycle.
    """
    uset = frozenset(u_set)
    labels = sorted(frozenset(small) | uset)
    if len(labels) < 3:
        raise ValueError("the core needs at least three vertices")
    idx = {v: i for i, v in enumerate(labels)}
    pairs = [(idx[a], idx[b]) for a in labels for b in g.adjacency[a] if b in idx and a < b]
    ulab = sorted(idx[a] for a in uset)
    pairs.extend(itertools.combinations(ulab, 2))
    h = AdjacencyGraph(len(labels), pairs)
    found = hpa3_cycle(h)
    if found is None:
        return None
    cycle = OrientedCycle(labels[i] for i in found)
    vs = cycle.vertices
    missing = [edge(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))
               if not g.has_edge(vs[i], vs[(i + 1) % len(vs)])]
    return cycle, missing


# -- step 4 -------------------------------------------------------------------

def _short_path(g: AdjacencyGraph, a: int, b: int, blocked: set[int],
                depth: int) -> Optional[list[int]]:
    # BFS a -> b with at least one interior vertex, interiors outside ``blocked``.
    parent = {a: a}
    frontier = [a]
    for level in range(1, depth):
        nxt = []
        for x in frontier:
            for y in g.sorted_neighbors(x):
                if y in parent or y in blocked or y == b:
                    continue
                parent[y] = x
                if g.has_edge(y, b):
                    path = [b, y]
                    while path[-1] != a:
                        path.append(parent[path[-1]])
                    return path[::-1]
                nxt.append(y)
        frontier = nxt
        if not frontier:
            break
    return None


def patch_missing(g: AdjacencyGraph, core: SmallCore,
                  cfg: Optional[ConstantsConfig] = None) -> OrientedCycle:
    """Replace every missing core edge by a short path through unused vertices."""
    cfg = cfg or ConstantsConfig()
    assert core.cycle is not None
    if not core.missing:
        return core.cycle
    blocked = set(core.small) | set(core.u_set)
    detour: dict[Edge, list[int]] = {}
    for a, b in core.missing:
        path = _short_path(g, a, b, blocked, cfg.patch_depth)
        if path is None:
            raise StageFailed(STEP4, f"no path of length <= {cfg.patch_depth} joins {a} and {b}")
        blocked.update(path[1:-1])
        detour[edge(a, b)] = path
    vs = core.cycle.vertices
    out: list[int] = []
    for i, x in enumerate(vs):
        out.append(x)
        y = vs[(i + 1) % len(vs)]
        path = detour.get(edge(x, y))
        if path is not None:
            out.extend(path[1:-1] if path[0] == x else path[-2:0:-1])
    return OrientedCycle(out)


# -- step 5 -------------------------------------------------------------------

def _components(g: AdjacencyGraph, outside: list[int]) -> list[list[int]]:
    rest = set(outside)
    comps = []
    for s in outside:
        if s not in rest:
            continue
        rest.discard(s)
        comp = [s]
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in g.adjacency[x]:
                if y in rest:
                    rest.discard(y)
                    comp.append(y)
                    queue.append(y)
        comps.append(comp)
    return comps


def _path_through(g: AdjacencyGraph, a: int, b: int, inside: set[int]) -> Optional[list[int]]:
    # a..b with a nonempty interior contained in ``inside``.
    parent: dict[int, int] = {}
    queue = deque()
    for y in g.sorted_neighbors(a):
        if y in inside:
            parent[y] = -1
            queue.append(y)
    while queue:
        x = queue.popleft()
        if g.has_edge(x, b):
            path = [b, x]
            while parent[path[-1]] != -1:
                path.append(parent[path[-1]])
            path.append(a)
            return path[::-1]
        for y in g.sorted_neighbors(x):
            if y in inside and y not in parent:
                parent[y] = x
                queue.append(y)
    return None


def absorb_components(g: AdjacencyGraph, s0: OrientedCycle,
                      cfg: Optional[ConstantsConfig] = None) -> OrientedCycle:
    """Rotate whole outside components into the cycle until Step 6 may take over."""
    cfg = cfg or ConstantsConfig()
    n = g.n
    cycle = s0
    while True:
        pos = cycle.position
        outside = [v for v in range(n) if v not in pos]
        if not outside:
            return cycle
        comps = _components(g, outside)
        comp = max(comps, key=len)
        if (len(cycle) >= cfg.step5_cycle_fraction * n
                and len(comp) <= cfg.step5_component_limit(n)):
            return cycle
        inside = set(comp)
        contacts = set()
        for x in comp:
            contacts.update(y for y in g.adjacency[x] if y in pos)
        U = sorted({cycle.successor(x) for x in contacts})
        grown = None
        for i, u in enumerate(U):
            for w in U[i + 1:]:
                if not g.has_edge(u, w):
                    continue
                u1, w1 = cycle.predecessor(u), cycle.predecessor(w)
                path = _path_through(g, u1, w1, inside)
                if path is None:
                    continue
                added = list(zip(path, path[1:])) + [(u, w)]
                try:
                    grown = rewire(cycle, [(u1, u), (w1, w)], added)
                except InvalidSplice:
                    continue
                log.debug("cre2 step5: edge (%d,%d) pulls in %d vertices", u, w, len(path) - 2)
                break
            if grown is not None:
                break
        if grown is None:
            raise StageFailed(STEP5, "successors of the component's contacts are independent")
        cycle = grown


# -- step 6 -------------------------------------------------------------------

def _frame(g: AdjacencyGraph, Q: list[int]) -> Optional[RotationFrame]:
    v, u, t0 = Q[0], Q[1], Q[-1]
    L = len(Q)
    nv = [i for i in range(1, L) if g.has_edge(v, Q[i])]
    nt = [i for i in range(L - 1) if g.has_edge(t0, Q[i])]
    hv, ht = len(nv) // 2, len(nt) // 2
    cv_i = nv[hv - 1] if hv else 0
    ct_i = nt[-ht] if ht else L - 1
    c_i = L // 2 - 1
    W = [Q[i] for i in nv if 2 <= i <= cv_i]
    T = [Q[i + 1] for i in nt if ct_i <= i and 1 <= i and i + 1 < L - 1]
    if not W or not T:
        return None
    qpos = {x: i for i, x in enumerate(Q)}
    O: dict[int, list[tuple[int, int]]] = {}
    for x in W:
        xi = qpos[x]
        px = Q[xi - 1]
        for j in range(1, c_i + 1):
            y = Q[j]
            if y == x or not g.has_edge(px, y):
                continue
            s = Q[j + 1] if j < xi else Q[j - 1]
            O.setdefault(s, []).append((x, y))
    return RotationFrame(v, u, t0, Q, Q[cv_i], Q[ct_i], Q[c_i], W, T, O)


def figure1_exchange(g: AdjacencyGraph, cycle: OrientedCycle, v: int,
                     trace: Optional[list[RotationFrame]] = None) -> Optional[OrientedCycle]:
    """Pattern exchange built from one rotation at each end of the path ``v, u .. p(u)``.

    Anchors ``u`` are tried by decreasing cycle degree of their predecessor,
    and each anchor in both orientations of the cycle.
    """
    pos = cycle.position
    nbrs = [u for u in g.sorted_neighbors(v) if u in pos]
    deg_s = {}

    def d_s(x: int) -> int:
        if x not in deg_s:
            deg_s[x] = sum(1 for y in g.adjacency[x] if y in pos)
        return deg_s[x]

    target = len(cycle) + 1
    order = sorted(nbrs, key=lambda u: (-d_s(cycle.predecessor(u)), u))
    for u in order:
        for oriented in (cycle, cycle.reversed()):
            t0 = oriented.predecessor(u)
            Q = [v] + list(oriented.segment(u, t0))
            fr = _frame(g, Q)
            if fr is None:
                continue
            if trace is not None:
                trace.append(fr)
            qpos = {x: i for i, x in enumerate(Q)}
            Tq = sorted(fr.T, key=qpos.__getitem__)
            for s in sorted(fr.O, key=qpos.__getitem__):
                for t in Tq:
                    if t == s or not g.has_edge(s, t):
                        continue
                    pt = Q[qpos[t] - 1]
                    for w, y in fr.O[s]:
                        pw = Q[qpos[w] - 1]
                        removed = [(u, t0), (pw, w), (y, s), (pt, t)]
                        added = [(pw, y), (pt, t0), (s, t), (v, u), (v, w)]
                        try:
                            new = rewire(cycle, removed, added)
                        except InvalidSplice:
                            continue
                        if len(new) == target:
                            fr.chosen = (s, t, w)
                            return new
    return None


def exhaustive_exchange(g: AdjacencyGraph, cycle: OrientedCycle, v: int,
                        max_removed: int = 4) -> Optional[OrientedCycle]:
    """Search every E1 of at most ``max_removed`` cycle edges and every reconnection.

    Removing k cycle edges leaves k arcs; a valid exchange strings them
    together with k-1 chords of ``g`` and closes the string through ``v``.
    """
    vs = cycle.vertices
    m = len(vs)
    pos = cycle.position
    nv = g.adjacency[v]

    def chord(a: int, b: int) -> bool:
        if not g.has_edge(a, b):
            return False
        d = abs(pos[a] - pos[b])
        return d != 1 and d != m - 1

    for k in range(1, min(max_removed, m) + 1):
        for combo in itertools.combinations(range(m), k):
            arcs = [(vs[(combo[j] + 1) % m], vs[combo[(j + 1) % k]]) for j in range(k)]
            ends = {x for arc in arcs for x in arc}
            if len(ends & nv) < 2:
                continue
            found = _string_arcs(arcs, nv, chord)
            if found is None:
                continue
            removed = [(vs[i], vs[(i + 1) % m]) for i in combo]
            entry, exit_, chords = found
            added = chords + [(v, entry), (v, exit_)]
            try:
                new = rewire(cycle, removed, added)
            except InvalidSplice:
                continue
            if len(new) == m + 1:
                return new
    return None


def _string_arcs(arcs: list[tuple[int, int]], nv: frozenset[int],
                 chord: Callable[[int, int], bool]
                 ) -> Optional[tuple[int, int, list[tuple[int, int]]]]:
    k = len(arcs)
    chords: list[tuple[int, int]] = []
    used = [False] * k

    def ends(i: int) -> list[tuple[int, int]]:
        a, b = arcs[i]
        return [(a, b)] if a == b else [(a, b), (b, a)]

    def dfs(first: int, exit_: int, count: int) -> Optional[int]:
        if count == k:
            return exit_ if exit_ in nv and exit_ != first else None
        for i in range(k):
            if used[i]:
                continue
            for entry, out in ends(i):
                if not chord(exit_, entry):
                    continue
                used[i] = True
                chords.append((exit_, entry))
                last = dfs(first, out, count + 1)
                if last is not None:
                    return last
                chords.pop()
                used[i] = False
        return None

    for i in range(k):
        for entry, out in ends(i):
            if entry not in nv:
                continue
            used[i] = True
            last = dfs(entry, out, 1)
            if last is not None:
                return entry, last, list(chords)
            used[i] = False
    return None


def rotation_exchange(g: AdjacencyGraph, cycle: OrientedCycle, v: int,
                      cfg: Optional[ConstantsConfig] = None,
                      allow_exhaustive: bool = True) -> OrientedCycle:
    """Insert the outside vertex ``v`` into ``cycle`` by a bounded edge exchange."""
    cfg = cfg or ConstantsConfig()
    if v in cycle:
        raise ValueError(f"vertex {v} is already on the cycle")
    if len(cycle) < 3:
        raise ValueError("cycle too short for an exchange")
    pos = cycle.position
    nbrs = [u for u in g.sorted_neighbors(v) if u in pos]
    if len(nbrs) < 2:
        raise StageFailed(STEP6, f"vertex {v} has fewer than two cycle neighbours")
    for u in nbrs:
        w = cycle.successor(u)
        if g.has_edge(v, w):
            log.debug("cre2 step6: %d between %d and %d", v, u, w)
            return rewire(cycle, [(u, w)], [(u, v), (v, w)])
    new = figure1_exchange(g, cycle, v)
    if new is not None:
        log.debug("cre2 step6: %d inserted by the pattern exchange", v)
        return new
    if allow_exhaustive and g.n <= cfg.exhaustive_fallback_max_n:
        new = exhaustive_exchange(g, cycle, v, cfg.exchange_size)
        if new is not None:
            log.debug("cre2 step6: %d inserted by exhaustive exchange", v)
            return new
    raise StageFailed(STEP6, f"no exchange inserts vertex {v}")


# -- driver -------------------------------------------------------------------

def run_cre2(g: AdjacencyGraph, cfg: Optional[ConstantsConfig] = None,
             timings: Optional[dict[str, float]] = None) -> SolverOutcome:
    cfg = cfg or ConstantsConfig()
    n = g.n
    if n < 3:
        raise ValueError("the repair stage needs at least 3 vertices")
    clock = time.perf_counter
    step, started = STEP1, clock()

    def advance(nxt: str) -> None:
        nonlocal step, started
        now = clock()
        if timings is not None:
            timings[step] = timings.get(step, 0.0) + now - started
        step, started = nxt, now

    try:
        small = compute_small(g, cfg.small_degree_threshold(n), cfg.small_size_limit(n))
        advance(STEP2)
        matching, u_set = two_matching(g, small)
        if len(small) + len(u_set) < 3:
            taken = set(small) | set(u_set)
            extra = [y for y in range(n) if y not in taken][:3 - len(taken)]
            u_set = tuple(sorted(u_set + tuple(extra)))
        advance(STEP3)
        found = core_cycle(g, small, u_set)
        if found is None:
            advance("")
            return SolverOutcome.not_hamiltonian()
        core = SmallCore(small, matching, u_set, *found)
        advance(STEP4)
        cycle = patch_missing(g, core, cfg)
        advance(STEP5)
        cycle = absorb_components(g, cycle, cfg)
        advance(STEP6)
        outside = sorted(set(range(n)) - set(cycle.vertices))
        for v in outside:
            cycle = rotation_exchange(g, cycle, v, cfg)
        advance("")
    except StageFailed as exc:
        log.debug("cre2 failed: %s", exc)
        advance("")
        return SolverOutcome.failure(exc.site)
    if not verify_hamilton_cycle(g, cycle):
        raise AssertionError("repair stage produced an invalid Hamilton cycle")
    return SolverOutcome.hamiltonian(cycle)

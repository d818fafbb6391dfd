"""Edge-list and cycle files.

An edge-list file starts with ``n m`` and is followed by ``m`` lines
``u v`` with ``0 <= u < v < n``. A cycle file lists vertex ids in cycle
order, separated by any whitespace.
"""

from __future__ import annotations

from pathlib import Path

from .graph import AdjacencyGraph, OrientedCycle


class GraphFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def _ints(text: str, lineno: int, count: int) -> list[int]:
    fields = text.split()
    if len(fields) != count:
        raise GraphFormatError(f"expected {count} integers, got {text.strip()!r}", lineno)
    try:
        return [int(f) for f in fields]
    except ValueError:
        raise GraphFormatError(f"not an integer in {text.strip()!r}", lineno) from None


def parse_graph(text: str) -> AdjacencyGraph:
    rows = [(i, line) for i, line in enumerate(text.splitlines(), 1) if line.strip()]
    if not rows:
        raise GraphFormatError("empty file")
    lineno, head = rows[0]
    n, m = _ints(head, lineno, 2)
    if n < 0 or m < 0:
        raise GraphFormatError("negative vertex or edge count", lineno)
    seen: set[tuple[int, int]] = set()
    for lineno, line in rows[1:]:
        u, v = _ints(line, lineno, 2)
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"vertex out of range 0..{n - 1}", lineno)
        if u > v:
            raise GraphFormatError(f"edge must be written with u < v, got {u} {v}", lineno)
        if (u, v) in seen:
            raise GraphFormatError(f"duplicate edge {u} {v}", lineno)
        seen.add((u, v))
    if len(seen) != m:
        raise GraphFormatError(f"header announces {m} edges, file has {len(seen)}")
    return AdjacencyGraph(n, seen)


def format_graph(g: AdjacencyGraph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges()))
    return "\n".join(lines) + "\n"


def load_graph(path: str | Path) -> AdjacencyGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def save_graph(g: AdjacencyGraph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g), encoding="utf-8")


def parse_cycle(text: str) -> OrientedCycle:
    try:
        vertices = [int(tok) for tok in text.split()]
    except ValueError as exc:
        raise GraphFormatError(f"cycle file: {exc}") from None
    try:
        return OrientedCycle(vertices)
    except ValueError as exc:
        raise GraphFormatError(f"cycle file: {exc}") from None


def load_cycle(path: str | Path) -> OrientedCycle:
    return parse_cycle(Path(path).read_text(encoding="utf-8"))


def save_cycle(c: OrientedCycle, path: str | Path) -> None:
    Path(path).write_text(" ".join(map(str, c.vertices)) + "\n", encoding="utf-8")

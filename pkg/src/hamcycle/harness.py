"""Stage dispatch, seeded experiments and report serialization."""

from __future__ import annotations

import csv
import hashlib
import json
import os
import statistics
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from .config import ConstantsConfig
from .cre1 import run_cre1
from .cre2 import run_cre2
from .exact import run_cre3
from .graph import OrientedCycle, SolverOutcome, verify_hamilton_cycle
from .oracle import EdgeOracle, GnpOracle

WORKERS_ENV = "HAMCYCLE_WORKERS"
CRE1_MIN_N = 6


def cycle_checksum(c: OrientedCycle) -> str:
    blob = ",".join(map(str, c.canonical()))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class RunReport:
    n: int
    p: float
    seed: Optional[int]
    constants_hash: str
    outcome: str
    failure_sites: list[str]
    resolved_by: str
    ledger: dict[str, dict[str, int]]
    total_fresh_queries: int
    ratio: float
    wall_times: Optional[dict[str, float]] = None
    cycle_checksum: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunReport":
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))


def run_cre(o: EdgeOracle, cfg: Optional[ConstantsConfig] = None, *,
            seed: Optional[int] = None,
            timings: bool = False) -> tuple[SolverOutcome, RunReport]:
    """Greedy stage on the lazy oracle, then repair, then the exact solver.

    The verdict is always definitive. With ``timings`` the report carries
    per-stage wall-clock seconds, which makes it non-reproducible.
    """
    cfg = cfg or ConstantsConfig()
    n = o.n
    if n < 3:
        raise ValueError("need at least 3 vertices")
    clock: dict[str, float] = {}
    sites: list[str] = []
    out: Optional[SolverOutcome] = None
    resolved = "cre1"
    if n >= CRE1_MIN_N:
        out = run_cre1(o, cfg, clock)
        if out.failed:
            sites.append(out.failure_site)
    if out is None or out.failed:
        resolved = "cre2"
        g = o.materialize()
        out = run_cre2(g, cfg, clock)
        if out.failed:
            sites.append(out.failure_site)
            resolved = "cre3"
            started = time.perf_counter()
            out = run_cre3(g)
            clock["cre3"] = time.perf_counter() - started
        if out.is_hamiltonian and not verify_hamilton_cycle(g, out.cycle):
            raise AssertionError("final cycle failed verification")
    total = o.ledger.fresh
    report = RunReport(
        n=n, p=o.p, seed=seed, constants_hash=cfg.digest(), outcome=out.tag.value,
        failure_sites=sites, resolved_by=resolved, ledger=o.ledger.to_dict(),
        total_fresh_queries=total, ratio=total * o.p / n,
        wall_times=dict(sorted(clock.items())) if timings else None,
        cycle_checksum=cycle_checksum(out.cycle) if out.cycle is not None else None)
    return out, report


# -- experiments ----------------------------------------------------------------

def _trial(args: tuple[int, float, int, dict[str, Any], bool]) -> RunReport:
    n, p, seed, cfg_dict, timings = args
    _, report = run_cre(GnpOracle(n, p, seed), ConstantsConfig.from_dict(cfg_dict),
                        seed=seed, timings=timings)
    return report


def _workers(requested: Optional[int]) -> int:
    if requested is None:
        raw = os.environ.get(WORKERS_ENV, "1")
        try:
            requested = int(raw)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, requested)


def check_experiment_args(n: int, p: float, trials: int, seed: int) -> None:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability {p} outside [0, 1]")
    if n < 3:
        raise ValueError("need at least 3 vertices")
    if n > (1 << 32):
        raise ValueError("n too large: pair indices would overflow 64 bits")
    if seed < 0 or seed + trials - 1 >= 1 << 64:
        raise ValueError("trial seeds must lie in [0, 2^64)")


def experiment(n: int, p: float, trials: int, seed: int,
               cfg: Optional[ConstantsConfig] = None, *, workers: Optional[int] = None,
               timings: bool = False) -> dict[str, Any]:
    """Run ``trials`` seeded instances (seeds ``seed``, ``seed+1``, ...) and summarize."""
    cfg = cfg or ConstantsConfig()
    check_experiment_args(n, p, trials, seed)
    jobs = [(n, p, seed + i, cfg.to_dict(), timings) for i in range(trials)]
    k = min(_workers(workers), trials)
    if k > 1:
        with ProcessPoolExecutor(max_workers=k) as pool:
            reports = list(pool.map(_trial, jobs))
    else:
        reports = [_trial(job) for job in jobs]
    return {"reports": reports, "summary": summarize(reports, n, p, seed, cfg)}


def summarize(reports: Sequence[RunReport], n: int, p: float, seed: int,
              cfg: ConstantsConfig) -> dict[str, Any]:
    trials = len(reports)
    fresh = [r.total_fresh_queries for r in reports]
    greedy_ok = [r.total_fresh_queries for r in reports if r.resolved_by == "cre1"]
    sites = Counter(s for r in reports for s in r.failure_sites)
    return {
        "n": n, "p": p, "trials": trials, "seed": seed, "constants_hash": cfg.digest(),
        "mean_fresh_queries": statistics.fmean(fresh),
        "stdev_fresh_queries": statistics.stdev(fresh) if trials > 1 else 0.0,
        "mean_ratio": statistics.fmean(r.ratio for r in reports),
        "cre1_success_rate": len(greedy_ok) / trials,
        "mean_fresh_queries_cre1_success": statistics.fmean(greedy_ok) if greedy_ok else None,
        "failure_frequency": {s: c / trials for s, c in sorted(sites.items())},
        "outcomes": dict(sorted(Counter(r.outcome for r in reports).items())),
        "resolved_by": dict(sorted(Counter(r.resolved_by for r in reports).items())),
    }


# -- serialization ----------------------------------------------------------------

CSV_FIELDS = [f for f in RunReport.__dataclass_fields__]


def report_lines(reports: Iterable[RunReport], summary: Optional[dict[str, Any]] = None
                 ) -> list[str]:
    lines = [r.to_json() for r in reports]
    if summary is not None:
        lines.append(json.dumps({"summary": summary}, sort_keys=True))
    return lines


def save_report(obj: RunReport | dict[str, Any] | Sequence[RunReport], path: str | Path,
                fmt: str = "json") -> None:
    """Write reports as JSON lines (summary last) or as CSV rows.

    ``obj`` is a single report, a list of reports, or an ``experiment``
    result holding ``reports`` and ``summary``.
    """
    summary = None
    if isinstance(obj, RunReport):
        reports: Sequence[RunReport] = [obj]
    elif isinstance(obj, dict):
        reports, summary = obj["reports"], obj.get("summary")
    else:
        reports = list(obj)
    path = Path(path)
    if fmt == "json":
        path.write_text("\n".join(report_lines(reports, summary)) + "\n", encoding="utf-8")
    elif fmt == "csv":
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
            writer.writeheader()
            for r in reports:
                row = r.to_dict()
                for key in ("failure_sites", "ledger", "wall_times"):
                    row[key] = json.dumps(row[key], sort_keys=True)
                writer.writerow(row)
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def load_reports(path: str | Path) -> tuple[list[RunReport], Optional[dict[str, Any]]]:
    reports, summary = [], None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        data = json.loads(line)
        if "summary" in data and len(data) == 1:
            summary = data["summary"]
        else:
            reports.append(RunReport.from_dict(data))
    return reports, summary

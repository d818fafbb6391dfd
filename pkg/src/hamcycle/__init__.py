"""Hamilton cycles in random graphs with an optimal expected number of edge queries.

The solver runs a greedy stage against a lazy edge oracle, falls back to a
polynomial repair stage on the revealed graph, and finally to an exact
linear-space search, so every verdict is definitive.
"""

from .config import ConstantsConfig
from .cre1 import run_cre1
from .cre2 import rotation_exchange, run_cre2, two_matching
from .exact import held_karp, hpa3, hpa3_cycle, run_cre3
from .graph import (AdjacencyGraph, InvalidSplice, OrientedCycle, OrientedPath, SolverOutcome,
                    StageFailed, Verdict, check_property_P, rewire, segment, splice,
                    verify_hamilton_cycle)
from .harness import RunReport, experiment, run_cre, save_report
from .io import load_graph, save_graph
from .oracle import EdgeOracle, FixedGraphOracle, GnpOracle

__all__ = [
    "AdjacencyGraph", "ConstantsConfig", "EdgeOracle", "FixedGraphOracle", "GnpOracle",
    "InvalidSplice", "OrientedCycle", "OrientedPath", "RunReport", "SolverOutcome",
    "StageFailed", "Verdict", "check_property_P", "experiment", "held_karp", "hpa3",
    "hpa3_cycle", "load_graph", "rewire", "rotation_exchange", "run_cre", "run_cre1",
    "run_cre2", "run_cre3", "save_graph", "save_report", "segment", "splice", "two_matching",
    "verify_hamilton_cycle",
]

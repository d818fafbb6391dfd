"""Command line entry point: ``solve``, ``experiment`` and ``verify``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .config import ConstantsConfig
from .graph import verify_hamilton_cycle
from .harness import experiment, run_cre, save_report
from .io import GraphFormatError, load_cycle, load_graph
from .oracle import FixedGraphOracle

EXIT_HAMILTONIAN, EXIT_NOT_HAMILTONIAN, EXIT_INPUT_ERROR = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hamcycle", description="Hamilton cycles in dense random graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="decide Hamiltonicity of an edge-list graph")
    solve.add_argument("--input", required=True)
    solve.add_argument("--constants")
    solve.add_argument("--trace", action="store_true", help="log every splice to stderr")
    solve.add_argument("--report", help="also write the run report (JSON) here")

    exp = sub.add_parser("experiment", help="seeded batch of G(n, p) runs")
    exp.add_argument("--n", type=int, required=True)
    exp.add_argument("--p", type=float, required=True)
    exp.add_argument("--trials", type=int, required=True)
    exp.add_argument("--seed", type=int, required=True)
    exp.add_argument("--constants")
    exp.add_argument("--out", required=True)
    exp.add_argument("--format", choices=("json", "csv"), default="json")
    exp.add_argument("--timings", action="store_true",
                     help="record wall-clock seconds per stage (output no longer reproducible)")

    ver = sub.add_parser("verify", help="check a cycle file against a graph")
    ver.add_argument("--input", required=True)
    ver.add_argument("--cycle", required=True)
    return ap


def _constants(path: Optional[str]) -> ConstantsConfig:
    return ConstantsConfig.from_file(path) if path else ConstantsConfig()


def _solve(args: argparse.Namespace) -> int:
    if args.trace:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr, format="%(message)s")
    g = load_graph(args.input)
    if g.n < 3:
        print("NotHamiltonian")
        return EXIT_NOT_HAMILTONIAN
    out, report = run_cre(FixedGraphOracle(g), _constants(args.constants))
    if args.report:
        save_report(report, args.report)
    print(out.tag.value)
    if out.cycle is not None:
        print(" ".join(map(str, out.cycle.vertices)))
        return EXIT_HAMILTONIAN
    return EXIT_NOT_HAMILTONIAN


def _experiment(args: argparse.Namespace) -> int:
    result = experiment(args.n, args.p, args.trials, args.seed, _constants(args.constants),
                        timings=args.timings)
    save_report(result, args.out, args.format)
    print(json.dumps(result["summary"], sort_keys=True))
    return 0


def _verify(args: argparse.Namespace) -> int:
    g = load_graph(args.input)
    c = load_cycle(args.cycle)
    ok = verify_hamilton_cycle(g, c)
    print("valid" if ok else "invalid")
    return EXIT_HAMILTONIAN if ok else EXIT_NOT_HAMILTONIAN


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    handler = {"solve": _solve, "experiment": _experiment, "verify": _verify}[args.command]
    try:
        return handler(args)
    except (OSError, GraphFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())

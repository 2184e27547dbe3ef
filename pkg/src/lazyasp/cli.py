"""Command-line driver: solve program files or print generated benchmark instances.

    lazyasp [options] FILE...       solve (``-`` or no file reads stdin)
    lazyasp gen FAMILY [options]    print a generated instance
"""
from __future__ import annotations

import argparse
import sys
import time
from typing import List, Optional

from .core import ModelError
from .corpus import FAMILIES, InstanceSpec, generate_instance
from .depgraph import component_order, format_components
from .engine import Engine, SearchConfig
from .oracle import OracleTooLarge, oracle_answer_sets
from .parser import format_answer_set, parse_program

EXIT_SAT, EXIT_UNSAT, EXIT_ERROR = 10, 20, 1


def _solver_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lazyasp", description="Answer set solver with lazy grounding.")
    ap.add_argument("files", nargs="*", help="program files; '-' or none reads stdin")
    ap.add_argument("-n", dest="num", type=int, default=1, metavar="K", help="answer sets to compute, 0 for all (default 1)")
    ap.add_argument("--max-int", type=int, default=SearchConfig.max_int, metavar="M", help="bound on absolute integer values")
    ap.add_argument("--max-depth", type=int, default=SearchConfig.max_depth, metavar="D", help="bound on term nesting depth")
    ap.add_argument("--oracle", action="store_true", help="enumerate everything and diff against the brute-force reference solver")
    ap.add_argument("--dump-sccs", action="store_true", help="print the component order and exit")
    ap.add_argument("--trace", action="store_true", help="log search events to stderr")
    ap.add_argument("--no-eager-conflict", action="store_true", help="check conflicts only when propagation is quiescent")
    ap.add_argument("--no-dedupe", action="store_true", help="report repeated answer sets")
    ap.add_argument("--no-support-check", action="store_true", help="disable early pruning of underivable must-be-true atoms")
    ap.add_argument("--stats", action="store_true", help="append key=value statistics")
    return ap


def _gen_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lazyasp gen", description="Print a generated benchmark instance.")
    ap.add_argument("family", choices=sorted(FAMILIES))
    ap.add_argument("-N", "--n", dest="n", type=int, default=5, help="size parameter")
    ap.add_argument("-M", "--parts", dest="m", type=int, default=3, help="schur: number of parts")
    ap.add_argument("--edges", type=int, default=20, help="cutedge: number of edges")
    ap.add_argument("--discs", type=int, default=4, help="hanoi: number of discs")
    ap.add_argument("--moves", type=int, default=15, help="hanoi: move bound")
    ap.add_argument("--seed", type=int, default=0, help="cutedge: RNG seed")
    ap.add_argument("--expected", action="store_true", help="print the expected answer-set count to stderr")
    return ap


def _read_sources(files: List[str]):
    if not files:
        files = ["-"]
    chunks = []
    for f in files:
        if f == "-":
            chunks.append((sys.stdin.read(), "<stdin>"))
        else:
            with open(f, encoding="utf-8") as fh:
                chunks.append((fh.read(), f))
    return chunks


def _parse(files: List[str]):
    chunks = _read_sources(files)
    text = "\n".join(t for t, _ in chunks)
    source = chunks[0][1] if len(chunks) == 1 else "<input>"
    return parse_program(text, source)


def _gen(argv: List[str]) -> int:
    args = _gen_parser().parse_args(argv)
    spec = InstanceSpec(args.family, n=args.n, m=args.m, edges=args.edges, discs=args.discs, moves=args.moves, seed=args.seed)
    try:
        inst = generate_instance(spec)
    except ValueError as exc:
        print(f"lazyasp gen: {exc}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(inst.text)
    if args.expected:
        print(f"expected={inst.expected}", file=sys.stderr)
    return 0


def run(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "gen":
        return _gen(argv[1:])
    args = _solver_parser().parse_args(argv)
    if args.num < 0:
        print("lazyasp: -n must be >= 0", file=sys.stderr)
        return EXIT_ERROR
    try:
        program = _parse(args.files)
    except OSError as exc:
        print(f"lazyasp: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ModelError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR

    if args.dump_sccs:
        print(format_components(component_order(program)))
        return 0

    config = SearchConfig(
        num_answer_sets=args.num,
        max_int=args.max_int,
        max_depth=args.max_depth,
        eager_conflict=not args.no_eager_conflict,
        dedupe=not args.no_dedupe,
        trace=args.trace,
        support_check=not args.no_support_check,
    )
    start = time.perf_counter()
    stats = {}
    count = 0
    disagreement = None
    try:
        if args.oracle:
            config.num_answer_sets = 0  # a diff needs the full enumeration
        engine = Engine(program, config)
        found = []
        for answer in engine.solve():
            found.append(answer.atoms)
            if not args.num or count < args.num:
                print(format_answer_set(answer.atoms, program.show), flush=True)
            count += 1
        stats = engine.stats.as_dict()
        if args.oracle:
            expected = oracle_answer_sets(program, config.limits)
            got = set(found)
            if got != expected:
                disagreement = (len(expected - got), len(got - expected))
    except OracleTooLarge as exc:
        print(f"lazyasp: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ModelError as exc:
        print(f"lazyasp: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except KeyboardInterrupt:
        print("lazyasp: interrupted", file=sys.stderr)
        return EXIT_ERROR

    if stats.get("skipped_candidates"):
        print(f"lazyasp: warning: {stats['skipped_candidates']} instances skipped by the integer/depth bounds; results may be incomplete", file=sys.stderr)
    print("SATISFIABLE" if count else "UNSATISFIABLE")
    print(f"Models: {count}")
    if args.stats:
        stats["answer_sets"] = count
        stats["time_ms"] = round(1000 * (time.perf_counter() - start))
        for key, value in stats.items():
            print(f"{key}={value}")
    if args.oracle:
        if disagreement is None:
            print("oracle=agree")
        else:
            print(f"oracle=disagree missing={disagreement[0]} extra={disagreement[1]}")
            return EXIT_ERROR
    return EXIT_SAT if count else EXIT_UNSAT


def main() -> None:
    sys.exit(run())

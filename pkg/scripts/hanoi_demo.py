"""Solve Tower of Hanoi planning, print the plan and replay it."""
import argparse
import time

from lazyasp import parse_program, solve
from lazyasp.corpus import hanoi, replay_hanoi
from lazyasp.parser import format_answer_set


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--discs", type=int, default=4)
    ap.add_argument("--moves", type=int, nargs="*", default=[15, 100, 500])
    ap.add_argument("--show-plan", action="store_true", help="print the move/2 atoms of each plan")
    args = ap.parse_args()
    for bound in args.moves:
        prog = parse_program(hanoi(args.discs, bound).text)
        start = time.perf_counter()
        answers = solve(prog)
        secs = time.perf_counter() - start
        if not answers:
            print(f"bound {bound}: no plan ({secs:.2f}s)")
            continue
        atoms = answers[0].atoms
        plan = sorted((a for a in atoms if a[0] == "move"), key=lambda a: a[1][0])
        print(f"bound {bound}: {len(plan) - 1} moves, replay {replay_hanoi(atoms, args.discs) or 'valid'} ({secs:.2f}s)")
        if args.show_plan:
            for a in plan:
                print("  " + format_answer_set([a]))


if __name__ == "__main__":
    main()

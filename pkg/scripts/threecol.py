"""3-coloring of wheel graphs: counts and search statistics, with and without support pruning."""
import argparse
import time

from lazyasp import Engine, SearchConfig, parse_program
from lazyasp.corpus import threecol_wheel


def run(n, support_check):
    engine = Engine(parse_program(threecol_wheel(n).text), SearchConfig(num_answer_sets=0, support_check=support_check))
    start = time.perf_counter()
    count = sum(1 for _ in engine.solve())
    return count, engine.stats, time.perf_counter() - start


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("sizes", type=int, nargs="*", default=[5, 6, 7, 8, 9, 10, 11])
    ap.add_argument("--no-support-check", action="store_true")
    args = ap.parse_args()
    print("N   count  choices  conflicts  seconds")
    for n in args.sizes:
        count, stats, secs = run(n, not args.no_support_check)
        print(f"{n:<3} {count:<6} {stats.choice_points:<8} {stats.conflicts:<10} {secs:.2f}")


if __name__ == "__main__":
    main()

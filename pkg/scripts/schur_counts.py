"""Answer-set counts and solve times of Schur with M parts for a range of N."""
import argparse
import time

from lazyasp import SearchConfig, parse_program, solve
from lazyasp.corpus import SCHUR3_COUNTS, schur


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=8)
    ap.add_argument("-M", "--parts", type=int, default=3)
    args = ap.parse_args()
    print("N  count  expected  seconds")
    for n in range(1, args.max_n + 1):
        start = time.perf_counter()
        count = len(solve(parse_program(schur(n, args.parts).text), SearchConfig(num_answer_sets=0)))
        expected = SCHUR3_COUNTS[n - 1] if args.parts == 3 and n <= len(SCHUR3_COUNTS) else "?"
        print(f"{n:<2} {count:<6} {expected:<9} {time.perf_counter() - start:.2f}")


if __name__ == "__main__":
    main()

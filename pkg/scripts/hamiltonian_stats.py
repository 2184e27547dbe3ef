"""Hamiltonian cycles of complete graphs: fired rules of the first answer set against naive grounding size."""
import argparse
import time

from lazyasp import Engine, SearchConfig, parse_program
from lazyasp.corpus import hamiltonian_complete


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("sizes", type=int, nargs="*", default=[10, 20, 30, 40])
    ap.add_argument("-n", dest="num", type=int, default=1, help="answer sets to compute, 0 for all")
    args = ap.parse_args()
    print("N   answers  fired_rules  2N^3     peak_atoms  seconds")
    for n in args.sizes:
        engine = Engine(parse_program(hamiltonian_complete(n).text), SearchConfig(num_answer_sets=args.num))
        start = time.perf_counter()
        count = sum(1 for _ in engine.solve())
        s = engine.stats
        print(f"{n:<3} {count:<8} {s.fired_rules:<12} {2 * n**3:<8} {s.peak_atoms:<11} {time.perf_counter() - start:.2f}")


if __name__ == "__main__":
    main()

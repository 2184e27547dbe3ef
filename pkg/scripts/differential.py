"""Compare the engine with the brute-force oracle on random programs under several search configurations."""
import argparse
import random
import time
from dataclasses import dataclass

from lazyasp import SearchConfig, parse_program, solve
from lazyasp.corpus import random_program
from lazyasp.oracle import OracleTooLarge, oracle_answer_sets


@dataclass
class DiffConfig:
    programs: int = 500
    first_seed: int = 0
    max_preds: int = 3
    max_consts: int = 6
    max_rules: int = 8
    max_constraints: int = 2


SEARCH = {
    "default": SearchConfig(num_answer_sets=0),
    "no-support-check": SearchConfig(num_answer_sets=0, support_check=False),
    "no-eager-conflict": SearchConfig(num_answer_sets=0, eager_conflict=False),
    "no-dedupe": SearchConfig(num_answer_sets=0, dedupe=False),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--programs", type=int, default=DiffConfig.programs)
    ap.add_argument("--first-seed", type=int, default=DiffConfig.first_seed)
    ap.add_argument("--max-preds", type=int, default=DiffConfig.max_preds)
    ap.add_argument("--max-rules", type=int, default=DiffConfig.max_rules)
    cfg = DiffConfig(**{k: v for k, v in vars(ap.parse_args()).items()})
    sizes, mismatches, skipped = {}, [], 0
    start = time.perf_counter()
    for seed in range(cfg.first_seed, cfg.first_seed + cfg.programs):
        text = random_program(random.Random(seed), cfg.max_preds, cfg.max_consts, cfg.max_rules, cfg.max_constraints)
        prog = parse_program(text)
        try:
            expected = oracle_answer_sets(prog)
        except OracleTooLarge:
            skipped += 1
            continue
        sizes[len(expected)] = sizes.get(len(expected), 0) + 1
        for name, config in SEARCH.items():
            if set(a.atoms for a in solve(prog, config)) != expected:
                mismatches.append((seed, name))
    print(f"programs={cfg.programs} skipped={skipped} mismatches={len(mismatches)} seconds={time.perf_counter() - start:.1f}")
    print("answer-set counts: " + ", ".join(f"{k}: {v}" for k, v in sorted(sizes.items())))
    for seed, name in mismatches[:20]:
        print(f"  seed {seed} under {name}")


if __name__ == "__main__":
    main()

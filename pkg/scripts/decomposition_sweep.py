"""Round-trip sweep: decompose(synth_instance(counts, seed)) over every small count.

Reports per-prime totals and timings; exits nonzero on any mismatch.
"""

import argparse
import sys
import time
from dataclasses import dataclass

from constgen.repdecomp import all_counts, decompose, rational_d, synth_instance


@dataclass
class SweepConfig:
    primes: tuple = (2, 3, 5, 7, 11)
    n_max: int = 12
    seeds: int = 20


def sweep(cfg: SweepConfig) -> int:
    bad = 0
    for p in cfg.primes:
        t = time.perf_counter()
        cases = 0
        by_d: dict[int, int] = {}
        for c in all_counts(p, cfg.n_max):
            by_d[rational_d(c)] = by_d.get(rational_d(c), 0) + 1
            for seed in range(cfg.seeds):
                cases += 1
                got = decompose(p, synth_instance(p, c, seed).T)
                if got != c:
                    bad += 1
                    print(f"  mismatch p={p} counts={c.astuple()} seed={seed} got={got.astuple()}")
        dims = ", ".join(f"d={d}: {k}" for d, k in sorted(by_d.items()))
        print(f"p={p:<3d} {cases:6d} instances  {time.perf_counter() - t:6.1f}s  rational d profile {dims}")
    return bad


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--primes", type=int, nargs="+", default=[2, 3, 5, 7, 11])
    ap.add_argument("--n-max", type=int, default=12)
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()
    bad = sweep(SweepConfig(tuple(args.primes), args.n_max, args.seeds))
    print("all round trips exact" if not bad else f"{bad} mismatches")
    sys.exit(1 if bad else 0)


if __name__ == "__main__":
    main()

"""Compare the compiled and pure-Python kernels on the hot exhaustive checks.

Usage: python3 benchmarks/bench_kernels.py [--ground 10] [--repeat 3]
"""
import argparse
import random
import time

from matchforge import kernels
from matchforge.choice import guaranteed_enrollment, responsive
from matchforge.matroid import TransversalMatroid, independence_table
from matchforge.model import members


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def workloads(n, seed):
    rng = random.Random(seed)
    ground = (1 << n) - 1
    priority = list(range(n))
    rng.shuffle(priority)
    traits = {x: frozenset(t for t in "DHP" if rng.random() < 0.5) for x in range(n)}
    m = TransversalMatroid(ground, traits, {"D": 2, "H": 1, "P": 1}, ("D", "H", "P"))
    ge = guaranteed_enrollment(n // 2, priority, 1 << priority[-1], m).tabulate()
    r = responsive(n // 2, priority).tabulate()
    _, indep = independence_table(m)
    masks = list(range(1 << n))
    return {
        "path-independence (responsive)": lambda k: k.path_independence_witness(r.values, n),
        "substitutability (guaranteed-enrollment)": lambda k: k.substitutability_witness(ge.values, n),
        "size-monotonicity (guaranteed-enrollment)": lambda k: k.size_monotonicity_witness(ge.values, n),
        "rank table + I1-I3": lambda k: k.independence_witness(indep, k.rank_table(indep, n), n),
        "transversal rank, all subsets": lambda k: [k.transversal_rank(x, m._adj) for x in masks],
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--ground", type=int, default=10)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()
    found = kernels.backends()
    print(f"ground={args.ground} backends={sorted(found)} default={kernels.BACKEND}")
    print(f"{'workload':45} " + " ".join(f"{name:>10}" for name in found) + "   speedup")
    for label, run in workloads(args.ground, args.seed).items():
        times = {name: best_of(lambda: run(mod), args.repeat) for name, mod in found.items()}
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{label:45} " + " ".join(f"{t:10.4f}" for t in times.values()) + f"   {speed:6.1f}x")


if __name__ == "__main__":
    main()

"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 1000000] [--repeat 3]
"""
import argparse
import time

import numpy as np

from roundtax import kernels
from roundtax.distributions import load_profile_dir, sample_data_dir
from roundtax.money import RoundingRule
from roundtax.simulation import SimulationConfig, simulate


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=1_000_000, help="transactions / amounts per run")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = ["numpy"] + (["cython"] if kernels.compiled_kernels is not None else [])
    if len(backends) == 1:
        print("compiled kernels not built; timing the numpy fallback only")
    rule = RoundingRule.israel_2008()
    profiles = load_profile_dir(sample_data_dir(), share_tolerance=1.5e-3)
    config = SimulationConfig(args.n, 1, rule)
    amounts = np.random.default_rng(0).integers(0, 10**9, size=args.n)
    up = [0] + [int(r in rule.up_residues) for r in range(1, rule.grid)]

    print(f"{'task':<36} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    rows = [(f"simulate {p.name}", lambda b, p=p: simulate(p, config, backend=b)) for p in profiles]
    rows.append(("round_amounts", lambda b: kernels.get(b).round_amounts(amounts, rule.grid, up)))
    for label, fn in rows:
        t = [best_of(lambda: fn(b), args.repeat) for b in backends]
        speed = f"{t[0] / t[1]:8.1f}x" if len(t) == 2 else ""
        print(f"{label:<36} " + " ".join(f"{x:>9.3f}s" for x in t) + f"  {speed}")

    # both backends must agree bit for bit
    if len(backends) == 2:
        a, b = (simulate(profiles[0], config, backend=x) for x in backends)
        assert (a.mean_tax, a.std_error) == (b.mean_tax, b.std_error)
        print(f"results identical: mean {a.mean_tax:.6f} NIS, se {a.std_error:.6f}")


if __name__ == "__main__":
    main()

"""Contraction timings for catalog graphs at several block counts.

    python3 scripts/density_benchmark.py --graphs C6 Q3 torus_6_6 --q 2 3
"""

import argparse
import time

from normcheck import catalog
from normcheck.density import edge_deleted_densities_fast, plan_contraction, density
from normcheck.graphon import random_graphon


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graphs", nargs="+", default=["C6", "K_3_3", "Q3", "torus_6_6"])
    ap.add_argument("--q", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'graph':>10} {'q':>2} {'width':>5} {'density':>10} {'edge-del':>10}")
    for name in args.graphs:
        g = catalog.build(name)
        for q in args.q:
            h = random_graphon(q, 0.0, 1.0, seed=q)
            plan = plan_contraction(g, q)
            t_d = timed(lambda: density(g, h), args.repeat)
            t_e = timed(lambda: edge_deleted_densities_fast(g, h), args.repeat)
            print(f"{name:>10} {q:>2} {plan.induced_width:>5} {t_d * 1e3:>8.1f}ms {t_e * 1e3:>8.1f}ms")


if __name__ == "__main__":
    main()

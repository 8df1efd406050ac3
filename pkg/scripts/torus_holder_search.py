"""Extended Hölder falsifier run on the 6x6 toroidal grid.

Prints one line per restart with the best log(lhs/rhs) reached; a positive
value above the violation threshold is a certificate, written to --out.

    python3 -u scripts/torus_holder_search.py --restarts 60 --steps 400
"""

import argparse
import time

from normcheck import catalog
from normcheck.analyzer import SearchBudget, holder_ascent
from normcheck.certificates import dumps, verify


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graph", default="torus_6_6")
    ap.add_argument("--restarts", type=int, default=60)
    ap.add_argument("--steps", type=int, default=400)
    ap.add_argument("--q-values", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--value-cap", type=float, default=4.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="torus_holder.cert")
    args = ap.parse_args()

    g = catalog.build(args.graph)
    budget = SearchBudget(args.restarts, args.steps, tuple(args.q_values), args.value_cap, args.seed)
    best = float("-inf")
    t0 = time.perf_counter()
    for r in range(args.restarts):
        t1 = time.perf_counter()
        cert, ratio = holder_ascent(g, budget, r)
        best = max(best, ratio)
        print(f"restart {r:3d}  log_ratio {ratio: .6e}  best {best: .6e}  {time.perf_counter() - t1:6.1f}s", flush=True)
        if cert is not None:
            text = dumps(cert)
            with open(args.out, "w") as fh:
                fh.write(text)
            print(f"certificate found at restart {r}; verify: {verify(text).ok}; written to {args.out}")
            return 0
    print(f"no certificate in {args.restarts} restarts ({time.perf_counter() - t0:.0f}s); best log ratio {best:.6e}")
    return 3


if __name__ == "__main__":
    raise SystemExit(main())

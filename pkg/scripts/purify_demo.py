"""Build a purified (pure-DP) mechanism from a softmax over a net and audit it.

Usage: python scripts/purify_demo.py [--n 10] [--eps 1.0] [--alpha 0.1]
"""

import argparse
import math

from cdpacct import purify, renyi_divergence


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10, help="dataset size")
    ap.add_argument("--eps", type=float, default=1.0)
    ap.add_argument("--alpha", type=float, default=0.1, help="net radius")
    args = ap.parse_args()

    mech = purify((0, 1), {0: (0.0,), 1: (1.0,)}, args.n, args.eps, args.alpha, "linf")
    print(f"universe {{0,1}}, identity query, n={args.n}, eps={args.eps}, alpha={args.alpha}")
    print(f"net ({len(mech.net)} points): {[round(v[0], 3) for v in mech.net]}")
    print(f"loss sensitivity: {mech.delta_sensitivity}")

    datasets = [(0,) * (args.n - c) + (1,) * c for c in range(args.n + 1)]
    worst = 0.0
    for a, b in zip(datasets, datasets[1:]):
        da, db = mech.output_dist(a), mech.output_dist(b)
        worst = max(
            worst,
            renyi_divergence(da, db, math.inf),
            renyi_divergence(db, da, math.inf),
        )
    print(f"max divergence over neighbors: {worst:.6f} (guarantee {args.eps})")

    err_cap = 4.0 * args.alpha + (2.0 * mech.delta_sensitivity / args.eps) * math.log(
        len(mech.net)
    )
    worst_err = max(mech.expected_error(d) for d in datasets)
    print(f"worst expected error: {worst_err:.6f} (bound {err_cap:.6f})")


if __name__ == "__main__":
    main()

"""Exact mutual information of product randomized-response channels vs bounds.

Usage: python scripts/mi_bounds_demo.py [--eps 0.8] [--max-bits 6]
"""

import argparse
import itertools

from cdpacct import (
    FiniteChannel,
    OutcomeDist,
    ZcdpParams,
    mi_bound,
    mutual_information,
    product_channel,
    randomized_response,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=0.8)
    ap.add_argument("--max-bits", type=int, default=6)
    args = ap.parse_args()

    plus, minus = randomized_response(args.eps)
    bit = FiniteChannel((1, -1), {1: plus, -1: minus})
    params = ZcdpParams(0.0, 0.5 * args.eps**2)
    print(f"per-bit eps={args.eps}, rho={params.rho}")
    print(f"{'n':>3}  {'prior':>12}  {'mi (nats)':>12}  {'bound':>10}")
    for n in range(1, args.max_bits + 1):
        ch = product_channel([bit] * n)
        uni = OutcomeDist.uniform(ch.inputs)
        corr = OutcomeDist(((1,) * n, (-1,) * n), (0.5, 0.5))
        mi_u = mutual_information(uni, ch)
        mi_c = mutual_information(corr, ch)
        print(f"{n:>3}  {'independent':>12}  {mi_u:12.6f}  {mi_bound(params, n, 'independent'):10.4f}")
        print(f"{n:>3}  {'correlated':>12}  {mi_c:12.6f}  {mi_bound(params, n, 'general'):10.4f}")
    if args.max_bits >= 4:
        ch = product_channel([bit] * 4)
        states = list(itertools.product((1, -1), repeat=2))
        prior = OutcomeDist.uniform(tuple((a, a, b, b) for a, b in states))
        mi_b = mutual_information(prior, ch)
        print(f"{4:>3}  {'blocks (2,2)':>12}  {mi_b:12.6f}  {mi_bound(params, 4, (2, 2)):10.4f}")


if __name__ == "__main__":
    main()

"""Probability that the walk reports no change on no-change data, by sample size."""

import argparse

from horncp.simulation import zero_probability_curve

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--sizes", type=int, nargs="+", default=[2, 10, 50, 100, 300, 1000, 10000])
parser.add_argument("--replicates", type=int, default=10_000)
parser.add_argument("--workers", type=int, default=1)
args = parser.parse_args()

print("n,zero_rate")
for n, rate in zero_probability_curve(args.sizes, args.replicates, workers=args.workers):
    print(f"{n},{rate:.4f}")

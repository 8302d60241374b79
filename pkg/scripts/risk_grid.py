"""Mean losses and relative efficiency over shift size and change location."""

import argparse

from horncp.simulation import ScenarioConfig, monte_carlo_risk

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--sizes", type=int, nargs="+", default=[100, 200])
parser.add_argument("--replicates", type=int, default=10_000)
parser.add_argument("--workers", type=int, default=1)
parser.add_argument("--plug-in", action="store_true", help="estimate sigma per replicate")
args = parser.parse_args()

print("n,r,delta,mean_loss_mle,mean_loss_proposed,relative_efficiency,zero_rate")
for n in args.sizes:
    for r in (n // 4, n // 2, 3 * n // 4):
        for i in range(1, 11):
            cfg = ScenarioConfig(n=n, r=r, delta=i / 10, replicates=args.replicates,
                                 known_sigma=not args.plug_in)
            rep = monte_carlo_risk(cfg, workers=args.workers)
            print(f"{n},{r},{i / 10:.1f},{rep.mean_loss_mle:.6f},{rep.mean_loss_proposed:.6f},"
                  f"{rep.relative_efficiency:.4f},{rep.zero_rate:.4f}")

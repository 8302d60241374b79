"""Manifold point clouds of both estimators for a few scenarios (CSV only, no plots)."""

import argparse
from pathlib import Path

from horncp.cli import main

SCENARIOS = {
    "null": ["--r", "0"],
    "shift025": ["--r", "50", "--delta", "0.25"],
    "shift100": ["--r", "50", "--delta", "1.0"],
}

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--out", default="results")
parser.add_argument("--n", type=int, default=100)
parser.add_argument("--replicates", type=int, default=2_000)
args = parser.parse_args()

out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)
for name, flags in SCENARIOS.items():
    path = out / f"scatter_{name}.csv"
    main(["scatter", "--n", str(args.n), "--replicates", str(args.replicates), *flags,
          "--output", str(path)])
    print(path)

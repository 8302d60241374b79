"""Baseline vs walk error tables at n = 300 for the CUSUM and self-normalized scores."""

import argparse
import sys
from pathlib import Path

from horncp.cli import main

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--out", default="results")
parser.add_argument("--replicates", type=int, default=10_000)
parser.add_argument("--workers", type=int, default=1)
args = parser.parse_args()

out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)
for which in ("cusum", "sn"):
    path = out / f"table_{which}.csv"
    code = main(["table", which, "--replicates", str(args.replicates),
                 "--workers", str(args.workers), "--output", str(path)])
    if code:
        sys.exit(code)
    print(path.read_text())

"""Run the uniformity checks over a grid of trial shapes.

    python scripts/monte_carlo_propositions.py --trials 100000 --master-seed 7
    python scripts/monte_carlo_propositions.py --configs 12x3 24x4 6x2 --json out.json
"""

import argparse
import json
import time

from strongrand.threshold import TrialConfig
from strongrand.verify import run_suite


def shape(text):
    n, g = text.lower().split("x")
    return TrialConfig(int(n), int(g))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--configs", type=shape, nargs="+",
                        default=[shape(s) for s in ("12x2", "12x3", "12x4", "6x3", "4x4")])
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--significance", type=float, default=0.001)
    parser.add_argument("--master-seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--json", help="also write all reports to this file")
    args = parser.parse_args()

    reports = []
    for cfg in args.configs:
        start = time.perf_counter()
        report = run_suite(cfg, args.trials, args.significance, args.master_seed, workers=args.workers)
        print(report.to_text())
        print(f"({time.perf_counter() - start:.1f}s)\n")
        reports.append(report.to_dict())
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(reports, fh, indent=2)
    return 0 if all(r["passed"] for r in reports) else 1


if __name__ == "__main__":
    raise SystemExit(main())

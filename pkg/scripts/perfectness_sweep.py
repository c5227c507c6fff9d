"""Exhaustive or sampled perfectness check for every non-hyperstar class."""
import argparse
import json

import numpy as np

from hyperqss.css.constructions import build_scheme
from hyperqss.css.verify import rank_report, verify_perfect


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=11)
    ap.add_argument("--budget", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    report = {}
    for cid in range(5, 13):
        desc = build_scheme(cid, None, args.p)
        rep = verify_perfect(desc, budget=args.budget, rng=rng)
        report[f"G{cid}"] = {"mode": rep.mode, "ok": rep.ok, "rank_ok": rank_report(desc).ok,
                             "pvalues": rep.stats.get("pvalues", {})}
    print(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()

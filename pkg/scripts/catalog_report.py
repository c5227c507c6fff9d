"""Seven-participant catalog with class, rate and the share layout of the constructed scheme."""
import argparse
import csv
import sys

from hyperqss.access import catalog
from hyperqss.css.constructions import build_for_structure
from hyperqss.css.scheme import classical_rate
from hyperqss.css.verify import rank_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=11)
    ap.add_argument("--check", action="store_true", help="also run the exact rank check")
    args = ap.parse_args()

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["serial", "structure", "class", "stated_rate", "built_rate", "shares_per_participant", "rank_ok"])
    for row in catalog():
        if row.rate is None:
            out.writerow([row.serial, row.text, f"G{row.class_id}", row.rate_label, "", "", ""])
            continue
        desc = build_for_structure(row.structure, args.p)
        counts = " ".join(f"{x}:{c}" for x, c in desc.share_counts().items())
        ok = rank_report(desc).ok if args.check else ""
        out.writerow([row.serial, row.text, f"G{row.class_id}", row.rate_label, classical_rate(desc), counts, ok])


if __name__ == "__main__":
    main()

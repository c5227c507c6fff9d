"""Session abort rate under intercept-resend as a function of the decoy count."""
import argparse
import csv
import sys

import numpy as np

from hyperqss.css.constructions import build_scheme
from hyperqss.protocol import EveModel, SessionConfig, detection_reference, run_session


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--class", dest="cls", type=int, default=9)
    ap.add_argument("--p", type=int, default=11)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--n-info", type=int, default=3)
    ap.add_argument("--decoys", default="0,1,2,3,5,8,13,21")
    ap.add_argument("--phase", default="delivery", choices=["distribution", "circulation", "delivery"])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    desc = build_scheme(args.cls, None, args.p)
    eve = EveModel.intercept(phases=[args.phase])
    q = detection_reference(args.p)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["n_decoy", "abort_rate", "corrupted_rate", "single_hop_prediction"])
    for nd in (int(t) for t in args.decoys.split(",")):
        aborts = corrupted = 0
        for i in range(args.trials):
            seed = int(np.random.SeedSequence([args.seed, nd, i]).generate_state(1)[0])
            tr = run_session(SessionConfig(desc, n_info=args.n_info, n_decoy=nd, seed=seed), eve)
            aborts += tr.aborted is not None
            corrupted += tr.aborted is None and not tr.match
        out.writerow([nd, aborts / args.trials, corrupted / args.trials, 1 - (1 - q) ** nd])


if __name__ == "__main__":
    main()

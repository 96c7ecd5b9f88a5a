"""Coherent-group vs direct-link rate model over distance, with the crossing points.

The rate formula is a declared model (N**3 SNR gain, overhead haircut), not
measured data.
"""

import argparse
import csv
import sys

import numpy as np

from cohnet.linkbudget import LinkBudgetParams, OverheadParams, rate_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--coherence-ms", type=float, default=100.0)
    ap.add_argument("--training-ms", type=float, default=6.0)
    ap.add_argument("--guard-ms", type=float, default=1.0)
    ap.add_argument("--steps", type=int, default=200)
    args = ap.parse_args()

    d = np.geomspace(1e3, 1e5, args.steps)
    res = rate_curve(LinkBudgetParams(), d, args.n, args.coherence_ms * 1e-3,
                     OverheadParams(args.training_ms * 1e-3, args.guard_ms * 1e-3))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["D_m", "rate_coherent", "rate_p2p", "overhead_share", "infeasible"])
    for r in res:
        w.writerow([repr(float(r.distance)), repr(r.coherent_rate), repr(r.p2p_rate), repr(r.overhead_share),
                    int(r.infeasible)])
    diff = np.array([r.coherent_rate - r.p2p_rate for r in res])
    for i in np.flatnonzero(np.sign(diff[:-1]) != np.sign(diff[1:])):
        kind = "coherent overtakes" if diff[i + 1] > 0 else "direct overtakes"
        print(f"# {kind} near {res[i + 1].distance:.0f} m", file=sys.stderr)


if __name__ == "__main__":
    main()

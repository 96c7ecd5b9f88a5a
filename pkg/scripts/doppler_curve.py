"""Tolerable Doppler spread against inter-group distance for several overhead fractions."""

import argparse
import csv
import sys

import numpy as np

from cohnet.linkbudget import LinkBudgetParams, doppler_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fo", type=float, nargs="+", default=[0.1, 0.5])
    ap.add_argument("--dmin", type=float, default=1000.0)
    ap.add_argument("--dmax", type=float, default=10000.0)
    ap.add_argument("--steps", type=int, default=91)
    args = ap.parse_args()

    d = np.linspace(args.dmin, args.dmax, args.steps)
    curves = [doppler_curve(LinkBudgetParams(overhead_fraction=f), d) for f in args.fo]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["D_m"] + [f"S_Hz_Fo={f}" for f in args.fo])
    for i, di in enumerate(d):
        w.writerow([repr(float(di))] + [repr(float(c[i])) for c in curves])


if __name__ == "__main__":
    main()

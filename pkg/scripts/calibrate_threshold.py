"""Sweep the continuous-coverage threshold over an ``analyze`` matrix.csv.

Prints label counts for each threshold and, given ``--target-continuous``, the threshold whose
Continuous count is closest to the target (larger threshold wins ties).

    python scripts/calibrate_threshold.py out/matrix.csv --target-continuous 71
"""

import argparse
import csv
from collections import Counter

import numpy as np

from bugsna.activity import classify, detect_runs


def load_rows(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        return {row[0]: np.array([float(v) for v in row[1:]]) for row in reader}


def counts_at(rows, threshold):
    return Counter(classify(detect_runs(r), np.count_nonzero(r) / len(r), threshold).value
                   for r in rows.values())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("matrix")
    ap.add_argument("--target-continuous", type=int)
    ap.add_argument("--grid", type=int, default=41, help="thresholds between 0.5 and 1.0")
    args = ap.parse_args()

    rows = load_rows(args.matrix)
    best = None
    print("threshold  Continuous  Phaser  OneTime")
    for t in np.linspace(0.5, 1.0, args.grid):
        c = counts_at(rows, t)
        print(f"{t:9.4f}  {c['Continuous']:10d}  {c['Phaser']:6d}  {c['OneTime']:7d}")
        if args.target_continuous is not None:
            key = (abs(c["Continuous"] - args.target_continuous), -t)
            if best is None or key < best[0]:
                best = (key, t)
    if best is not None:
        print(f"closest to {args.target_continuous} Continuous: threshold {best[1]:.4f}")


if __name__ == "__main__":
    main()

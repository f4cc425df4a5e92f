#!/usr/bin/env python3
"""Write a labeled synthetic contour dataset in the manifest format.

Usage: make_synthetic_dataset.py OUTDIR [--per-class 30] [--seed 7] [--noise 0.02]
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from shapespace import synthetic


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir")
    ap.add_argument("--per-class", type=int, default=30)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--noise", type=float, default=0.02)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    corpus = synthetic.labeled_corpus(rng, per_class=args.per_class, noise=args.noise)

    out = Path(args.outdir)
    (out / "contours").mkdir(parents=True, exist_ok=True)
    rows = []
    for c in corpus:
        rel = f"contours/{c.id}.csv"
        with (out / rel).open("w") as fh:
            fh.writelines(f"{x},{y}\n" for x, y in c.points)
        rows.append((rel, c.label))
    with (out / "manifest.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["path", "label"])
        w.writerows(rows)
    print(f"wrote {len(rows)} contours under {out}")


if __name__ == "__main__":
    main()

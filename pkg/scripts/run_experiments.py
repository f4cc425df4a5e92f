#!/usr/bin/env python3
"""Run the full experiment grid against a contour manifest.

Four supervised configurations (both shape spaces, template features and
pairwise k-NN), the unsupervised k-medoids run on template features, and
the shift-search baseline.  Results land under OUTDIR/<config name>/.

Usage: run_experiments.py MANIFEST OUTDIR [--seed 0]
"""

import argparse
import json
import time
from pathlib import Path

from shapespace.cli import ExperimentConfig, cmd_classify, cmd_cluster


CONFIGS = {
    "s2_templates_fixed": dict(space="S2", method="fixed", features="templates"),
    "s1_templates_fixed": dict(space="S1", method="fixed", features="templates"),
    "s2_pairwise_fixed": dict(space="S2", method="fixed", features="pairwise"),
    "s1_pairwise_fixed": dict(space="S1", method="fixed", features="pairwise"),
    "s2_pairwise_reparam": dict(space="S2", method="reparam", features="pairwise"),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("manifest")
    ap.add_argument("outdir")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    summary = {}
    for name, overrides in CONFIGS.items():
        cfg = ExperimentConfig(
            manifest=args.manifest,
            seed=args.seed,
            outdir=str(Path(args.outdir) / name),
            **overrides,
        )
        t0 = time.perf_counter()
        payload = cmd_classify(cfg)
        elapsed = time.perf_counter() - t0
        summary[name] = {
            "Acc": payload["metrics"]["Acc"],
            "SDS": payload["metrics"]["SDS"],
            "seconds": round(elapsed, 2),
        }
        print(f"{name:24} Acc {payload['metrics']['Acc']}  SDS {payload['metrics']['SDS']}  ({elapsed:.1f}s)")

    cfg = ExperimentConfig(
        manifest=args.manifest,
        seed=args.seed,
        space="S2",
        method="fixed",
        features="templates",
        outdir=str(Path(args.outdir) / "kmedoids_templates"),
    )
    payload = cmd_cluster(cfg, k=3)
    summary["kmedoids_templates"] = {
        "asw": payload["asw"],
        "Acc": payload.get("metrics", {}).get("Acc"),
        "SDS": payload.get("metrics", {}).get("SDS"),
    }
    print(f"{'kmedoids_templates':24} Acc {summary['kmedoids_templates']['Acc']}  ASW {payload['asw']}")

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")


if __name__ == "__main__":
    main()

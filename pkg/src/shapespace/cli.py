"""Command-line experiment runner.

Subcommands: preprocess, classify, cluster, geodesic, bench.  Every run
writes its resolved configuration (seed included) next to the results so
reports are reproducible and self-documenting.

Exit codes: 0 success, 1 computation failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, grassmann, srvf, svg, synthetic, templates
from .contour import ContourError, NormalizedCurve, load_contours, normalize


class UsageError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    manifest: str = ""
    n: int = 295
    space: str = "S2"
    method: str = "fixed"
    features: str = "templates"  # templates | pairwise
    shift_step: int = 5
    knn_k: int = 1
    folds: int = 5
    ellipse_aspect: float = 4.0
    seed: int = 0
    outdir: str = "out"

    def validate(self) -> None:
        if self.n < 3:
            raise UsageError("n must be >= 3")
        if not 1 <= self.shift_step <= self.n:
            raise UsageError("shift_step must be in [1, n]")
        if self.space not in ("S1", "S2"):
            raise UsageError(f"unknown space {self.space!r}")
        if self.method not in ("fixed", "reparam"):
            raise UsageError(f"unknown method {self.method!r}")
        if self.features not in ("templates", "pairwise"):
            raise UsageError(f"unknown feature mode {self.features!r}")


def _load_config_file(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"config file not found: {p}")
    text = p.read_text()
    if p.suffix in (".yaml", ".yml"):
        import yaml

        return yaml.safe_load(text) or {}
    return json.loads(text)


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if getattr(args, "config", None):
        overrides = _load_config_file(args.config)
        unknown = set(overrides) - set(asdict(cfg))
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        for key, value in overrides.items():
            setattr(cfg, key, value)
    for key in asdict(cfg):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    cfg.validate()
    return cfg


def _outdir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.outdir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _round2(value):
    return None if value is None else round(value, 2)


def _metrics_payload(report: analysis.MetricsReport) -> dict:
    d = report.as_dict()
    return {
        "classes": d["classes"],
        "TPR": {k: _round2(v) for k, v in d["TPR"].items()},
        "P": {k: _round2(v) for k, v in d["P"].items()},
        "F1": {k: _round2(v) for k, v in d["F1"].items()},
        "Acc": _round2(d["Acc"]),
        "SDS": _round2(d["SDS"]),
    }


def _metrics_table(report: analysis.MetricsReport) -> str:
    d = _metrics_payload(report)
    lines = [f"{'':8}" + "".join(f"{c:>20}" for c in d["classes"])]
    for row in ("TPR", "P", "F1"):
        vals = [d[row][c] for c in d["classes"]]
        lines.append(f"{row:8}" + "".join(f"{'-' if v is None else v:>20}" for v in vals))
    lines.append(f"Acc {d['Acc']}  SDS {d['SDS']}")
    return "\n".join(lines) + "\n"


def _load_curves(cfg: ExperimentConfig) -> list[NormalizedCurve]:
    contours = load_contours(cfg.manifest)
    return [normalize(c, cfg.n) for c in contours]


def _write_distance_csv(path: Path, dm: analysis.DistanceMatrix) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(dm.ids)
        for row in dm.d:
            writer.writerow([f"{v:.12g}" for v in row])


def _write_features_csv(path: Path, feats: list[templates.FeatureVector]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cell_id", "d_circle", "d_ellipse", "label"])
        for f in feats:
            writer.writerow([f.cell_id, f"{f.d_circle:.12g}", f"{f.d_ellipse:.12g}", f.label or ""])


def cmd_classify(cfg: ExperimentConfig) -> dict:
    curves = _load_curves(cfg)
    labels = [c.label for c in curves]
    if any(l is None for l in labels):
        raise ContourError("classification needs a label for every contour")
    out = _outdir(cfg)
    if cfg.features == "templates":
        tset = templates.make_templates(cfg.n, cfg.ellipse_aspect)
        feats = templates.features_table(
            curves, tset, space=cfg.space, method=cfg.method, shift_step=cfg.shift_step
        )
        _write_features_csv(out / "features.csv", feats)
        X = np.array([[f.d_circle, f.d_ellipse] for f in feats])
        preds = analysis.lda_classify(X, labels, folds=cfg.folds, seed=cfg.seed)
        classifier = "LDA"
    else:
        dm = analysis.distance_matrix(
            curves, space=cfg.space, method=cfg.method, shift_step=cfg.shift_step
        )
        _write_distance_csv(out / "distances.csv", dm)
        preds = analysis.knn_classify(dm, labels, k=cfg.knn_k, folds=cfg.folds, seed=cfg.seed)
        classifier = f"{cfg.knn_k}-NN"
    cm = analysis.confusion_from_predictions(labels, preds)
    report = analysis.metrics(cm)
    payload = {
        "config": asdict(cfg),
        "classifier": classifier,
        "confusion": cm.n.tolist(),
        "metrics": _metrics_payload(report),
    }
    _write_json(out / "confusion.json", {"config": asdict(cfg), "confusion": cm.n.tolist()})
    _write_json(out / "metrics.json", payload)
    (out / "metrics.txt").write_text(
        f"classifier: {classifier} (seed {cfg.seed})\n" + _metrics_table(report)
    )
    return payload


def cmd_cluster(cfg: ExperimentConfig, k: int) -> dict:
    if k < 2:
        raise UsageError("k must be >= 2")
    curves = _load_curves(cfg)
    out = _outdir(cfg)
    if cfg.features == "templates":
        tset = templates.make_templates(cfg.n, cfg.ellipse_aspect)
        feats = templates.features_table(
            curves, tset, space=cfg.space, method=cfg.method, shift_step=cfg.shift_step
        )
        _write_features_csv(out / "features.csv", feats)
        X = np.array([[f.d_circle, f.d_ellipse] for f in feats])
        d = np.linalg.norm(X[:, None, :] - X[None, :, :], axis=2)
        dm = analysis.DistanceMatrix(ids=[c.id or str(i) for i, c in enumerate(curves)], d=d)
    else:
        dm = analysis.distance_matrix(
            curves, space=cfg.space, method=cfg.method, shift_step=cfg.shift_step
        )
        _write_distance_csv(out / "distances.csv", dm)
    cr = analysis.kmedoids(dm, k, seed=cfg.seed)
    payload = {
        "config": asdict(cfg),
        "k": k,
        "medoids": cr.medoids,
        "assignment": cr.assignment,
        "asw": None if cr.asw is None else round(cr.asw, 4),
    }
    labels = {c.id or str(i): c.label for i, c in enumerate(curves)}
    if all(v is not None for v in labels.values()):
        matched = analysis.cluster_confusion(cr, labels)
        if isinstance(matched, analysis.ConfusionMatrix):
            report = analysis.metrics(matched)
            payload["confusion"] = matched.n.tolist()
            payload["metrics"] = _metrics_payload(report)
        else:
            payload["contingency"] = matched.tolist()
    _write_json(out / "cluster.json", payload)
    return payload


def cmd_geodesic(cfg: ExperimentConfig, id_a: str, id_b: str, steps: int) -> Path:
    curves = {c.id: c for c in _load_curves(cfg)}
    if id_a not in curves or id_b not in curves:
        missing = [i for i in (id_a, id_b) if i not in curves]
        raise UsageError(f"unknown contour id(s): {missing}")
    a, b = curves[id_a], curves[id_b]
    if cfg.space == "S1":
        ga, gb = grassmann.to_grassmann(a), grassmann.to_grassmann(b)
        if cfg.method == "reparam":
            _, best_shift = grassmann.grassmann_distance_minshift(ga, gb, step=cfg.shift_step)
            gb = grassmann.shifted(gb, best_shift)
        d, _ = grassmann.grassmann_distance(ga, gb)
        frames = grassmann.grassmann_geodesic(ga, gb, steps)
    else:
        qa = srvf.prepare(a)
        qb = srvf.prepare(b)
        if cfg.method == "reparam":
            d, res = srvf.srvf_distance_elastic(qa, qb, shift_step=cfg.shift_step)
            qb = srvf.rotate(
                srvf.SrvfCurve(
                    q=np.roll(qb.q, -res.shift, axis=0), closure_residual=qb.closure_residual
                ),
                res.rotation,
            )
        else:
            res = srvf.align_rotation(qa, qb)
            qb = srvf.rotate(qb, res.rotation)
            d = srvf.sphere_distance(qa, qb)
        frames = srvf.srvf_geodesic(qa, qb, steps)
    out = _outdir(cfg)
    path = out / f"geodesic_{id_a}_{id_b}.svg"
    path.write_text(
        svg.render_frames(frames, annotation=f"{cfg.space} {cfg.method} d = {d:.4f}")
    )
    return path


def _bench_curves(n: int, count: int, seed: int) -> list[NormalizedCurve]:
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        c = synthetic.star_shaped(rng, m=max(2 * n, 200), aspect=rng.uniform(1.5, 3.0), cid=f"bench-{i}")
        out.append(normalize(c, n))
    return out


def cmd_bench(cfg: ExperimentConfig, sizes: list[int]) -> dict:
    """Empirical scaling of the fixed pairwise, template, and shift-search
    distance computations."""
    if len(sizes) < 3:
        raise UsageError("bench needs at least 3 sizes for a slope fit")
    sizes = sorted(sizes)
    curves = _bench_curves(cfg.n, sizes[-1], cfg.seed)
    reps = [srvf.prepare(c) for c in curves]
    tset = templates.make_templates(cfg.n, cfg.ellipse_aspect)

    pairwise_times, template_times = [], []
    for k in sizes:
        sub = reps[:k]
        best = math.inf
        for _ in range(3):
            t0 = time.perf_counter()
            for i in range(k):
                for j in range(i + 1, k):
                    srvf.srvf_distance_fixed(sub[i], sub[j])
            best = min(best, time.perf_counter() - t0)
        pairwise_times.append(best)
        sub_curves = curves[:k]
        best = math.inf
        for _ in range(3):
            t0 = time.perf_counter()
            for c in sub_curves:
                templates.template_features(c, tset, space="S2", method="fixed")
            best = min(best, time.perf_counter() - t0)
        template_times.append(best)

    logs = np.log(np.asarray(sizes, dtype=float))
    slope_pairwise = float(np.polyfit(logs, np.log(pairwise_times), 1)[0])
    slope_templates = float(np.polyfit(logs, np.log(template_times), 1)[0])

    # per-pair cost ratio of shift search vs fixed on identical inputs
    probe = reps[: min(40, len(reps))]
    pairs = [(i, j) for i in range(len(probe)) for j in range(i + 1, len(probe))][:200]
    t0 = time.perf_counter()
    for i, j in pairs:
        srvf.srvf_distance_fixed(probe[i], probe[j])
    t_fixed = time.perf_counter() - t0
    t0 = time.perf_counter()
    for i, j in pairs:
        srvf.srvf_distance_elastic(probe[i], probe[j], shift_step=cfg.shift_step)
    t_reparam = time.perf_counter() - t0
    ratio = t_reparam / max(t_fixed, 1e-12)

    expected_ratio = 0.5 * cfg.n / cfg.shift_step
    payload = {
        "config": asdict(cfg),
        "sizes": sizes,
        "pairwise_fixed_seconds": pairwise_times,
        "templates_seconds": template_times,
        "slope_pairwise_fixed": round(slope_pairwise, 3),
        "slope_templates": round(slope_templates, 3),
        "reparam_over_fixed_ratio": round(ratio, 2),
        "checks": {
            "pairwise_slope_in_2pm0.3": bool(abs(slope_pairwise - 2.0) <= 0.3),
            "templates_slope_in_1pm0.3": bool(abs(slope_templates - 1.0) <= 0.3),
            "reparam_ratio_ge_half_n_over_step": bool(ratio >= expected_ratio),
        },
    }
    out = _outdir(cfg)
    _write_json(out / "bench.json", payload)
    if not all(payload["checks"].values()):
        raise RuntimeError(f"bench scaling checks failed: {payload['checks']}")
    return payload


def cmd_preprocess(input_dir: str, output_dir: str) -> Path:
    """Convert a directory of contour files into the manifest contract.

    Layout: either <input_dir>/<label>/*.txt|csv or flat files (unlabeled).
    Accepts comma or whitespace separated x y pairs, one per line.
    """
    src = Path(input_dir)
    if not src.is_dir():
        raise UsageError(f"input directory not found: {src}")
    dst = Path(output_dir)
    (dst / "contours").mkdir(parents=True, exist_ok=True)
    rows = []
    candidates = sorted(p for p in src.rglob("*") if p.suffix.lower() in (".txt", ".csv", ".dat"))
    for path in candidates:
        pts = []
        for line in path.read_text().splitlines():
            line = line.strip().replace(";", " ").replace(",", " ")
            if not line or line[0].isalpha() or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 2:
                continue
            try:
                pts.append((float(parts[0]), float(parts[1])))
            except ValueError:
                continue
        if len(pts) < 3:
            continue
        label = path.parent.name if path.parent != src else ""
        name = f"{label}_{path.stem}.csv" if label else f"{path.stem}.csv"
        with (dst / "contours" / name).open("w") as fh:
            fh.writelines(f"{x},{y}\n" for x, y in pts)
        rows.append((f"contours/{name}", label))
    if not rows:
        raise UsageError(f"no usable contour files under {src}")
    manifest = dst / "manifest.csv"
    with manifest.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "label"])
        writer.writerows(rows)
    return manifest


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shapespace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--manifest", help="path,label manifest CSV")
        p.add_argument("--config", help="JSON/YAML config overriding defaults")
        p.add_argument("--n", type=int, help="samples per contour (default 295)")
        p.add_argument("--space", choices=["S1", "S2"])
        p.add_argument("--method", choices=["fixed", "reparam"])
        p.add_argument("--features", choices=["templates", "pairwise"])
        p.add_argument("--shift-step", dest="shift_step", type=int)
        p.add_argument("--knn-k", dest="knn_k", type=int)
        p.add_argument("--folds", type=int)
        p.add_argument("--ellipse-aspect", dest="ellipse_aspect", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--outdir")

    p = sub.add_parser("classify", help="supervised classification experiment")
    add_common(p)

    p = sub.add_parser("cluster", help="unsupervised k-medoids experiment")
    add_common(p)
    p.add_argument("--k", type=int, default=3)

    p = sub.add_parser("geodesic", help="render the geodesic between two contours")
    add_common(p)
    p.add_argument("id_a")
    p.add_argument("id_b")
    p.add_argument("--steps", type=int, default=5)

    p = sub.add_parser("bench", help="empirical cost scaling checks")
    add_common(p)
    p.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200])

    p = sub.add_parser("preprocess", help="convert a contour directory to the manifest format")
    p.add_argument("input_dir")
    p.add_argument("output_dir")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "preprocess":
            manifest = cmd_preprocess(args.input_dir, args.output_dir)
            print(f"wrote {manifest}")
            return 0
        cfg = resolve_config(args)
        if args.command != "bench" and not cfg.manifest:
            raise UsageError("--manifest is required")
        if args.command == "classify":
            payload = cmd_classify(cfg)
            print(json.dumps(payload["metrics"], indent=2))
        elif args.command == "cluster":
            payload = cmd_cluster(cfg, args.k)
            print(json.dumps({k: payload[k] for k in ("k", "asw") if k in payload}, indent=2))
        elif args.command == "geodesic":
            path = cmd_geodesic(cfg, args.id_a, args.id_b, args.steps)
            print(f"wrote {path}")
        elif args.command == "bench":
            payload = cmd_bench(cfg, args.sizes)
            print(json.dumps(payload["checks"], indent=2))
        return 0
    except (UsageError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContourError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # computation failure
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point: ``groundlearn [global flags] <command>``.

Exit codes: 0 success, 1 a verification check failed, 2 configuration
error, 3 capacity error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import CapacityError, ConfigError
from ..features import feature_map_from_json
from ..geometry import GeoRange, Lattice
from ..hamiltonian import build_heisenberg, ground_state, spectral_gap
from ..lasso import RegressionModel, predict
from ..paulinorm import pauli_decompose, random_local_terms, verify_inequality
from ..pauli import PauliString
from . import seeds
from .analysis import coupling_importance, locality_probe, near_far
from .config import ExperimentConfig, load_config
from .data import ExperimentData, gen_dataset, load_dataset, write_dataset
from .experiment import METRICS_HEADER, MetricsRecord, run_experiment, split_indices
from .io import read_json, write_csv, write_json
from .training import CV_HEADER, design_matrix, train_observable

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_CAPACITY = 0, 1, 2, 3


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    d = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=d, help="experiment config (JSON)")
    p.add_argument("--seed", type=int, default=d, help="master seed (overrides the config)")
    p.add_argument("--out", default=d, help="output directory (overrides the config)")
    p.add_argument("--workers", type=int, default=d, help="worker processes for independent jobs")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="groundlearn", parents=[_global_flags(False)],
                                     description="Learn ground-state properties of local Hamiltonians.")
    sub = parser.add_subparsers(dest="command", required=True)
    flags = _global_flags(True)
    sub.add_parser("gen-data", parents=[flags], help="sample instances, exact labels and shadows")
    p = sub.add_parser("train", parents=[flags], help="cross-validate and fit one model per observable")
    p.add_argument("--data", help="dataset directory written by gen-data (default: generate)")
    p = sub.add_parser("eval", parents=[flags], help="score trained models on the test split")
    p.add_argument("--data", help="dataset directory (default: <out>)")
    p.add_argument("--models", help="model directory (default: <out>/models)")
    sub.add_parser("sweep", parents=[flags], help="run the configured T / p / size sweep")
    sub.add_parser("verify-norm", parents=[flags], help="check the Pauli 1-norm inequality on random observables")
    p = sub.add_parser("importance", parents=[flags], help="per-coupling importance of trained models")
    p.add_argument("--models", help="model directory (default: train first)")
    sub.add_parser("probe-locality", parents=[flags], help="restricted-coupling error versus delta1")
    return parser


def _config(args) -> ExperimentConfig:
    if not args.config:
        raise ConfigError("--config is required")
    cfg = load_config(args.config)
    cfg = cfg.with_overrides(seed=args.seed, out=args.out, workers=args.workers)
    if not cfg.out:
        raise ConfigError("an output directory is required (--out or \"out\" in the config)")
    return cfg


def _dataset(cfg: ExperimentConfig, path: Optional[str]) -> ExperimentData:
    if path:
        if not (Path(path) / "dataset.json").exists():
            raise ConfigError(f"{path} holds no dataset.json")
        return load_dataset(path)
    return gen_dataset(cfg)


def cmd_gen_data(cfg: ExperimentConfig, args) -> int:
    data = gen_dataset(cfg)
    write_dataset(data, cfg.out)
    print(f"wrote {data.M} instances x {len(data.edges)} observables to {cfg.out}")
    return EXIT_OK


def _train_all(cfg: ExperimentConfig, data: ExperimentData):
    N = cfg.n_train()
    train, test = split_indices(data.M, N, cfg.seed)
    Y = data.labels(cfg.labels, None if cfg.labels == "exact" else cfg.T, cfg.median_of_means)
    results = []
    for e in range(len(data.edges)):
        results.append(train_observable(cfg, data.H, data.couplings[train], Y[train, e], e))
    return results, train, test


def _save_models(cfg: ExperimentConfig, data: ExperimentData, results, out: Path) -> None:
    cv_rows = []
    for res in results:
        i, j = data.edges[res.observable]
        write_json(out / "models" / f"observable_{res.observable:03d}.json", "model", {
            "observable": {"id": res.observable, "i": i, "j": j, "kind": "C_ij"},
            "model": res.model.to_json(),
            "feature_map": res.feature_map.to_json(),
            "train_error": res.train_error,
        })
        cv_rows += res.cv.table_rows(res.observable)
    write_csv(out / "cv_table.csv", "cv", CV_HEADER, cv_rows)


def cmd_train(cfg: ExperimentConfig, args) -> int:
    data = _dataset(cfg, args.data)
    results, train, _ = _train_all(cfg, data)
    _save_models(cfg, data, results, Path(cfg.out))
    print(f"trained {len(results)} models on {len(train)} instances")
    return EXIT_OK


def _load_models(path: Path):
    files = sorted(path.glob("observable_*.json"))
    if not files:
        raise ConfigError(f"no models found in {path}")
    out = []
    for f in files:
        doc = read_json(f)
        fm = feature_map_from_json(doc["feature_map"])
        out.append((doc["observable"]["id"], RegressionModel.from_json(doc["model"]), fm))
    return out


def cmd_eval(cfg: ExperimentConfig, args) -> int:
    out = Path(cfg.out)
    data = _dataset(cfg, args.data or (str(out) if (out / "dataset.json").exists() else None))
    models = _load_models(Path(args.models) if args.models else out / "models")
    train, test = split_indices(data.M, cfg.n_train(), cfg.seed)
    records, preds, errs = [], [], []
    for e, model, fm in models:
        p = np.asarray(predict(model, design_matrix(fm, data.couplings[test])))
        err = p - data.exact[test, e]
        errs.append(err)
        i, j = data.edges[e]
        hyper = ";".join(f"{k}={v!r}" for k, v in model.hyper.items())
        records.append(MetricsRecord("eval", None, str(e), i, j, float(np.sqrt(np.mean(err**2))),
                                     float("nan"), hyper, len(train), len(test)))
        preds += [["", int(k), e, float(pk), float(data.exact[k, e])] for k, pk in zip(test, p)]
    total = float(np.sqrt(np.mean(np.concatenate(errs) ** 2)))
    records.insert(0, MetricsRecord("eval", None, "all", None, None, total, float("nan"), "", len(train), len(test)))
    write_csv(out / "eval_metrics.csv", "metrics", METRICS_HEADER, (r.row() for r in records))
    write_csv(out / "eval_predictions.csv", "predictions",
              ["value", "instance_id", "observable_id", "predicted", "exact"], preds)
    print(f"test RMSE {total:.6f} over {len(test)} instances x {len(models)} observables")
    return EXIT_OK


def cmd_sweep(cfg: ExperimentConfig, args) -> int:
    recs = run_experiment(cfg)
    for r in recs:
        if r.observable == "all":
            print(f"{r.sweep}={r.value}: rmse {r.rmse:.6f} (N={r.n_train}, test={r.n_test})")
    return EXIT_OK


def cmd_verify_norm(cfg: ExperimentConfig, args) -> int:
    spec = cfg.extra.get("norm", {})
    trials = int(spec.get("trials", 200))
    lattices = [Lattice(tuple(s)) for s in spec.get("lattices", [list(cfg.lattice.sides)])]
    max_terms = int(spec.get("max_terms", 5))
    if trials < 1 or max_terms < 1:
        raise ConfigError("norm.trials and norm.max_terms must be positive")
    rows, reports, passed = [], [], 0
    for t in range(trials):
        gen = seeds.stream(cfg.seed, seeds.OBSERVABLE, t)
        lat = lattices[t % len(lattices)]
        rng = GeoRange(tuple(int(gen.integers(1, min(s, 3) + 1)) for s in lat.sides))
        terms = random_local_terms(lat, rng, gen, int(gen.integers(1, max_terms + 1)))
        O = pauli_decompose(terms)
        rep = verify_inequality(O, lat, rng)
        passed += rep.passed
        rows.append([t, "x".join(map(str, lat.sides)), "x".join(map(str, rng.per_axis)), len(terms),
                     rep.sum_abs_alpha, rep.trace_analytic, rep.trace_dense, rep.spectral_norm,
                     rep.bound_constant, rep.passed])
        reports.append({"trial": t, "lattice": list(lat.sides), "range": list(rng.per_axis), **rep.to_json()})
    out = Path(cfg.out)
    write_csv(out / "norm_report.csv", "norm",
              ["trial", "lattice", "range", "terms", "sum_abs_alpha", "trace_analytic", "trace_dense",
               "spectral_norm", "bound_constant", "pass"], rows)
    write_json(out / "norm_reports.json", "norm", {"reports": reports})
    write_json(out / "norm_summary.json", "norm", {"trials": trials, "passed": passed, "pass": passed == trials})
    print(f"{passed}/{trials} observables satisfy every check")
    return EXIT_OK if passed == trials else EXIT_FAILED


def cmd_importance(cfg: ExperimentConfig, args) -> int:
    out = Path(cfg.out)
    H = build_heisenberg(cfg.lattice, normalized=cfg.normalized)
    if args.models:
        models = _load_models(Path(args.models))
    else:
        data = gen_dataset(cfg)
        results, _, _ = _train_all(cfg, data)
        models = [(r.observable, r.model, r.feature_map) for r in results]
    radius = float(cfg.extra.get("importance", {}).get("radius", cfg.features.delta1[0]))
    edges = cfg.lattice.edges()
    rows, summary = [], []
    for e, model, fm in models:
        imp = coupling_importance(model, fm, H.m)
        ti, tj = edges[e]
        near, far = near_far(H, imp, (ti, tj), radius)
        summary.append([e, ti, tj, near, far, near > far])
        for c in range(H.m):
            i, j = H.term_of(c).support
            rows.append([e, ti, tj, c, i, j, float(imp[c])])
    write_csv(out / "importance.csv", "importance",
              ["target_id", "target_i", "target_j", "edge", "i", "j", "importance"], rows)
    write_csv(out / "importance_summary.csv", "importance",
              ["target_id", "target_i", "target_j", "near_mean", "far_mean", "near_exceeds_far"], summary)
    print(f"near > far for {sum(s[-1] for s in summary)}/{len(summary)} targets")
    return EXIT_OK


def cmd_probe_locality(cfg: ExperimentConfig, args) -> int:
    spec = cfg.extra.get("probe", {})
    lat = cfg.lattice
    H = build_heisenberg(lat, normalized=cfg.normalized)
    instances = int(spec.get("instances", 5))
    grid = [float(d) for d in spec.get("delta1", list(range(lat.diameter())))]
    labels = spec.get("paulis")
    if labels is None:
        mid = lat.n // 2
        labels = [f"Z{mid - 1} Z{mid}"]
    try:
        paulis = [PauliString.parse(s) for s in labels]
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"probe.paulis: {exc}") from None
    min_gap = float(spec.get("min_gap", 0.0))
    rows = []
    k = 0
    for inst in range(instances):
        while True:
            x = seeds.stream(cfg.seed, seeds.INSTANCE, k).uniform(0.0, 2.0, size=H.m)
            k += 1
            if min_gap <= 0 or spectral_gap(H, x) >= min_gap:
                break
        gs = ground_state(H, x)
        for P in paulis:
            for r in locality_probe(H, P, x, grid, full_state=gs):
                rows.append([inst, P.label(), r.delta1, r.ip_size, r.full, r.restricted, r.err])
    write_csv(Path(cfg.out) / "locality.csv", "locality",
              ["instance_id", "pauli", "delta1", "ip_size", "full", "restricted", "err"], rows)
    print(f"probed {instances} instances x {len(paulis)} strings over {len(grid)} radii")
    return EXIT_OK


COMMANDS = {
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "verify-norm": cmd_verify_norm,
    "importance": cmd_importance,
    "probe-locality": cmd_probe_locality,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())

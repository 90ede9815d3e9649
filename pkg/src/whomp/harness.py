"""Experiment runner: repeated-trial studies, downstream models, reports.

Every run is a pure function of (config, seed): repetition r and method k
draw from the child stream (seed, r, k), results are keyed and reduced in
key order, and tables serialize with round-trip float text, so a rerun
reproduces the output byte for byte.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .core import Dataset, Rng, as_points, dataset_from_csv
from .graphs import sbm_generate, spectral_embedding, spectrum_report
from .metrics import homogeneity_report, normalized_entropy
from .partitioners import METHODS, PocockSimonConfig, make_partition
from .properties import run_property_suite
from .synthetic import GMM_MEANS, gmm_sample

EXPERIMENT_KINDS = (
    "gmm_w2",
    "gmm_classify",
    "gmm_regress",
    "csv_w2",
    "embedding_entropy",
    "sbm_spectra",
    "property_suite",
)

DEFAULT_METHODS = ("random", "covariate_adaptive", "whomp_random", "whomp_matching")

# Reporting conventions that the source material leaves open; echoed into
# every run manifest so numbers are comparable across runs.
INTERPRETATIONS = {
    "second_moment_spread": "variance across subgroups of the scalar within-subgroup variance",
    "subgroup_distance": "exact W2 between the subgroup and the full sample, uniform weights",
    "aggregate_std": "sample standard deviation (ddof=1) across repetitions",
    "per_trial_spectrum_std": "sample standard deviation (ddof=1) across subgraphs within a trial",
    "laplacian": "unnormalized L = D - A",
    "minimization_defaults": "2 quantile bins per covariate, assignment bias 0.75, unit weights",
    "logistic_trainer": "multinomial softmax, full-batch gradient descent, 500 steps, rate 0.1",
    "linear_trainer": "ordinary least squares by normal equations, ridge 1e-8 fallback",
    "balance_policy": "group sizes differ by at most one when the group count does not divide N",
}


# Default repetition counts per study kind (tabular 100, table subsampling
# 500, labeled embedding 50, graphs 100).
DEFAULT_REPETITIONS = {
    "gmm_w2": 100,
    "gmm_classify": 100,
    "gmm_regress": 100,
    "csv_w2": 500,
    "embedding_entropy": 50,
    "sbm_spectra": 100,
    "property_suite": 1,
}


@dataclass
class ExperimentConfig:
    kind: str
    methods: tuple[str, ...] = DEFAULT_METHODS
    subgroup_counts: tuple[int, ...] = (2, 4, 6)
    repetitions: int | None = None
    seed: int = 0
    params: dict = field(default_factory=dict)
    out_dir: str | None = None

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.repetitions is None:
            self.repetitions = DEFAULT_REPETITIONS[self.kind]
        self.methods = tuple(self.methods)
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        self.subgroup_counts = tuple(int(m) for m in self.subgroup_counts)
        if any(m < 2 for m in self.subgroup_counts):
            raise ValueError("subgroup counts must be >= 2")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls(**raw)

    def to_dict(self) -> dict:
        return asdict(self)


class TrialTable:
    """Rows keyed by (method, m, repetition) with aggregate mean/std rows."""

    def __init__(self, metric_names: list[str]):
        self.metric_names = list(metric_names)
        self.rows: list[dict] = []

    def add_row(self, method: str, m: int, repetition: int, metrics: dict) -> None:
        row = {"method": method, "m": int(m), "repetition": int(repetition)}
        for name in self.metric_names:
            row[name] = float(metrics[name])
        self.rows.append(row)

    def cell(self, method: str, m: int, metric: str) -> np.ndarray:
        return np.asarray([
            r[metric] for r in self.rows if r["method"] == method and r["m"] == m
        ])

    def aggregates(self) -> list[dict]:
        out = []
        seen = []
        for r in self.rows:
            key = (r["method"], r["m"])
            if key not in seen:
                seen.append(key)
        for method, m in seen:
            agg = {"method": method, "m": m}
            for name in self.metric_names:
                values = self.cell(method, m, name)
                agg[f"{name}_mean"] = float(values.mean())
                agg[f"{name}_std"] = (
                    float(values.std(ddof=1)) if len(values) > 1 else 0.0
                )
            out.append(agg)
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["method", "m", "repetition"] + self.metric_names)
            for r in self.rows:
                writer.writerow(
                    [r["method"], r["m"], r["repetition"]]
                    + [repr(r[name]) for name in self.metric_names]
                )

    def aggregates_to_csv(self, path) -> None:
        aggs = self.aggregates()
        if not aggs:
            return
        names = list(aggs[0].keys())
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(names)
            for a in aggs:
                writer.writerow([
                    a[n] if isinstance(a[n], (str, int)) else repr(a[n]) for n in names
                ])


def _thread_count() -> int:
    raw = os.environ.get("WHOMP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_repetitions(fn, reps: int):
    """Run fn(r) for r in range(reps), optionally threaded, results in order."""
    workers = _thread_count()
    if workers == 1:
        return [fn(r) for r in range(reps)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(reps)))


def _partition_for(points, method, m, stream: Rng):
    return make_partition(points, method, m, rng=stream)


def softmax_regression(train_x, train_y, num_classes, steps=500, rate=0.1):
    """Multinomial logistic regression by full-batch gradient descent."""
    n, d = train_x.shape
    x = np.concatenate([train_x, np.ones((n, 1))], axis=1)
    w = np.zeros((d + 1, num_classes))
    onehot = np.zeros((n, num_classes))
    onehot[np.arange(n), train_y] = 1.0
    for _ in range(steps):
        logits = x @ w
        logits -= logits.max(axis=1, keepdims=True)
        p = np.exp(logits)
        p /= p.sum(axis=1, keepdims=True)
        w -= rate * (x.T @ (p - onehot)) / n
    return w


def softmax_predict(w, test_x):
    x = np.concatenate([test_x, np.ones((test_x.shape[0], 1))], axis=1)
    return np.argmax(x @ w, axis=1)


def linear_regression(train_x, train_y):
    """OLS via normal equations; tiny ridge fallback on singular systems.

    Returns (weights, used_ridge).
    """
    x = np.concatenate([train_x, np.ones((train_x.shape[0], 1))], axis=1)
    gram = x.T @ x
    rhs = x.T @ train_y
    try:
        w = np.linalg.solve(gram, rhs)
        if not np.all(np.isfinite(w)):
            raise np.linalg.LinAlgError
        return w, False
    except np.linalg.LinAlgError:
        w = np.linalg.solve(gram + 1e-8 * np.eye(gram.shape[0]), rhs)
        return w, True


def _homogeneity_metrics(points, part) -> dict:
    rep = homogeneity_report(points, part)
    return {
        "mean_w2": rep.mean_w2,
        "sum_w2_sq": rep.sum_w2_sq,
        "var_of_means": rep.var_of_means,
        "mean_of_vars": rep.mean_of_vars,
        "var_of_vars": rep.var_of_vars,
        "total_var": rep.total_var,
    }

W2_METRICS = ["mean_w2", "sum_w2_sq", "var_of_means", "mean_of_vars", "var_of_vars", "total_var"]


def run_gmm_w2(config: ExperimentConfig) -> TrialTable:
    """Repeated mixture draws; per method and subgroup count, the transport
    homogeneity diagnostics of the produced partition."""
    table = TrialTable(W2_METRICS)
    root = Rng(config.seed)
    n_per = tuple(config.params.get("n_per", (20, 20, 20)))
    cov = float(config.params.get("cov_scale", 3.0))

    def one_rep(r):
        stream = root.child(r)
        points, _ = gmm_sample(stream.child(0), n_per=n_per, cov_scale=cov)
        rows = []
        for k, method in enumerate(config.methods):
            for m in config.subgroup_counts:
                part = _partition_for(points, method, m, stream.child(1 + k, m))
                rows.append((method, m, r, _homogeneity_metrics(points, part)))
        return rows

    for rows in _map_repetitions(one_rep, config.repetitions):
        for method, m, r, metrics in rows:
            table.add_row(method, m, r, metrics)
    return table


def run_gmm_downstream(config: ExperimentConfig) -> TrialTable:
    """Train on one random subgroup, evaluate on another.

    gmm_classify fits the softmax model on the mixture-component labels and
    records test accuracy; gmm_regress predicts one coordinate from the
    others by least squares and records test MSE.
    """
    classify = config.kind == "gmm_classify"
    metric = "accuracy" if classify else "mse"
    table = TrialTable([metric, "ridge_fallback"])
    root = Rng(config.seed)
    n_per = tuple(config.params.get("n_per", (20, 20, 20)))
    cov = float(config.params.get("cov_scale", 4.0))
    target_col = int(config.params.get("target_column", -1))

    def one_rep(r):
        stream = root.child(r)
        points, labels = gmm_sample(stream.child(0), n_per=n_per, cov_scale=cov)
        rows = []
        for k, method in enumerate(config.methods):
            for m in config.subgroup_counts:
                part = _partition_for(points, method, m, stream.child(1 + k, m))
                pick = stream.child(90_000 + k, m).choice(m, size=2, replace=False)
                groups = part.groups()
                train, test = groups[pick[0]], groups[pick[1]]
                ridge = 0.0
                if classify:
                    w = softmax_regression(points[train], labels[train], len(n_per))
                    pred = softmax_predict(w, points[test])
                    value = float(np.mean(pred == labels[test]))
                else:
                    cols = [c for c in range(points.shape[1])
                            if c != target_col % points.shape[1]]
                    tcol = target_col % points.shape[1]
                    w, used = linear_regression(points[np.ix_(train, cols)], points[train, tcol])
                    ridge = float(used)
                    x = np.concatenate([
                        points[np.ix_(test, cols)], np.ones((len(test), 1))
                    ], axis=1)
                    value = float(np.mean((x @ w - points[test, tcol]) ** 2))
                rows.append((method, m, r, {metric: value, "ridge_fallback": ridge}))
        return rows

    for rows in _map_repetitions(one_rep, config.repetitions):
        for method, m, r, metrics in rows:
            table.add_row(method, m, r, metrics)
    return table


def _load_table_points(config: ExperimentConfig):
    path = config.params["input_csv"]
    has_header = bool(config.params.get("has_header", False))
    label_column = config.params.get("label_column")
    return dataset_from_csv(path, has_header=has_header, label_column=label_column)


def run_csv_w2(config: ExperimentConfig) -> TrialTable:
    """Repeated subsampling of an input table; homogeneity diagnostics per
    method and subgroup count on each subsample."""
    data = _load_table_points(config)
    sample_size = int(config.params.get("sample_size", 60))
    if data.n < sample_size:
        raise ValueError(f"need at least {sample_size} rows, file has {data.n}")
    table = TrialTable(W2_METRICS)
    root = Rng(config.seed)

    def one_rep(r):
        stream = root.child(r)
        pick = stream.child(0).choice(data.n, size=sample_size, replace=False)
        points = data.points[np.sort(pick)]
        rows = []
        for k, method in enumerate(config.methods):
            for m in config.subgroup_counts:
                part = _partition_for(points, method, m, stream.child(1 + k, m))
                rows.append((method, m, r, _homogeneity_metrics(points, part)))
        return rows

    for rows in _map_repetitions(one_rep, config.repetitions):
        for method, m, r, metrics in rows:
            table.add_row(method, m, r, metrics)
    return table


def run_embedding_entropy(config: ExperimentConfig) -> TrialTable:
    """Partition a labeled low-dimensional embedding; record the mean
    normalized label entropy across subgroups."""
    data = _load_table_points(config)
    if data.labels is None:
        raise ValueError("embedding_entropy needs a label column")
    num_classes = int(config.params.get("num_classes", int(data.labels.max()) + 1))
    sample_size = config.params.get("sample_size")
    table = TrialTable(["mean_entropy", "min_entropy"])
    root = Rng(config.seed)

    def one_rep(r):
        stream = root.child(r)
        if sample_size:
            pick = np.sort(stream.child(0).choice(data.n, size=int(sample_size), replace=False))
            points, labels = data.points[pick], data.labels[pick]
        else:
            points, labels = data.points, data.labels
        rows = []
        for k, method in enumerate(config.methods):
            for m in config.subgroup_counts:
                part = _partition_for(points, method, m, stream.child(1 + k, m))
                ent = normalized_entropy(labels, part, num_classes)
                rows.append((method, m, r, {
                    "mean_entropy": float(ent.mean()),
                    "min_entropy": float(ent.min()),
                }))
        return rows

    for rows in _map_repetitions(one_rep, config.repetitions):
        for method, m, r, metrics in rows:
            table.add_row(method, m, r, metrics)
    return table


def run_sbm_spectra(config: ExperimentConfig) -> TrialTable:
    """Block-model graphs: embed, partition the embedded nodes, and compare
    subgraph Laplacian spectra with the full spectrum.

    mean_w2 is the per-trial mean over subgraphs; std_w2 the per-trial
    standard deviation over subgraphs.
    """
    sizes = tuple(config.params.get("block_sizes", (10, 20, 30)))
    within = float(config.params.get("p_within", 0.6))
    between = float(config.params.get("p_between", 0.2))
    dims = int(config.params.get("embed_dims", 2))
    probs = np.full((len(sizes), len(sizes)), between) + (within - between) * np.eye(len(sizes))
    table = TrialTable(["mean_w2", "std_w2"])
    root = Rng(config.seed)

    def one_rep(r):
        stream = root.child(r)
        graph = sbm_generate(sizes, probs, rng=stream.child(0))
        embedding = spectral_embedding(graph, dims)
        rows = []
        for k, method in enumerate(config.methods):
            for m in config.subgroup_counts:
                part = _partition_for(embedding, method, m, stream.child(1 + k, m))
                rep = spectrum_report(graph, part)
                rows.append((method, m, r, {"mean_w2": rep.mean_w2, "std_w2": rep.std_w2}))
        return rows

    for rows in _map_repetitions(one_rep, config.repetitions):
        for method, m, r, metrics in rows:
            table.add_row(method, m, r, metrics)
    return table


def directional_checks(config: ExperimentConfig, table: TrialTable) -> dict:
    """Directional comparisons of the transport methods against the random
    baseline (means over repetitions).  Informational: echoed in reports."""
    out = {}
    if "random" not in config.methods:
        return out
    better_small = {"gmm_w2": "mean_w2", "csv_w2": "mean_w2", "gmm_regress": "mse",
                    "sbm_spectra": "std_w2"}
    better_large = {"gmm_classify": "accuracy", "embedding_entropy": "mean_entropy"}
    metric = better_small.get(config.kind) or better_large.get(config.kind)
    if metric is None:
        return out
    larger_is_better = config.kind in better_large
    for method in config.methods:
        if method in ("random", "covariate_adaptive"):
            continue
        for m in config.subgroup_counts:
            ours = table.cell(method, m, metric)
            base = table.cell("random", m, metric)
            if not len(ours) or not len(base):
                continue
            gap = float(ours.mean() - base.mean())
            ok = gap >= 0 if larger_is_better else gap <= 0
            out[f"{method}_vs_random_m{m}_{metric}"] = {
                "difference_of_means": gap,
                "improves_on_random": bool(ok),
            }
    return out


RUNNERS = {
    "gmm_w2": run_gmm_w2,
    "gmm_classify": run_gmm_downstream,
    "gmm_regress": run_gmm_downstream,
    "csv_w2": run_csv_w2,
    "embedding_entropy": run_embedding_entropy,
    "sbm_spectra": run_sbm_spectra,
}


def run_experiment(config: ExperimentConfig) -> dict:
    """Execute one experiment; write table, aggregates, and manifest when
    config.out_dir is set.  Returns a result summary dictionary."""
    started = time.perf_counter()
    if config.kind == "property_suite":
        scale = config.params.get("scale", "default")
        results = run_property_suite(scale=scale)
        summary = {
            "kind": config.kind,
            "passed": all(r.passed for r in results),
            "results": [
                {"name": r.name, "passed": r.passed, "seconds": round(r.seconds, 3),
                 "detail": r.detail}
                for r in results
            ],
        }
        table = None
    else:
        table = RUNNERS[config.kind](config)
        summary = {
            "kind": config.kind,
            "aggregates": table.aggregates(),
            "directional_checks": directional_checks(config, table),
        }
    summary["elapsed_seconds"] = round(time.perf_counter() - started, 3)
    if config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
        manifest = {
            "config": config.to_dict(),
            "version": __version__,
            "kernel_backend": BACKEND,
            "interpretations": INTERPRETATIONS,
            "pocock_simon_defaults": asdict(PocockSimonConfig()),
        }
        with open(os.path.join(config.out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
        persisted = {k: v for k, v in summary.items() if k != "elapsed_seconds"}
        with open(os.path.join(config.out_dir, "summary.json"), "w", encoding="utf-8") as fh:
            json.dump(persisted, fh, indent=2, sort_keys=True)
        if table is not None:
            table.to_csv(os.path.join(config.out_dir, "rows.csv"))
            table.aggregates_to_csv(os.path.join(config.out_dir, "aggregates.csv"))
    return summary

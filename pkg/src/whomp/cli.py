"""Command-line interface.

Subcommands: partition (split a CSV), evaluate (diagnostics for an existing
partition), experiment (run a JSON-configured study), selftest (property
suite).  Exit codes: 0 success, 1 validation error, 2 property failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .core import dataset_from_csv, partition_from_csv, partition_to_csv, partition_validate
from .harness import ExperimentConfig, run_experiment
from .metrics import homogeneity_report, normalized_entropy
from .partitioners import METHODS, make_partition
from .properties import run_property_suite


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="whomp")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition", help="split a numeric CSV into subgroups")
    p.add_argument("--input", required=True)
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--groups", required=True, type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--has-header", action="store_true")
    p.add_argument("--label-column", default=None)
    p.add_argument("--manifest", default=None,
                   help="optional JSON path echoing method, seed, and config")

    e = sub.add_parser("evaluate", help="diagnostics for a partition CSV")
    e.add_argument("--input", required=True)
    e.add_argument("--partition", required=True)
    e.add_argument("--has-header", action="store_true")
    e.add_argument("--label-column", default=None)
    e.add_argument("--out-json", default=None)
    e.add_argument("--out-csv", default=None)

    x = sub.add_parser("experiment", help="run a JSON-configured experiment")
    x.add_argument("--config", required=True)

    s = sub.add_parser("selftest", help="run the property suite")
    s.add_argument("--scale", choices=("quick", "default"), default="quick")
    s.add_argument("--inject-bug", action="store_true",
                   help="negative control: corrupt the transport distance")
    return parser


def _cmd_partition(args) -> int:
    data = dataset_from_csv(args.input, has_header=args.has_header,
                            label_column=args.label_column)
    part = make_partition(data.points, args.method, args.groups, rng=args.seed)
    partition_validate(part, data.n, balanced=True)
    partition_to_csv(part, args.out, ids=data.ids)
    if args.manifest:
        with open(args.manifest, "w", encoding="utf-8") as fh:
            json.dump({
                "method": args.method,
                "groups": args.groups,
                "seed": args.seed,
                "input": args.input,
                "n": data.n,
                "dim": data.dim,
            }, fh, indent=2, sort_keys=True)
    print(f"wrote {args.out}: {part.num_groups} groups over {data.n} rows")
    return 0


def _cmd_evaluate(args) -> int:
    data = dataset_from_csv(args.input, has_header=args.has_header,
                            label_column=args.label_column)
    part = partition_from_csv(args.partition)
    partition_validate(part, data.n, balanced=False)
    report = homogeneity_report(data.points, part)
    payload = report.to_dict()
    if data.labels is not None:
        classes = int(data.labels.max()) + 1
        payload["normalized_entropy"] = [
            float(x) for x in normalized_entropy(data.labels, part, classes)
        ]
    if args.out_json:
        with open(args.out_json, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
    if args.out_csv:
        with open(args.out_csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row_kind", "group", "w2_to_sample", "group_size"])
            sizes = part.sizes
            for g, dist in enumerate(report.per_subgroup_w2):
                writer.writerow(["subgroup", g, repr(float(dist)), int(sizes[g])])
            writer.writerow(["summary", "", repr(report.mean_w2), data.n])
    print(json.dumps({k: payload[k] for k in ("mean_w2", "sum_w2_sq", "var_of_means",
                                              "mean_of_vars", "var_of_vars", "total_var")},
                     indent=2, sort_keys=True))
    return 0


def _cmd_experiment(args) -> int:
    config = ExperimentConfig.from_json(args.config)
    summary = run_experiment(config)
    print(json.dumps(summary, indent=2, sort_keys=True, default=str))
    if config.kind == "property_suite" and not summary["passed"]:
        return 2
    return 0


def _cmd_selftest(args) -> int:
    results = run_property_suite(scale="quick" if args.scale == "quick" else "default",
                                 inject_bug=args.inject_bug)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 2 if failed else 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "partition":
            return _cmd_partition(args)
        if args.command == "evaluate":
            return _cmd_evaluate(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        if args.command == "selftest":
            return _cmd_selftest(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line surface: train, sweep, verify, noisify, report.

Exit codes: 0 success, 1 check or run failure, 2 usage/config error.  The
FRACLOSS_OUTPUT_DIR environment variable supplies a default output directory
when neither the flag nor the config sets one.
"""

import argparse
import json
import os
import sys

import numpy as np
import yaml

from . import data as data_mod
from . import noise as noise_mod
from . import verify as verify_mod
from .experiment import ConfigError, ExperimentConfig, RunRecord, run, sweep, write_summary_csv

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _load_config(path, overrides):
    try:
        with open(path) as f:
            raw = yaml.safe_load(f) or {}
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise ConfigError(f"{path}: invalid YAML{where}: {exc}")
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, _, value = item.partition("=")
        node = raw
        parts = key.strip().split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} walks through a non-mapping value")
        node[parts[-1]] = yaml.safe_load(value)
    return ExperimentConfig.from_dict(raw)


def _resolve_output_dir(flag_value, config):
    if flag_value:
        return flag_value
    env = os.environ.get("FRACLOSS_OUTPUT_DIR")
    if env and config.output_dir == "runs":
        return env
    return config.output_dir


def _cmd_train(args) -> int:
    try:
        config = _load_config(args.config, args.set)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_dir = _resolve_output_dir(args.output_dir, config)
    try:
        record = run(config)
    except Exception as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    run_dir = os.path.join(out_dir, args.run_id or config.run_id())
    record.save(run_dir)
    final = record.final
    print(
        f"{run_dir}: {len(record.rows)} epochs, final val_acc={final['val_acc']:.4f}, "
        f"mu={final['mu']:.4f}"
    )
    return EXIT_OK


def _cmd_sweep(args) -> int:
    try:
        config = _load_config(args.config, args.set)
        etas = [float(e) for e in args.etas.split(",") if e != ""]
        loss_specs = [s.strip() for s in args.losses.split(",") if s.strip()]
        if not etas or not loss_specs:
            raise ConfigError("sweep needs non-empty --etas and --losses")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_dir = _resolve_output_dir(args.output_dir, config)
    results, summary = sweep(config, etas, loss_specs)
    os.makedirs(out_dir, exist_ok=True)
    for run_id, record in results.items():
        if record is not None:
            record.save(os.path.join(out_dir, run_id))
    write_summary_csv(summary, os.path.join(out_dir, "summary.csv"))
    failed = [e for e in summary if e["status"] != "ok"]
    for entry in summary:
        print(
            f"{entry['run_id']}: {entry['status']}"
            + (f" val_acc={entry['final_val_acc']:.4f} mu={entry['final_mu']:.4f}"
               if entry["status"] == "ok" else f" ({entry['error']})")
        )
    print(f"summary written to {os.path.join(out_dir, 'summary.csv')}")
    return EXIT_FAIL if failed else EXIT_OK


def _cmd_verify(args) -> int:
    names = args.checks.split(",") if args.checks else None
    try:
        results = verify_mod.run_checks(names=names, fault=args.inject_fault)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name:<22} max_err={res.max_err:.3e} tol={res.tol:.0e} ({res.seconds:.2f}s)")
    ok = all(res.passed for res in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return EXIT_OK if ok else EXIT_FAIL


def _read_labels(path):
    if str(path).endswith(".csv"):
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return rows[:, -1].astype(np.int64), "csv"
    return data_mod.read_idx_labels(path), "idx"


def _write_labels(path, labels, fmt):
    if fmt == "csv":
        with open(path, "w") as f:
            f.write("label\n")
            for lab in labels:
                f.write(f"{int(lab)}\n")
    else:
        data_mod.write_idx_labels(path, labels)


def _parse_pair_map(text):
    pairs = []
    for chunk in text.split(","):
        a, _, b = chunk.partition(":")
        pairs.append((int(a), int(b)))
    return tuple(pairs)


def _cmd_noisify(args) -> int:
    try:
        labels, fmt = _read_labels(args.labels)
    except (OSError, ValueError) as exc:
        print(f"cannot read labels: {exc}", file=sys.stderr)
        return EXIT_USAGE
    k = args.k if args.k else int(labels.max()) + 1
    pair_map = noise_mod.MNIST_ASYMMETRIC_MAP if args.mnist_map else ()
    if args.pair_map:
        pair_map = _parse_pair_map(args.pair_map)
    spec = noise_mod.NoiseSpec(
        kind=args.kind,
        eta=args.eta,
        pair_map=pair_map,
        superclass_size=args.superclass_size,
        seed=args.seed,
    )
    try:
        noisy, mask = noise_mod.apply_noise(spec, labels, k)
    except ValueError as exc:
        print(f"noise error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write_labels(args.out, noisy, fmt)
    report = noise_mod.flip_report(labels, noisy, mask, spec, k)
    report_path = args.report or (str(args.out) + ".flips.json")
    with open(report_path, "w") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
    print(f"{args.out}: {int(mask.sum())}/{len(labels)} labels flipped "
          f"(eta_realized={report['eta_realized']:.4f}), report at {report_path}")
    return EXIT_OK


def _cmd_report(args) -> int:
    rows = []
    failures = 0
    for run_dir in args.run_dirs:
        csv_path = os.path.join(run_dir, "record.csv")
        try:
            record_rows = RunRecord.read_csv(csv_path)
            if not record_rows:
                raise ValueError("record.csv holds no epochs")
        except (OSError, ValueError) as exc:
            print(f"skipping {run_dir}: {exc}", file=sys.stderr)
            failures += 1
            continue
        run_id = os.path.basename(os.path.normpath(run_dir))
        for row in record_rows:
            for series, value in row.items():
                if series == "epoch" or value is None:
                    continue
                rows.append((run_id, series, row["epoch"], value))
    with open(args.out, "w") as f:
        f.write("run_id,series,epoch,value\n")
        for run_id, series, epoch, value in rows:
            f.write(f"{run_id},{series},{epoch},{repr(float(value))}\n")
    print(f"{args.out}: {len(rows)} data points from {len(args.run_dirs) - failures} run(s)")
    return EXIT_FAIL if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracloss",
        description="Robust-loss laboratory around an adaptive fractional-order classification loss.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run one training experiment from a YAML config")
    p_train.add_argument("--config", required=True)
    p_train.add_argument("--set", action="append", metavar="KEY=VALUE",
                         help="dotted-path config override, e.g. loss.mu0=0.75")
    p_train.add_argument("--output-dir", default="")
    p_train.add_argument("--run-id", default="")
    p_train.set_defaults(fn=_cmd_train)

    p_sweep = sub.add_parser("sweep", help="grid of runs over noise rates and losses")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_sweep.add_argument("--etas", required=True, help="comma list, e.g. 0,0.2,0.4")
    p_sweep.add_argument("--losses", required=True, help="comma list of loss kinds, e.g. ce,fcl")
    p_sweep.add_argument("--output-dir", default="")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the invariant suite")
    p_verify.add_argument("--checks", default="", help="comma list of check names (default: all)")
    p_verify.add_argument("--inject-fault", default=None, metavar="CHECK",
                          help="debug hook: corrupt one check's reference to prove it fails")
    p_verify.set_defaults(fn=_cmd_verify)

    p_noisify = sub.add_parser("noisify", help="corrupt a label file and emit a flip report")
    p_noisify.add_argument("--labels", required=True, help="IDX label file or CSV (label column last)")
    p_noisify.add_argument("--out", required=True)
    p_noisify.add_argument("--kind", default="symmetric", choices=noise_mod.NOISE_KINDS)
    p_noisify.add_argument("--eta", type=float, default=0.0)
    p_noisify.add_argument("--seed", type=int, default=0)
    p_noisify.add_argument("--k", type=int, default=0, help="class count (default: max label + 1)")
    p_noisify.add_argument("--pair-map", default="", help="asymmetric map like 7:1,2:7,5:6,6:5,3:8")
    p_noisify.add_argument("--mnist-map", action="store_true",
                           help="use the digit map 7:1,2:7,5:6,6:5,3:8")
    p_noisify.add_argument("--superclass-size", type=int, default=0)
    p_noisify.add_argument("--report", default="", help="flip report path (default: OUT.flips.json)")
    p_noisify.set_defaults(fn=_cmd_noisify)

    p_report = sub.add_parser("report", help="emit plot-ready long-format CSV from run directories")
    p_report.add_argument("run_dirs", nargs="+")
    p_report.add_argument("--out", default="report.csv")
    p_report.set_defaults(fn=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()

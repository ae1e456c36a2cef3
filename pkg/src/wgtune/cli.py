"""Command-line entry point: ``wgtune <command> ...``.

Exit codes: 0 success, 1 internal error, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import bench
from .datastore import (
    EXTERNAL_HEADER,
    Registry,
    import_external,
    load_refused,
    load_samples,
    save_refused,
    save_samples,
    write_descriptors,
)
from .errors import UnknownScenario, WgTuneError
from .simoracle import OracleConfig, collect
from .space import WorkgroupSize
from .synthgen import generate_datasets, generate_kernels, mixed_scenarios, reference_devices, reference_kernels
from .techniques import Corpus, Technique, TrainedTuner, fit_technique, technique_names

log = logging.getLogger("wgtune")

PARTITIONS = ("kfold", "synthreal", "loo-device", "loo-kernel", "loo-dataset")


class UsageError(Exception):
    pass


def refused_path_for(samples: Path) -> Path:
    return samples.with_name(samples.stem + ".refused.csv")


def _wgsize(text: str) -> WorkgroupSize:
    try:
        return WorkgroupSize.parse(text)
    except WgTuneError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _technique(args) -> Technique:
    overrides = {}
    if getattr(args, "trees", None):
        t = Technique.parse(args.technique, args.seed)
        overrides = {"forest": replace(t.forest, n_trees=args.trees), "regressor": replace(t.regressor, n_trees=args.trees)}
    return Technique.parse(args.technique, args.seed, **overrides)


def load_corpus(samples, scenarios_dir, refused=None) -> Corpus:
    reg = Registry.load(scenarios_dir)
    table = load_samples(samples)
    scenarios = {}
    for sid in table.scenario_ids():
        try:
            scenarios[sid] = reg.resolve_id(sid)
        except UnknownScenario as e:
            raise UnknownScenario(f"{samples}: {e}") from None
    refused_file = Path(refused) if refused else refused_path_for(Path(samples))
    refused_sets = {}
    if refused_file.exists():
        refused_sets = load_refused(refused_file)
    elif refused:
        raise FileNotFoundError(f"refused file {refused} does not exist")
    return Corpus(scenarios, table, {k: v for k, v in refused_sets.items() if k in scenarios})


# commands


def cmd_generate(args) -> int:
    if args.kernels < 1:
        raise UsageError("--kernels must be >= 1")
    synthetic = generate_kernels(args.kernels, args.seed)
    n_real = args.real if args.real is not None else args.scenarios // 5
    n_synth = args.scenarios - n_real
    if n_synth < 0:
        raise UsageError("--real cannot exceed --scenarios")
    scenarios = mixed_scenarios(synthetic, n_synth, n_real, args.seed)
    write_descriptors(args.out, reference_devices(), synthetic + reference_kernels(), generate_datasets(), scenarios)
    print(f"wrote {len(reference_devices())} devices, {len(synthetic)} synthetic + {len(reference_kernels())} reference kernels, "
          f"{len(generate_datasets())} datasets and {len(scenarios)} scenarios to {args.out}")
    return 0


def cmd_collect(args) -> int:
    reg = Registry.load(args.scenarios)
    if not reg.scenarios:
        raise UsageError(f"{args.scenarios} lists no scenarios (missing or empty scenarios.json)")
    cfg = OracleConfig(noise_sigma=args.noise, seed=args.seed, min_samples=args.samples)
    table, refused = collect(reg.scenarios.values(), cfg)
    out = Path(args.out)
    refused_out = Path(args.refused) if args.refused else refused_path_for(out)
    save_samples(table, out)
    save_refused(refused, refused_out)
    print(f"{len(table)} test cases ({table.n_observations()} runtimes) -> {out}; "
          f"{sum(len(v) for v in refused.values())} refused -> {refused_out}")
    return 0


def cmd_evaluate(args) -> int:
    techniques = [t for t in args.technique.split(",") if t]
    corpus = load_corpus(args.samples, args.scenarios, args.refused)
    splits = bench.partitions(args.partition, corpus, k=args.folds, seed=args.seed)
    rows = []
    for name in techniques:
        args.technique = name
        technique = _technique(args)
        log.info("evaluating %s over %d partitions", name, len(splits))
        rows += bench.evaluate_partitions(technique, splits, corpus, baseline=args.baseline, expert=args.expert)
    summaries = bench.report(rows)
    print(bench.format_summary(summaries))
    if args.out:
        bench.write_metrics(rows, args.out)
    if args.summary_out:
        Path(args.summary_out).write_text(bench.summary_csv(summaries))
    return 0


def cmd_train(args) -> int:
    corpus = load_corpus(args.samples, args.scenarios, args.refused)
    ids = corpus.ids()
    if args.synthetic_only:
        ids = bench.partition_synthetic_real([corpus.scenarios[s] for s in ids])[0]
    tuner = fit_technique(_technique(args), ids, corpus)
    tuner.save(args.out)
    print(f"trained {args.technique} on {len(ids)} scenarios (baseline {tuner.baseline}) -> {args.out}")
    return 0


def cmd_import(args) -> int:
    table = import_external(args.external, args.scenarios)
    save_samples(table, args.out)
    print(f"imported {len(table)} test cases -> {args.out}")
    return 0


def cmd_serve(args) -> int:
    from .serve import PredictionServer

    tuner = TrainedTuner.load(args.model)
    try:
        server = PredictionServer(tuner, args.host, args.port)
    except OSError as e:
        print(f"wgtune: cannot listen on {args.host}:{args.port}: {e.strerror or e}", file=sys.stderr)
        return 2
    print(f"listening on {args.host}:{server.port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wgtune", description="Workgroup-size autotuning for stencil kernels.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write device, kernel and dataset descriptors")
    g.add_argument("--kernels", type=int, required=True, help="number of synthetic kernels")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="descriptor directory")
    g.add_argument("--scenarios", type=int, default=50, help="scenarios in the manifest (default 50)")
    g.add_argument("--real", type=int, default=None, help="how many of them use reference kernels (default a fifth)")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("collect", help="exhaustively measure every scenario on the simulator")
    c.add_argument("--scenarios", required=True, help="descriptor directory")
    c.add_argument("--samples", type=int, default=30, help="runtimes per test case (default 30)")
    c.add_argument("--noise", type=float, default=0.05, help="lognormal noise sigma (default 0.05)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", required=True, help="samples CSV")
    c.add_argument("--refused", help="refused CSV (default <out>.refused.csv)")
    c.set_defaults(func=cmd_collect)

    def model_flags(q, technique_help):
        q.add_argument("--technique", required=True, help=technique_help)
        q.add_argument("--samples", required=True, help="samples CSV")
        q.add_argument("--scenarios", required=True, help="descriptor directory")
        q.add_argument("--refused", help="refused CSV (default <samples>.refused.csv if present)")
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--trees", type=int, help="override the number of trees in forest models")

    e = sub.add_parser("evaluate", help="cross-validate techniques and report metrics")
    model_flags(e, "technique name(s), comma separated: " + ", ".join(technique_names()))
    e.add_argument("--partition", required=True, choices=PARTITIONS)
    e.add_argument("--folds", type=int, default=10)
    e.add_argument("--baseline", type=_wgsize, help="pin the speedup reference, e.g. 4x4")
    e.add_argument("--expert", type=_wgsize, help="also report speedup over a fixed expert choice, e.g. 32x4")
    e.add_argument("--out", help="metrics CSV")
    e.add_argument("--summary-out", help="summary CSV")
    e.set_defaults(func=cmd_evaluate)

    t = sub.add_parser("train", help="train a tuner and save it for the daemon")
    model_flags(t, "technique name: " + ", ".join(technique_names()))
    t.add_argument("--synthetic-only", action="store_true", help="train on synthetic-kernel scenarios only")
    t.add_argument("--out", required=True, help="model JSON")
    t.set_defaults(func=cmd_train)

    i = sub.add_parser("import", help="import externally measured runtimes")
    i.add_argument("--external", required=True, help="CSV with header " + ",".join(EXTERNAL_HEADER))
    i.add_argument("--scenarios", required=True, help="descriptor directory")
    i.add_argument("--out", required=True, help="samples CSV")
    i.set_defaults(func=cmd_import)

    s = sub.add_parser("serve", help="run the prediction daemon")
    s.add_argument("--model", required=True)
    s.add_argument("--port", type=int, required=True)
    s.add_argument("--host", default="127.0.0.1")
    s.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command in ("evaluate", "train"):
        names = args.technique.split(",") if args.command == "evaluate" else [args.technique]
        for name in names:
            if name not in technique_names():
                parser.error(f"unknown technique {name!r}; choose from {', '.join(technique_names())}")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"wgtune: {e}", file=sys.stderr)
        return 2
    except (WgTuneError, OSError) as e:
        print(f"wgtune: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"wgtune: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

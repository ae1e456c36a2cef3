#!/usr/bin/env python3
"""Cross-validate techniques on a freshly simulated corpus and print the summary table.

    python scripts/run_experiment.py --partition synthreal
    python scripts/run_experiment.py --partition kfold --folds 10 --techniques tree-nn,speedup-reg --out metrics.csv
"""
import argparse
import logging
import time

from wgtune import bench
from wgtune.cli import PARTITIONS
from wgtune.simoracle import OracleConfig, collect
from wgtune.synthgen import standard_scenarios
from wgtune.techniques import Corpus, Technique, technique_names


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--partition", choices=PARTITIONS, default="kfold")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--techniques", default=",".join(technique_names()))
    p.add_argument("--synthetic", type=int, default=40, help="synthetic-kernel scenarios")
    p.add_argument("--real", type=int, default=10, help="reference-kernel scenarios")
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--samples", type=int, default=30)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", help="per-scenario metrics CSV")
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    scenarios = standard_scenarios(args.synthetic, args.real, 0)
    table, refused = collect(scenarios, OracleConfig(noise_sigma=args.noise, seed=args.seed, min_samples=args.samples))
    corpus = Corpus({s.id: s for s in scenarios}, table, refused)
    splits = bench.partitions(args.partition, corpus, k=args.folds, seed=args.seed)
    print(f"{len(scenarios)} scenarios, {table.n_observations()} runtimes, {len(splits)} partitions ({args.partition})")

    rows = []
    for name in args.techniques.split(","):
        start = time.perf_counter()
        rows += bench.evaluate_partitions(Technique.parse(name, seed=args.seed), splits, corpus)
        logging.info("%-20s %.1fs", name, time.perf_counter() - start)
    print(bench.format_summary(bench.report(rows)))
    if args.out:
        bench.write_metrics(rows, args.out)


if __name__ == "__main__":
    main()

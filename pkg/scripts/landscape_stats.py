#!/usr/bin/env python3
"""Describe the simulated optimisation landscape: refusals per device,
how spread out the oracle sizes are, and how well the best fixed size does."""
import argparse
import statistics
from collections import Counter, defaultdict

from wgtune.simoracle import OracleConfig, collect, effective_max
from wgtune.space import enumerate_space, oracle, performance
from wgtune.synthgen import standard_scenarios
from wgtune.techniques import Corpus, safe_ranking


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--synthetic", type=int, default=40)
    p.add_argument("--real", type=int, default=10)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=1)
    args = p.parse_args()

    scenarios = standard_scenarios(args.synthetic, args.real, 0)
    table, refused = collect(scenarios, OracleConfig(noise_sigma=args.noise, seed=args.seed))
    ids = [s.id for s in scenarios]

    print("refused sizes per device")
    per_device = defaultdict(lambda: [0, 0])
    for s in scenarios:
        per_device[s.device.id][0] += len(refused[s.id])
        per_device[s.device.id][1] += len(enumerate_space(effective_max(s)))
    for dev, (r, n) in sorted(per_device.items()):
        print(f"  {dev:12s} {r:5d} / {n:6d}  ({100 * r / n:.2f}%)")

    oracles = Counter(oracle(sid, table) for sid in ids)
    print(f"\n{len(oracles)} distinct oracle sizes over {len(ids)} scenarios; most common:")
    for w, n in oracles.most_common(5):
        print(f"  {str(w):8s} {n}")

    ranking = safe_ranking(Corpus({s.id: s for s in scenarios}, table, refused), ids)
    base = ranking[0]
    perf = [performance(sid, base, table) for sid in ids]
    print(f"\nsafe set: {len(ranking)} sizes; baseline parameter {base}")
    print(f"baseline performance: mean {statistics.fmean(perf):.3f}, min {min(perf):.3f}, max {max(perf):.3f}")


if __name__ == "__main__":
    main()

"""Evaluation harness: partitioning, per-prediction metrics and summaries."""
from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import IncompleteSpace, InvalidArgument, InvalidPartition
from .simoracle import effective_max
from .space import Probe, WorkgroupSize, enumerate_space, oracle, performance, speedup
from .synthgen import is_synthetic
from .techniques import Corpus, Technique, fit_technique, safe_ranking

REPORT_HEADER = ["technique", "scenario_id", "time_ms", "accuracy", "validity", "refused", "performance", "speedup", "fallback_iterations"]
DIMENSIONS = ("device", "kernel", "dataset")


@dataclass(frozen=True)
class MetricsRow:
    technique: str
    scenario_id: str
    time_ms: float
    accuracy: int
    validity: int
    refused: int
    performance: float
    speedup: float
    fallback_iterations: int
    # not part of the report CSV
    wgsize: WorkgroupSize | None = None
    expert_speedup: float | None = None


# partitioning


def partition_kfold(scenario_ids, k: int = 10, seed: int = 0):
    ids = sorted(scenario_ids)
    if k < 2:
        raise InvalidArgument("k must be >= 2")
    if k > len(ids):
        raise InvalidArgument(f"cannot make {k} folds from {len(ids)} scenarios")
    order = np.random.default_rng(seed).permutation(len(ids))
    folds = np.array_split(order, k)
    out = []
    for fold in folds:
        test = sorted(ids[i] for i in fold)
        held = set(test)
        out.append(([s for s in ids if s not in held], test))
    return out


def partition_synthetic_real(scenarios):
    train = sorted(s.id for s in scenarios if is_synthetic(s.kernel))
    test = sorted(s.id for s in scenarios if not is_synthetic(s.kernel))
    if not train or not test:
        raise InvalidPartition("the synthetic/real split needs both synthetic and real-kernel scenarios")
    return train, test


def dimension_value(s, dimension: str) -> str:
    if dimension == "device":
        return s.device.id
    if dimension == "kernel":
        return s.kernel.name
    if dimension == "dataset":
        return s.dataset.key
    raise InvalidArgument(f"unknown dimension {dimension!r}; choose from {', '.join(DIMENSIONS)}")


def partition_leave_one_out(scenarios, dimension: str):
    scenarios = list(scenarios)
    values = sorted({dimension_value(s, dimension) for s in scenarios})
    if len(values) < 2:
        raise InvalidPartition(f"leave-one-out by {dimension} needs at least two distinct values")
    out = []
    for v in values:
        test = sorted(s.id for s in scenarios if dimension_value(s, dimension) == v)
        train = sorted(s.id for s in scenarios if dimension_value(s, dimension) != v)
        out.append((train, test))
    return out


def partitions(strategy: str, corpus: Corpus, k: int = 10, seed: int = 0):
    scenarios = [corpus.scenarios[s] for s in corpus.ids()]
    if strategy == "kfold":
        return partition_kfold(corpus.ids(), k, seed)
    if strategy == "synthreal":
        return [partition_synthetic_real(scenarios)]
    if strategy.startswith("loo-"):
        return partition_leave_one_out(scenarios, strategy[4:])
    raise InvalidArgument(f"unknown partition strategy {strategy!r}")


# evaluation


def table_probe(corpus: Corpus, sid: str):
    """Probe answering from recorded measurements instead of running anything."""
    limit = effective_max(corpus.scenarios[sid])
    refused = corpus.refused.get(sid, frozenset())

    def probe(w: WorkgroupSize) -> Probe:
        if w.area() > limit:
            return Probe.OVERSIZED
        if w in refused:
            return Probe.REFUSED
        return Probe.LEGAL

    return probe


def check_exhaustive(corpus: Corpus, sid: str):
    refused = corpus.refused.get(sid, frozenset())
    measured = set(corpus.table.sizes(sid))
    for w in enumerate_space(effective_max(corpus.scenarios[sid])):
        if w not in refused and w not in measured:
            raise IncompleteSpace(f"{sid} has no samples for legal size {w}")


def evaluate(technique: Technique, train_ids, test_ids, corpus: Corpus, baseline: WorkgroupSize | None = None, expert: WorkgroupSize | None = None) -> list[MetricsRow]:
    """Train on ``train_ids`` and score the size chosen for each test scenario.

    The speedup reference is the best size (by geometric-mean performance
    over the training scenarios) that is legal in every train and test
    scenario, unless ``baseline`` pins it.
    """
    train_ids, test_ids = sorted(train_ids), sorted(test_ids)
    if set(train_ids) & set(test_ids):
        raise InvalidPartition("training and test scenarios overlap")
    if not test_ids:
        raise InvalidPartition("no test scenarios")
    for sid in test_ids:
        check_exhaustive(corpus, sid)
    tuner = fit_technique(technique, train_ids, corpus)
    reference = baseline or safe_ranking(corpus, train_ids, legal_in=test_ids)[0]
    table = corpus.table
    rows = []
    for sid in test_ids:
        s = corpus.scenarios[sid]
        f = corpus.features(sid)
        ctx = corpus.context(sid, known_refused=False)
        probe = table_probe(corpus, sid)
        start = time.perf_counter()
        w, iterations = tuner.tune(s, ctx, probe, f)
        elapsed = (time.perf_counter() - start) * 1000.0
        initial = tuner.predict_initial(f)
        if initial is None:
            validity, refused = 1, 0
        else:
            validity = int(initial.area() <= ctx.effective_max)
            refused = int(validity == 1 and probe(initial) is Probe.REFUSED)
        expert_speedup = None
        if expert is not None and (sid, expert) in table:
            expert_speedup = speedup(sid, w, expert, table)
        rows.append(
            MetricsRow(
                technique=technique.name,
                scenario_id=sid,
                time_ms=elapsed,
                accuracy=int(w == oracle(sid, table)),
                validity=validity,
                refused=refused,
                performance=performance(sid, w, table),
                speedup=speedup(sid, w, reference, table),
                fallback_iterations=iterations,
                wgsize=w,
                expert_speedup=expert_speedup,
            )
        )
    return rows


def evaluate_partitions(technique: Technique, splits, corpus: Corpus, baseline=None, expert=None) -> list[MetricsRow]:
    rows = []
    for train, test in splits:
        rows += evaluate(technique, train, test, corpus, baseline=baseline, expert=expert)
    return sorted(rows, key=lambda r: (r.technique, r.scenario_id))


# reporting


@dataclass(frozen=True)
class Summary:
    technique: str
    n: int
    accuracy: float
    validity: float
    refused: float
    mean_performance: float
    mean_speedup: float
    median_speedup: float
    q1_speedup: float
    q3_speedup: float
    fallback_rate: float
    mean_time_ms: float
    expert_median_speedup: float | None = None


def _quartiles(values):
    if len(values) == 1:
        return values[0], values[0]
    q = statistics.quantiles(values, n=4, method="inclusive")
    return q[0], q[2]


def report(rows) -> list[Summary]:
    rows = list(rows)
    if not rows:
        raise InvalidArgument("no metrics rows to report")
    out = []
    for name in sorted({r.technique for r in rows}):
        rs = [r for r in rows if r.technique == name]
        sp = [r.speedup for r in rs]
        q1, q3 = _quartiles(sp)
        expert = [r.expert_speedup for r in rs if r.expert_speedup is not None]
        out.append(
            Summary(
                technique=name,
                n=len(rs),
                accuracy=statistics.fmean(r.accuracy for r in rs),
                validity=statistics.fmean(r.validity for r in rs),
                refused=statistics.fmean(r.refused for r in rs),
                mean_performance=statistics.fmean(r.performance for r in rs),
                mean_speedup=statistics.fmean(sp),
                median_speedup=statistics.median(sp),
                q1_speedup=q1,
                q3_speedup=q3,
                fallback_rate=statistics.fmean(1 if r.fallback_iterations > 0 else 0 for r in rs),
                mean_time_ms=statistics.fmean(r.time_ms for r in rs),
                expert_median_speedup=statistics.median(expert) if expert else None,
            )
        )
    return out


def format_summary(summaries) -> str:
    header = ["technique", "n", "accuracy", "perf(%)", "mean x", "median x", "q1 x", "q3 x", "fallback", "time ms"]
    expert = any(s.expert_median_speedup is not None for s in summaries)
    if expert:
        header.append("expert x")
    lines = []
    for s in summaries:
        cells = [
            s.technique,
            str(s.n),
            f"{s.accuracy:.3f}",
            f"{100 * s.mean_performance:.1f}",
            f"{s.mean_speedup:.3f}",
            f"{s.median_speedup:.3f}",
            f"{s.q1_speedup:.3f}",
            f"{s.q3_speedup:.3f}",
            f"{s.fallback_rate:.3f}",
            f"{s.mean_time_ms:.3f}",
        ]
        if expert:
            cells.append("-" if s.expert_median_speedup is None else f"{s.expert_median_speedup:.3f}")
        lines.append(cells)
    widths = [max(len(header[i]), *(len(c[i]) for c in lines)) for i in range(len(header))]

    def fmt(cells):
        return "  ".join(c.ljust(widths[0]) if i == 0 else c.rjust(widths[i]) for i, c in enumerate(cells))

    return "\n".join([fmt(header), fmt(["-" * w for w in widths])] + [fmt(c) for c in lines])


def summary_csv(summaries) -> str:
    buf = io.StringIO()
    names = [f.name for f in fields(Summary)]
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(names)
    for s in summaries:
        out.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in asdict(s).values()])
    return buf.getvalue()


def write_metrics(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(REPORT_HEADER)
        for r in rows:
            out.writerow([r.technique, r.scenario_id, repr(r.time_ms), r.accuracy, r.validity, r.refused, repr(r.performance), repr(r.speedup), r.fallback_iterations])


def read_metrics(path) -> list[MetricsRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        if next(reader, None) != REPORT_HEADER:
            raise InvalidArgument(f"{path} is not a metrics CSV")
        return [
            MetricsRow(t, sid, float(ms), int(a), int(v), int(rf), float(p), float(sp), int(it))
            for t, sid, ms, a, v, rf, p, sp, it in reader
        ]

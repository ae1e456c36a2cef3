"""Named autotuning techniques: training pipelines and trained tuner bundles.

Technique names are ``<classifier>-<fallback>`` with classifier one of
``zeror``, ``nb``, ``tree``, ``forest`` and fallback one of ``baseline``,
``random``, ``nn``; or ``runtime-reg`` / ``speedup-reg`` for the
regression approaches.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import InvalidArgument, NoSafeParameter
from .features import FeatureVector, extract
from .learn import (
    REGRESSOR_DEFAULTS,
    ForestConfig,
    LabelledDataset,
    RegressionDataset,
    model_from_json,
    model_to_json,
    train_classifier,
    train_regressor,
)
from .learn.data import RUNTIME, SPEEDUP
from .learn.models import DECISION_TREE, NAIVE_BAYES, RANDOM_FOREST, ZERO_R
from .simoracle import constraint_context
from .space import (
    ConstraintContext,
    SampleTable,
    WorkgroupSize,
    oracle,
    rank_safe,
    safe_set,
)
from .tuner import Fallback, FallbackStrategy, FitnessMode, tune_classify, tune_regress

CLASSIFIER_NAMES = {"zeror": ZERO_R, "nb": NAIVE_BAYES, "tree": DECISION_TREE, "forest": RANDOM_FOREST}
FALLBACK_NAMES = {f.value: f for f in Fallback}
REGRESSION_NAMES = {"runtime-reg": FitnessMode.RUNTIME_RECIPROCAL, "speedup-reg": FitnessMode.SPEEDUP}


def technique_names() -> list[str]:
    names = [f"{c}-{f}" for c in CLASSIFIER_NAMES for f in FALLBACK_NAMES]
    return names + list(REGRESSION_NAMES)


@dataclass(frozen=True)
class Technique:
    name: str
    algorithm: str | None = None
    fallback: Fallback | None = None
    mode: FitnessMode | None = None
    seed: int = 0
    forest: ForestConfig = ForestConfig()
    regressor: ForestConfig = REGRESSOR_DEFAULTS

    @property
    def is_classifier(self) -> bool:
        return self.algorithm is not None

    @classmethod
    def parse(cls, name: str, seed: int = 0, **overrides) -> "Technique":
        if name in REGRESSION_NAMES:
            return cls(name, mode=REGRESSION_NAMES[name], seed=seed, **overrides)
        algo, _, fb = name.partition("-")
        if algo in CLASSIFIER_NAMES and fb in FALLBACK_NAMES:
            return cls(name, algorithm=CLASSIFIER_NAMES[algo], fallback=FALLBACK_NAMES[fb], seed=seed, **overrides)
        raise InvalidArgument(f"unknown technique {name!r}; choose from {', '.join(technique_names())}")


@dataclass
class Corpus:
    """Everything measured: scenarios, the sample table and refused sets."""

    scenarios: dict
    table: SampleTable
    refused: dict = field(default_factory=dict)

    _features: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        missing = set(self.table.scenario_ids()) - set(self.scenarios)
        if missing:
            raise InvalidArgument(f"samples for unknown scenarios: {sorted(missing)[:3]}")

    def features(self, sid: str) -> FeatureVector:
        if sid not in self._features:
            self._features[sid] = extract(self.scenarios[sid])
        return self._features[sid]

    def context(self, sid: str, known_refused: bool = True) -> ConstraintContext:
        refused = self.refused.get(sid, frozenset()) if known_refused else ()
        return constraint_context(self.scenarios[sid], refused)

    def ids(self) -> list[str]:
        return sorted(self.table.scenario_ids())


def common_sizes(table: SampleTable, ids) -> list[WorkgroupSize]:
    ids = list(ids)
    common = set(table.sizes(ids[0]))
    for sid in ids[1:]:
        common &= set(table.sizes(sid))
    return sorted(common)


def safe_ranking(corpus: Corpus, train_ids, legal_in=()) -> list[WorkgroupSize]:
    """Sizes legal in every training scenario (and in ``legal_in``), best-first."""
    train_ids = list(train_ids)
    contexts = [corpus.context(s) for s in list(train_ids) + list(legal_in)]
    safe = safe_set(contexts, common_sizes(corpus.table, train_ids))
    if not safe:
        raise NoSafeParameter("no workgroup size is legal in every training scenario")
    return rank_safe(train_ids, corpus.table, safe)


def prior_refused(corpus: Corpus, train_ids) -> frozenset:
    out = set()
    for sid in train_ids:
        out |= corpus.refused.get(sid, frozenset())
    return frozenset(out)


def labelled_dataset(corpus: Corpus, train_ids) -> LabelledDataset:
    return LabelledDataset.from_rows((corpus.features(s), oracle(s, corpus.table)) for s in train_ids)


def regression_dataset(corpus: Corpus, train_ids, mode: str, baseline: WorkgroupSize | None = None) -> RegressionDataset:
    rows = []
    for sid in train_ids:
        f = corpus.features(sid)
        if mode == SPEEDUP:
            base_t = corpus.table.mean(sid, baseline)
        for w in corpus.table.sizes(sid):
            t = corpus.table.mean(sid, w)
            rows.append((f, w, t if mode == RUNTIME else base_t / t))
    return RegressionDataset.from_rows(rows, mode)


class TrainedTuner:
    """A fitted model plus whatever its selection procedure needs."""

    def __init__(self, technique: Technique, model, baseline: WorkgroupSize, strategy: FallbackStrategy | None = None):
        self.technique = technique
        self.model = model
        self.baseline = baseline
        self.strategy = strategy

    def predict_initial(self, features) -> WorkgroupSize | None:
        """The raw classifier prediction, before any fallback."""
        if not self.technique.is_classifier:
            return None
        return self.model.predict_label(features)

    def tune(self, s, ctx, probe, features=None) -> tuple[WorkgroupSize, int]:
        if self.technique.is_classifier:
            return tune_classify(self.model, s, ctx, self.strategy, probe, features)
        return tune_regress(self.model, s, ctx, self.technique.mode, probe, features)

    def to_json(self) -> dict:
        t = self.technique
        doc = {
            "format": "wgtune-tuner",
            "version": 1,
            "technique": t.name,
            "seed": t.seed,
            "baseline": str(self.baseline),
            "model": model_to_json(self.model),
        }
        if self.strategy is not None:
            doc["fallback"] = {
                "kind": self.strategy.kind.value,
                "ranking": [str(w) for w in self.strategy.ranking],
                "seed": self.strategy.seed,
                "prior_refused": sorted(str(w) for w in self.strategy.prior_refused),
            }
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "TrainedTuner":
        if doc.get("format") != "wgtune-tuner":
            raise InvalidArgument("not a wgtune tuner file")
        technique = Technique.parse(doc["technique"], seed=doc.get("seed", 0))
        strategy = None
        if "fallback" in doc:
            fb = doc["fallback"]
            strategy = FallbackStrategy(
                fb["kind"],
                ranking=tuple(WorkgroupSize.parse(w) for w in fb["ranking"]),
                seed=fb["seed"],
                prior_refused=frozenset(WorkgroupSize.parse(w) for w in fb["prior_refused"]),
            )
        return cls(technique, model_from_json(doc["model"]), WorkgroupSize.parse(doc["baseline"]), strategy)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "TrainedTuner":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def fit_technique(technique: Technique, train_ids, corpus: Corpus) -> TrainedTuner:
    """Train ``technique`` on the training scenarios of ``corpus``."""
    train_ids = sorted(train_ids)
    if not train_ids:
        raise InvalidArgument("no training scenarios")
    ranking = safe_ranking(corpus, train_ids)
    baseline = ranking[0]
    if technique.is_classifier:
        data = labelled_dataset(corpus, train_ids)
        config = technique.forest if technique.algorithm == RANDOM_FOREST else None
        model = train_classifier(technique.algorithm, data, seed=technique.seed, config=config)
        prior = prior_refused(corpus, train_ids)
        if technique.fallback is Fallback.BASELINE:
            strategy = FallbackStrategy.from_baseline(ranking)
        elif technique.fallback is Fallback.RANDOM:
            strategy = FallbackStrategy.random(technique.seed, prior)
        else:
            strategy = FallbackStrategy.nearest_neighbour(prior)
        return TrainedTuner(technique, model, baseline, strategy)
    mode = technique.mode.regressor_mode
    data = regression_dataset(corpus, train_ids, mode, baseline)
    model = train_regressor(data, seed=technique.seed, config=technique.regressor)
    return TrainedTuner(technique, model, baseline)

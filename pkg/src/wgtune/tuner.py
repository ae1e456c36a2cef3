"""Workgroup-size selection from trained models.

Both tuners talk to the execution environment through a *probe*: a callable
that tries a size and reports a :class:`~wgtune.space.Probe` outcome. Sizes
found refused are remembered for the rest of the episode.
"""
from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidArgument, InvalidPrediction, NoLegalParameter
from .features import extract
from .learn.data import RUNTIME, SPEEDUP
from .space import ConstraintContext, Probe, WorkgroupSize, enumerate_space

ProbeFn = Callable[[WorkgroupSize], Probe]


class Fallback(str, enum.Enum):
    BASELINE = "baseline"
    RANDOM = "random"
    NEAREST_NEIGHBOUR = "nn"


@dataclass(frozen=True)
class FallbackStrategy:
    """How to repair an illegal classifier prediction.

    ``ranking`` lists the safe sizes best-first (Baseline only); its head is
    the baseline parameter. ``prior_refused`` holds every size seen refused
    in the training data, used by Random and NearestNeighbour to avoid sizes
    expected to fail.
    """

    kind: Fallback
    ranking: tuple = ()
    seed: int | None = None
    prior_refused: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "kind", Fallback(self.kind))
        object.__setattr__(self, "ranking", tuple(self.ranking))
        object.__setattr__(self, "prior_refused", frozenset(self.prior_refused))
        if self.kind is Fallback.BASELINE and not self.ranking:
            raise InvalidArgument("the Baseline fallback needs at least one safe size")
        if self.kind is Fallback.RANDOM and self.seed is None:
            raise InvalidArgument("the Random fallback needs an explicit seed")

    @property
    def baseline(self) -> WorkgroupSize | None:
        return self.ranking[0] if self.ranking else None

    @classmethod
    def from_baseline(cls, ranking):
        return cls(Fallback.BASELINE, ranking=tuple(ranking))

    @classmethod
    def random(cls, seed: int, prior_refused=frozenset()):
        return cls(Fallback.RANDOM, seed=seed, prior_refused=prior_refused)

    @classmethod
    def nearest_neighbour(cls, prior_refused=frozenset()):
        return cls(Fallback.NEAREST_NEIGHBOUR, prior_refused=prior_refused)


class FitnessMode(str, enum.Enum):
    RUNTIME_RECIPROCAL = "runtime"
    SPEEDUP = "speedup"

    @property
    def regressor_mode(self) -> str:
        return RUNTIME if self is FitnessMode.RUNTIME_RECIPROCAL else SPEEDUP


def fitness(mode: FitnessMode, x: float) -> float:
    mode = FitnessMode(mode)
    if mode is FitnessMode.RUNTIME_RECIPROCAL:
        if not x > 0:
            raise InvalidPrediction(f"predicted runtime must be positive, got {x}")
        return 1.0 / x
    return float(x)


def _fitness_array(mode: FitnessMode, values: np.ndarray) -> np.ndarray:
    if mode is FitnessMode.RUNTIME_RECIPROCAL:
        if np.any(~(values > 0)):
            raise InvalidPrediction("predicted runtimes must be positive")
        return 1.0 / values
    return values


def nearest(target: WorkgroupSize, candidates) -> WorkgroupSize | None:
    """Closest candidate by Euclidean distance; first in iteration order wins ties."""
    best, best_d = None, math.inf
    for c in candidates:
        d = math.sqrt((c.w_r - target.w_r) ** 2 + (c.w_c - target.w_c) ** 2)
        if d < best_d:
            best, best_d = c, d
    return best


def episode_seed(seed: int, scenario_id: str) -> int:
    h = hashlib.blake2b(f"{seed}|{scenario_id}".encode(), digest_size=8).digest()
    return int.from_bytes(h, "little")


class _Episode:
    """Legality bookkeeping for one tuning episode."""

    def __init__(self, ctx: ConstraintContext, probe: ProbeFn):
        self.ctx = ctx
        self.probe = probe
        self.refused = set(ctx.refused)
        self.oversized = set()

    def legal(self, w: WorkgroupSize) -> bool:
        if w.area() > self.ctx.effective_max or w in self.oversized:
            return False
        if w in self.refused:
            return False
        outcome = self.probe(w)
        if outcome is Probe.REFUSED:
            self.refused.add(w)
        elif outcome is Probe.OVERSIZED:
            self.oversized.add(w)
        return outcome is Probe.LEGAL

    def excluded(self) -> set:
        return self.refused | self.oversized


def _candidates(ctx, exclude, prior_refused):
    grid = [w for w in enumerate_space(ctx.effective_max) if w not in exclude]
    preferred = [w for w in grid if w not in prior_refused]
    # prior observations only guide the choice; fall back to the whole grid
    return preferred or grid


def tune_classify(model, s, ctx: ConstraintContext, strategy: FallbackStrategy, probe: ProbeFn, features=None):
    """Classify, then repair an illegal prediction with the fallback strategy.

    Returns ``(size, fallback_iterations)``.
    """
    f = features if features is not None else extract(s)
    w = model.predict_label(f)
    ep = _Episode(ctx, probe)
    iterations = 0
    rng = None
    ranking = iter(strategy.ranking)
    while not ep.legal(w):
        iterations += 1
        if strategy.kind is Fallback.BASELINE:
            # the best safe size, then the next best if the scenario refuses it
            w = next((c for c in ranking if c not in ep.excluded()), None)
        else:
            cands = _candidates(ctx, ep.excluded(), strategy.prior_refused)
            if not cands:
                w = None
            elif strategy.kind is Fallback.RANDOM:
                if rng is None:
                    rng = np.random.default_rng(episode_seed(strategy.seed, s.id))
                w = cands[int(rng.integers(len(cands)))]
            else:
                w = nearest(w, cands)
        if w is None:
            raise NoLegalParameter(f"no legal workgroup size left for {s.id}")
    return w, iterations


def _regressor_mode(model) -> str:
    return getattr(model, "mode", None)


def rank_candidates(model, s, ctx: ConstraintContext, mode: FitnessMode, features=None) -> list[WorkgroupSize]:
    """Candidates best-first by fitness of the model's predictions."""
    mode = FitnessMode(mode)
    if _regressor_mode(model) != mode.regressor_mode:
        raise InvalidArgument(f"{mode.value} fitness needs a {mode.regressor_mode}-mode regressor, got {_regressor_mode(model)!r}")
    cands = [w for w in enumerate_space(ctx.effective_max) if w not in ctx.refused]
    if not cands:
        return []
    f = features if features is not None else extract(s)
    scores = _fitness_array(mode, np.asarray(model.predict_values(f, cands), dtype=float))
    order = sorted(range(len(cands)), key=lambda i: (-scores[i], cands[i]))
    return [cands[i] for i in order]


def tune_regress(model, s, ctx: ConstraintContext, mode: FitnessMode, probe: ProbeFn, features=None):
    """Pick the best predicted candidate, dropping each one the probe rejects.

    Returns ``(size, rejections)``.
    """
    rejections = 0
    for w in rank_candidates(model, s, ctx, mode, features):
        if probe(w) is Probe.LEGAL:
            return w, rejections
        rejections += 1
    raise NoLegalParameter(f"every candidate workgroup size was rejected for {s.id}")

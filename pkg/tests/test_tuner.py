import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import table_from
from wgtune.errors import InvalidArgument, InvalidPrediction, NoLegalParameter
from wgtune.learn.data import RUNTIME, SPEEDUP
from wgtune.simoracle import model_runtimes
from wgtune.space import ConstraintContext, Probe, baseline_param, enumerate_space, oracle, rank_safe, wg
from wgtune.synthgen import standard_scenarios
from wgtune.tuner import (
    Fallback,
    FallbackStrategy,
    FitnessMode,
    fitness,
    nearest,
    rank_candidates,
    tune_classify,
    tune_regress,
)

S = standard_scenarios()[0]


class Fixed:
    """Classifier stub that always predicts one size."""

    def __init__(self, w):
        self.w = w

    def predict_label(self, f):
        return self.w


class Table:
    """Regressor stub answering from a ``{size: value}`` map."""

    def __init__(self, values, mode=RUNTIME, default=1e9):
        self.values, self.mode, self.default = values, mode, default

    def predict_values(self, f, sizes):
        return np.array([self.values.get(w, self.default) for w in sizes], dtype=float)


def probe_for(refused=(), limit=10**9, log=None):
    refused = set(refused)

    def probe(w):
        if log is not None:
            log.append(w)
        if w.area() > limit:
            return Probe.OVERSIZED
        return Probe.REFUSED if w in refused else Probe.LEGAL

    return probe


def classify(model, ctx, strategy, probe, s=S):
    return tune_classify(model, s, ctx, strategy, probe, features=())


class TestFitness:
    def test_values(self):
        assert fitness(FitnessMode.RUNTIME_RECIPROCAL, 10) == 0.1
        assert fitness(FitnessMode.SPEEDUP, 1.33) == 1.33

    @pytest.mark.parametrize("x", [0, -1.0])
    def test_reciprocal_needs_positive(self, x):
        with pytest.raises(InvalidPrediction):
            fitness(FitnessMode.RUNTIME_RECIPROCAL, x)

    @given(st.floats(1e-6, 1e6), st.floats(1e-6, 1e6))
    def test_reciprocal_decreasing(self, a, b):
        if a < b:
            assert fitness("runtime", a) > fitness("runtime", b)


class TestStrategy:
    def test_explicit(self):
        with pytest.raises(InvalidArgument):
            FallbackStrategy(Fallback.BASELINE)
        with pytest.raises(InvalidArgument):
            FallbackStrategy(Fallback.RANDOM)
        assert FallbackStrategy.from_baseline([wg(4, 4)]).baseline == wg(4, 4)


class TestClassify:
    @pytest.mark.parametrize("strategy", [
        FallbackStrategy.from_baseline([wg(2, 2)]), FallbackStrategy.random(1), FallbackStrategy.nearest_neighbour(),
    ])
    def test_legal_prediction_unchanged(self, strategy):
        assert classify(Fixed(wg(16, 4)), ConstraintContext(256, 256), strategy, probe_for()) == (wg(16, 4), 0)

    def test_nearest_example(self):
        assert nearest(wg(64, 4), [wg(16, 4), wg(60, 4)]) == wg(60, 4)

    def test_nearest_ties_keep_first(self):
        assert nearest(wg(4, 4), [wg(2, 4), wg(6, 4)]) == wg(2, 4)
        assert nearest(wg(4, 4), []) is None

    def test_nn_oversized(self):
        w, it = classify(Fixed(wg(64, 8)), ConstraintContext(256, 256), FallbackStrategy.nearest_neighbour(), probe_for())
        brute = min((c for c in enumerate_space(256)), key=lambda c: (math.dist((c.w_c, c.w_r), (64, 8)), c))
        assert (w, it) == (brute, 1)

    def test_nn_walks_from_current_and_never_revisits(self):
        refused = {wg(32, 8), wg(30, 8), wg(32, 6), wg(28, 8)}
        log = []
        w, it = classify(Fixed(wg(32, 8)), ConstraintContext(1024, 1024), FallbackStrategy.nearest_neighbour(), probe_for(refused, log=log))
        assert w not in refused and it >= 1
        assert len(log) == len(set(log))

    def test_baseline_example(self):
        # the geometric-mean example: w1 = (4,2) beats w2 = (2,4)
        t = table_from({
            "a": {(2, 2): [1.0], (4, 2): [2.0], (2, 4): [1 / 0.9]},
            "b": {(2, 2): [1.0], (4, 2): [2.0], (2, 4): [5.0]},
        })
        safe = {wg(4, 2), wg(2, 4)}
        strategy = FallbackStrategy.from_baseline(rank_safe(["a", "b"], t, safe))
        assert strategy.baseline == baseline_param(["a", "b"], t, safe) == wg(4, 2)
        assert classify(Fixed(wg(64, 64)), ConstraintContext(1024, 1024), strategy, probe_for()) == (wg(4, 2), 1)

    def test_baseline_walks_ranking_when_refused(self):
        strategy = FallbackStrategy.from_baseline([wg(8, 8), wg(4, 4)])
        w, it = classify(Fixed(wg(64, 64)), ConstraintContext(1024, 1024), strategy, probe_for({wg(8, 8)}))
        assert (w, it) == (wg(4, 4), 2)

    def test_random_is_seeded_and_legal(self):
        refused = set(enumerate_space(256)[::3])
        ctx = ConstraintContext(256, 256)
        strategy = FallbackStrategy.random(5, prior_refused=refused)
        a = classify(Fixed(wg(128, 128)), ctx, strategy, probe_for(refused))
        assert a == classify(Fixed(wg(128, 128)), ctx, strategy, probe_for(refused))
        assert a[0] not in refused and a[0].area() <= 256

    @pytest.mark.parametrize("strategy", [FallbackStrategy.random(0), FallbackStrategy.nearest_neighbour(), FallbackStrategy.from_baseline([wg(2, 2)])])
    def test_no_legal(self, strategy):
        with pytest.raises(NoLegalParameter):
            classify(Fixed(wg(2, 2)), ConstraintContext(8, 8), strategy, probe_for(enumerate_space(8)))

    @settings(max_examples=60)
    @given(
        st.sampled_from(list(Fallback)),
        st.sampled_from(enumerate_space(512)),
        st.sets(st.sampled_from(enumerate_space(256)), max_size=40),
        st.integers(0, 100),
    )
    def test_always_legal(self, kind, pred, refused, seed):
        ctx = ConstraintContext(256, 256)
        strategy = {
            Fallback.BASELINE: FallbackStrategy.from_baseline(enumerate_space(256)[::-1]),
            Fallback.RANDOM: FallbackStrategy.random(seed, prior_refused=refused),
            Fallback.NEAREST_NEIGHBOUR: FallbackStrategy.nearest_neighbour(refused),
        }[kind]
        w, it = classify(Fixed(pred), ctx, strategy, probe_for(refused, limit=256))
        assert w.area() <= 256 and w not in refused
        assert (it == 0) == (pred.area() <= 256 and pred not in refused)


class TestRegress:
    RT = {wg(2, 2): 10.0, wg(4, 2): 5.0, wg(2, 4): 8.0}

    def test_argmin_runtime(self):
        assert tune_regress(Table(self.RT), S, ConstraintContext(8, 8), FitnessMode.RUNTIME_RECIPROCAL, probe_for(), ()) == (wg(4, 2), 0)

    def test_refused_on_probe(self):
        got = tune_regress(Table(self.RT), S, ConstraintContext(8, 8), FitnessMode.RUNTIME_RECIPROCAL, probe_for({wg(4, 2)}), ())
        assert got == (wg(2, 4), 1)

    def test_known_refused_not_probed(self):
        log = []
        ctx = ConstraintContext(8, 8, {wg(4, 2)})
        assert tune_regress(Table(self.RT), S, ctx, "runtime", probe_for(log=log), ())[0] == wg(2, 4)
        assert log == [wg(2, 4)]

    def test_speedup_argmax(self):
        m = Table({wg(2, 2): 1.1, wg(4, 2): 2.0, wg(2, 4): 0.5}, mode=SPEEDUP)
        assert tune_regress(m, S, ConstraintContext(8, 8), FitnessMode.SPEEDUP, probe_for(), ())[0] == wg(4, 2)

    def test_ties_lexicographic(self):
        m = Table({w: 1.0 for w in enumerate_space(16)}, mode=SPEEDUP)
        assert rank_candidates(m, S, ConstraintContext(16, 16), "speedup", ()) == enumerate_space(16)

    def test_mode_mismatch(self):
        with pytest.raises(InvalidArgument):
            tune_regress(Table(self.RT, mode=SPEEDUP), S, ConstraintContext(8, 8), "runtime", probe_for(), ())

    def test_non_positive_prediction(self):
        with pytest.raises(InvalidPrediction):
            tune_regress(Table({wg(2, 2): -1.0}), S, ConstraintContext(8, 8), "runtime", probe_for(), ())

    def test_exhausted(self):
        with pytest.raises(NoLegalParameter):
            tune_regress(Table(self.RT), S, ConstraintContext(8, 8), "runtime", probe_for(enumerate_space(8)), ())

    @given(st.integers(0, 30), st.randoms(use_true_random=False))
    def test_exactly_k_rejections(self, k, rnd):
        space = enumerate_space(256)
        order = space[:]
        rnd.shuffle(order)
        preds = {w: float(i + 1) for i, w in enumerate(order)}
        refused = set(order[:k])
        w, rej = tune_regress(Table(preds), S, ConstraintContext(256, 256), "runtime", probe_for(refused), ())
        assert (w, rej) == (order[k], k)


def test_perfect_regressor_finds_oracle(quiet_corpus):
    class Truth:
        mode = RUNTIME

        def __init__(self, s):
            self.s = s

        def predict_values(self, f, sizes):
            return model_runtimes(self.s, [w.w_c for w in sizes], [w.w_r for w in sizes])

    for sid in quiet_corpus.ids():
        s = quiet_corpus.scenarios[sid]
        probe = probe_for(quiet_corpus.refused[sid])
        w, _ = tune_regress(Truth(s), s, quiet_corpus.context(sid, known_refused=False), "runtime", probe, ())
        assert w == oracle(sid, quiet_corpus.table)

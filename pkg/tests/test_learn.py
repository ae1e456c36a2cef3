import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wgtune.errors import EmptyTrainingSet, SchemaError
from wgtune.features import FeatureVector
from wgtune.learn import (
    DECISION_TREE,
    NAIVE_BAYES,
    RANDOM_FOREST,
    ZERO_R,
    ForestConfig,
    LabelledDataset,
    RegressionDataset,
    gini,
    model_from_json,
    model_to_json,
    predict_label,
    predict_value,
    train_classifier,
    train_regressor,
)
from wgtune.learn.data import RUNTIME, SPEEDUP
from wgtune.space import wg

ALGOS = [ZERO_R, NAIVE_BAYES, DECISION_TREE, RANDOM_FOREST]
SMALL_FOREST = ForestConfig(n_trees=10)


def labelled(X, labels, names=None):
    X = np.asarray(X, dtype=float).reshape(len(labels), -1) if len(labels) else np.zeros((0, np.shape(X)[1]))
    return LabelledDataset(names or tuple(f"x{i}" for i in range(X.shape[1])), X, tuple(labels))


def fv(values, names=None):
    return FeatureVector(names or tuple(f"x{i}" for i in range(len(values))), tuple(float(v) for v in values))


def test_gini_identities():
    assert gini([5, 0]) == 0.0
    assert gini([3, 3]) == 0.5
    assert gini([1, 1, 1, 1]) == pytest.approx(0.75)


class TestClassifiers:
    @pytest.mark.parametrize("algo", ALGOS)
    def test_single_class(self, algo):
        rng = np.random.default_rng(0)
        data = labelled(rng.normal(size=(20, 3)), [wg(8, 4)] * 20)
        m = train_classifier(algo, data, seed=1, config=SMALL_FOREST if algo == RANDOM_FOREST else None)
        for x in rng.normal(size=(10, 3)) * 100:
            assert predict_label(m, fv(x)) == wg(8, 4)

    @pytest.mark.parametrize("algo", ALGOS)
    def test_empty(self, algo):
        with pytest.raises(EmptyTrainingSet):
            train_classifier(algo, labelled(np.zeros((0, 2)), []))

    def test_zeror_mode(self):
        m = train_classifier(ZERO_R, labelled([[0], [1], [2], [3]], ["A", "A", "A", "B"]))
        assert predict_label(m, fv([0])) == "A" == predict_label(m, fv([99]))

    def test_tree_threshold_set(self):
        x = np.linspace(-5, 5, 100)
        labels = ["A" if v < 0 else "B" for v in x]
        m = train_classifier(DECISION_TREE, labelled(x[:, None], labels))
        assert [predict_label(m, fv([v])) for v in x] == labels

    def test_schema_mismatch(self):
        m = train_classifier(DECISION_TREE, labelled([[0, 1], [1, 0]], ["A", "B"]))
        with pytest.raises(SchemaError):
            m.predict_label(fv([0, 1], names=("a", "b")))
        with pytest.raises(SchemaError):
            m.predict_label(fv([0, 1, 2]))

    def test_naive_bayes_matches_hand_posterior(self):
        rng = np.random.default_rng(4)
        a = rng.normal([0, 0], [1.0, 0.5], size=(30, 2))
        b = rng.normal([4, 3], [0.7, 1.2], size=(20, 2))
        X = np.vstack([a, b])
        labels = ["A"] * 30 + ["B"] * 20
        m = train_classifier(NAIVE_BAYES, labelled(X, labels))
        eps = 1e-9 * X.var(axis=0)

        def log_post(x, pts, prior):
            mu, var = pts.mean(axis=0), pts.var(axis=0) + eps
            return math.log(prior) + sum(-0.5 * math.log(2 * math.pi * v) - (xi - u) ** 2 / (2 * v) for xi, u, v in zip(x, mu, var))

        for x in rng.uniform(-3, 7, size=(20, 2)):
            want = "A" if log_post(x, a, 0.6) >= log_post(x, b, 0.4) else "B"
            assert predict_label(m, fv(x)) == want

    def test_forest_is_plurality_vote(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(80, 4))
        labels = [("A", "B", "C")[int(v)] for v in np.digitize(X[:, 0] + 0.5 * rng.normal(size=80), [-0.5, 0.5])]
        m = train_classifier(RANDOM_FOREST, labelled(X, labels), seed=3, config=SMALL_FOREST)
        Q = rng.normal(size=(25, 4))
        votes = m.tree_votes(Q)
        for j, q in enumerate(Q):
            counts = np.bincount(votes[:, j], minlength=len(m.classes))
            assert m.predict([q])[0] == m.classes[int(np.argmax(counts))]

    def test_forest_deterministic(self):
        rng = np.random.default_rng(5)
        data = labelled(rng.normal(size=(60, 5)), [str(i % 4) for i in range(60)])
        a = train_classifier(RANDOM_FOREST, data, seed=7, config=SMALL_FOREST)
        b = train_classifier(RANDOM_FOREST, data, seed=7, config=SMALL_FOREST)
        assert model_to_json(a) == model_to_json(b)

    @pytest.mark.parametrize("algo", ALGOS)
    def test_predicts_seen_labels(self, algo, corpus):
        from wgtune.techniques import labelled_dataset
        data = labelled_dataset(corpus, corpus.ids()[:30])
        m = train_classifier(algo, data, seed=0, config=SMALL_FOREST if algo == RANDOM_FOREST else None)
        seen = set(data.labels)
        for sid in corpus.ids():
            assert m.predict_label(corpus.features(sid)) in seen

    @settings(max_examples=25)
    @given(st.integers(0, 10**6), st.sampled_from(["exp", "cube", "affine", "log"]))
    def test_tree_models_invariant_to_monotone_transform(self, seed, kind):
        rng = np.random.default_rng(seed)
        X = rng.uniform(0.5, 3.0, size=(60, 3))
        labels = [("A", "B", "C")[int(v)] for v in (X[:, 0] + X[:, 1] + rng.normal(0, 0.3, 60)) % 3]
        f = {"exp": np.exp, "cube": lambda v: v**3, "affine": lambda v: 7 * v - 2, "log": np.log}[kind]
        Q = rng.uniform(0.5, 3.0, size=(30, 3))
        col = int(rng.integers(3))
        X2, Q2 = X.copy(), Q.copy()
        X2[:, col], Q2[:, col] = f(X[:, col]), f(Q[:, col])
        for algo, cfg in ((DECISION_TREE, None), (RANDOM_FOREST, ForestConfig(n_trees=5))):
            a = train_classifier(algo, labelled(X, labels), seed=seed, config=cfg)
            b = train_classifier(algo, labelled(X2, labels), seed=seed, config=cfg)
            assert a.predict(Q) == b.predict(Q2)


def regression(X, sizes, y, mode=RUNTIME):
    X = np.asarray(X, dtype=float).reshape(len(sizes), -1) if len(sizes) else np.zeros((0, np.shape(X)[1]))
    return RegressionDataset(tuple(f"x{i}" for i in range(X.shape[1])), X, tuple(sizes), np.asarray(y, float), mode)


class TestRegressor:
    def test_constant_target(self):
        rng = np.random.default_rng(0)
        sizes = [wg(2 * rng.integers(1, 16), 2 * rng.integers(1, 16)) for _ in range(50)]
        m = train_regressor(regression(rng.normal(size=(50, 2)), sizes, [3.25] * 50), seed=1, config=ForestConfig(n_trees=5, min_leaf=5, max_features="third"))
        for x in rng.normal(size=(10, 2)):
            assert predict_value(m, fv(x), wg(4, 4)) == 3.25

    def test_learns_w_c(self):
        rng = np.random.default_rng(1)
        n = 500
        sizes = [wg(int(2 * rng.integers(1, 33)), int(2 * rng.integers(1, 33))) for _ in range(n)]
        X = rng.normal(size=(n, 2))
        y = np.array([w.w_c for w in sizes], float)
        m = train_regressor(regression(X[:400], sizes[:400], y[:400]), seed=2)
        pred = np.array([predict_value(m, fv(x), w) for x, w in zip(X[400:], sizes[400:])])
        assert np.mean(np.abs(pred - y[400:])) < 0.1 * (y.max() - y.min())

    def test_memorises_with_one_tree(self):
        rng = np.random.default_rng(3)
        sizes = [wg(2 * i, 2) for i in range(1, 21)]
        X = rng.normal(size=(20, 2))
        y = rng.uniform(1, 10, 20)
        m = train_regressor(regression(X, sizes, y), config=ForestConfig(n_trees=1, min_leaf=1, max_features=None, bootstrap=False))
        for x, w, t in zip(X, sizes, y):
            assert predict_value(m, fv(x), w) == t

    def test_bounded_by_targets_and_w_sensitive(self):
        rng = np.random.default_rng(4)
        sizes = [wg(int(2 * rng.integers(1, 17)), int(2 * rng.integers(1, 17))) for _ in range(300)]
        X = np.zeros((300, 1))
        y = np.array([1.0 + w.w_r for w in sizes])
        m = train_regressor(regression(X, sizes, y), seed=5, config=ForestConfig(n_trees=10, min_leaf=5, max_features="third"))
        vals = m.predict_values(fv([0.0]), [wg(c, r) for c in (2, 64, 200) for r in (2, 30, 100)])
        assert np.all(vals >= y.min()) and np.all(vals <= y.max())
        assert predict_value(m, fv([0.0]), wg(4, 2)) != predict_value(m, fv([0.0]), wg(4, 30))

    def test_deterministic_and_serialisable(self):
        rng = np.random.default_rng(6)
        sizes = [wg(2 * i, 4) for i in range(1, 41)]
        data = regression(rng.normal(size=(40, 3)), sizes, rng.uniform(0.5, 2, 40), mode=SPEEDUP)
        cfg = ForestConfig(n_trees=4, min_leaf=5, max_features="third")
        a, b = train_regressor(data, seed=9, config=cfg), train_regressor(data, seed=9, config=cfg)
        assert model_to_json(a) == model_to_json(b)
        c = model_from_json(json.loads(json.dumps(model_to_json(a))))
        assert c.mode == SPEEDUP
        q = fv(rng.normal(size=3))
        assert np.array_equal(a.predict_values(q, sizes), c.predict_values(q, sizes))

    def test_empty(self):
        with pytest.raises(EmptyTrainingSet):
            train_regressor(regression(np.zeros((0, 1)), [], []))

    def test_runtime_targets_positive(self):
        with pytest.raises(ValueError):
            regression([[0.0]], [wg(2, 2)], [0.0])


@pytest.mark.parametrize("algo", ALGOS)
def test_classifier_json_round_trip(algo, corpus):
    from wgtune.techniques import labelled_dataset
    data = labelled_dataset(corpus, corpus.ids())
    m = train_classifier(algo, data, seed=4, config=SMALL_FOREST if algo == RANDOM_FOREST else None)
    back = model_from_json(json.loads(json.dumps(model_to_json(m))))
    assert back.algorithm == algo
    for sid in corpus.ids():
        assert back.predict_label(corpus.features(sid)) == m.predict_label(corpus.features(sid))

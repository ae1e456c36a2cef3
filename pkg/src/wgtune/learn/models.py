"""Classifiers and the forest regressor, with a uniform train/predict surface."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyTrainingSet, InvalidArgument, SchemaError
from .data import RUNTIME, SPEEDUP, WG_FEATURES, LabelledDataset, RegressionDataset, wg_columns
from .tree import GINI, VARIANCE, Tree, build_tree

ZERO_R = "ZeroR"
NAIVE_BAYES = "NaiveBayes"
DECISION_TREE = "DecisionTree"
RANDOM_FOREST = "RandomForest"
CLASSIFIERS = (ZERO_R, NAIVE_BAYES, DECISION_TREE, RANDOM_FOREST)


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 16
    min_leaf: int = 2


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 50
    max_depth: int = 16
    min_leaf: int = 2
    # "sqrt", "third", an int, or None for every feature
    max_features: object = "sqrt"
    bootstrap: bool = True
    # rows drawn per tree; None draws as many as the training set holds
    max_samples: int | None = None


REGRESSOR_DEFAULTS = ForestConfig(n_trees=50, max_depth=16, min_leaf=5, max_features="third", max_samples=None)


def _n_features(spec, d: int) -> int | None:
    if spec is None:
        return None
    if spec == "sqrt":
        return max(1, int(math.sqrt(d)))
    if spec == "third":
        return max(1, d // 3)
    return max(1, min(d, int(spec)))


def _tree_seeds(seed, n):
    return np.random.SeedSequence(seed).spawn(n)


def _check_schema(model_schema, f):
    names = getattr(f, "names", None)
    if names is None:
        x = np.asarray(f, dtype=float).reshape(-1)
        if x.size != len(model_schema):
            raise SchemaError(f"expected {len(model_schema)} features, got {x.size}")
        return x
    if tuple(names) != tuple(model_schema):
        raise SchemaError("feature vector schema differs from the training schema")
    return np.asarray(f.values, dtype=float)


class Classifier:
    algorithm: str
    schema: tuple
    classes: tuple

    def predict_index(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X: np.ndarray) -> list:
        return [self.classes[i] for i in self.predict_index(np.atleast_2d(np.asarray(X, dtype=float)))]

    def predict_label(self, f):
        x = _check_schema(self.schema, f)
        return self.classes[int(self.predict_index(x[None, :])[0])]


def _encode(labels):
    classes = tuple(sorted(set(labels)))
    index = {c: i for i, c in enumerate(classes)}
    return classes, np.array([index[c] for c in labels], dtype=np.int64)


class ZeroR(Classifier):
    """Predicts the most frequent training label regardless of input."""

    algorithm = ZERO_R

    def __init__(self, schema, classes, label_index: int):
        self.schema, self.classes, self.label_index = tuple(schema), tuple(classes), int(label_index)

    @classmethod
    def fit(cls, data: LabelledDataset):
        classes, y = _encode(data.labels)
        return cls(data.schema, classes, int(np.argmax(np.bincount(y, minlength=len(classes)))))

    def predict_index(self, X):
        return np.full(X.shape[0], self.label_index, dtype=np.int64)


class NaiveBayes(Classifier):
    """Gaussian naive Bayes.

    Each class variance is inflated by ``var_smoothing`` times that
    feature's variance over the whole training set (1.0 for constant
    features) so single-sample classes stay usable.
    """

    algorithm = NAIVE_BAYES

    def __init__(self, schema, classes, log_prior, means, variances):
        self.schema, self.classes = tuple(schema), tuple(classes)
        self.log_prior = np.asarray(log_prior, dtype=float)
        self.means = np.asarray(means, dtype=float)
        self.variances = np.asarray(variances, dtype=float)

    @classmethod
    def fit(cls, data: LabelledDataset, var_smoothing: float = 1e-9):
        classes, y = _encode(data.labels)
        X = data.X
        k = len(classes)
        global_var = X.var(axis=0)
        eps = np.where(global_var > 0, var_smoothing * global_var, 1.0)
        counts = np.bincount(y, minlength=k).astype(float)
        means = np.array([X[y == c].mean(axis=0) for c in range(k)])
        variances = np.array([X[y == c].var(axis=0) for c in range(k)]) + eps
        return cls(data.schema, classes, np.log(counts / counts.sum()), means, variances)

    def joint_log_likelihood(self, X) -> np.ndarray:
        X = np.atleast_2d(X)
        diff = X[:, None, :] - self.means[None, :, :]
        ll = -0.5 * (np.log(2 * np.pi * self.variances)[None] + diff**2 / self.variances[None]).sum(axis=2)
        return ll + self.log_prior[None, :]

    def predict_index(self, X):
        return np.argmax(self.joint_log_likelihood(X), axis=1)


class DecisionTree(Classifier):
    algorithm = DECISION_TREE

    def __init__(self, schema, classes, tree: Tree):
        self.schema, self.classes, self.tree = tuple(schema), tuple(classes), tree

    @classmethod
    def fit(cls, data: LabelledDataset, config: TreeConfig = TreeConfig()):
        classes, y = _encode(data.labels)
        tree = build_tree(data.X, y, GINI, max_depth=config.max_depth, min_leaf=config.min_leaf, n_classes=len(classes))
        return cls(data.schema, classes, tree)

    def predict_index(self, X):
        # argmax returns the first maximum, so ties go to the smallest label
        return np.argmax(self.tree.value[self.tree.apply(X)], axis=1)


class RandomForest(Classifier):
    """Bagged Gini trees with per-node feature subsampling; plurality vote."""

    algorithm = RANDOM_FOREST

    def __init__(self, schema, classes, trees):
        self.schema, self.classes, self.trees = tuple(schema), tuple(classes), list(trees)

    @classmethod
    def fit(cls, data: LabelledDataset, config: ForestConfig = ForestConfig(), seed: int = 0):
        classes, y = _encode(data.labels)
        n, d = data.X.shape
        trees = []
        for ss in _tree_seeds(seed, config.n_trees):
            rng = np.random.default_rng(ss)
            idx = rng.integers(0, n, size=config.max_samples or n) if config.bootstrap else np.arange(n)
            trees.append(
                build_tree(
                    data.X[idx], y[idx], GINI,
                    max_depth=config.max_depth, min_leaf=config.min_leaf,
                    max_features=_n_features(config.max_features, d), rng=rng, n_classes=len(classes),
                )
            )
        return cls(data.schema, classes, trees)

    def tree_votes(self, X) -> np.ndarray:
        """Class index chosen by each tree, shape ``(n_trees, n_rows)``."""
        X = np.atleast_2d(X)
        return np.array([np.argmax(t.value[t.apply(X)], axis=1) for t in self.trees])

    def predict_index(self, X):
        votes = self.tree_votes(X)
        k = len(self.classes)
        tally = np.stack([np.bincount(votes[:, j], minlength=k) for j in range(votes.shape[1])])
        return np.argmax(tally, axis=1)


_CLASSIFIER_TYPES = {c.algorithm: c for c in (ZeroR, NaiveBayes, DecisionTree, RandomForest)}


def train_classifier(algo: str, data: LabelledDataset, seed: int = 0, config=None) -> Classifier:
    if len(data) == 0:
        raise EmptyTrainingSet("cannot train on an empty dataset")
    if algo == ZERO_R:
        return ZeroR.fit(data)
    if algo == NAIVE_BAYES:
        return NaiveBayes.fit(data)
    if algo == DECISION_TREE:
        return DecisionTree.fit(data, config or TreeConfig())
    if algo == RANDOM_FOREST:
        return RandomForest.fit(data, config or ForestConfig(), seed)
    raise InvalidArgument(f"unknown classifier {algo!r}; choose from {', '.join(CLASSIFIERS)}")


def predict_label(model: Classifier, f):
    return model.predict_label(f)


class ForestRegressor:
    """Mean of variance-reduction regression trees over ``f(s) ++ (w_c, w_r, area)``."""

    algorithm = "ForestRegressor"

    def __init__(self, schema, mode: str, trees):
        if mode not in (RUNTIME, SPEEDUP):
            raise InvalidArgument(f"unknown regression mode {mode!r}")
        self.schema, self.mode, self.trees = tuple(schema), mode, list(trees)

    @classmethod
    def fit(cls, data: RegressionDataset, config: ForestConfig = REGRESSOR_DEFAULTS, seed: int = 0):
        X = data.design_matrix()
        y = data.targets
        n, d = X.shape
        trees = []
        for ss in _tree_seeds(seed, config.n_trees):
            rng = np.random.default_rng(ss)
            idx = rng.integers(0, n, size=config.max_samples or n) if config.bootstrap else np.arange(n)
            trees.append(
                build_tree(
                    X[idx], y[idx], VARIANCE,
                    max_depth=config.max_depth, min_leaf=config.min_leaf,
                    max_features=_n_features(config.max_features, d), rng=rng,
                )
            )
        return cls(data.schema, data.mode, trees)

    @property
    def input_schema(self) -> tuple:
        return self.schema + WG_FEATURES

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.mean([t.value[t.apply(X)] for t in self.trees], axis=0)

    def predict_values(self, f, sizes) -> np.ndarray:
        """Predictions for one scenario at many workgroup sizes."""
        x = _check_schema(self.schema, f)
        sizes = list(sizes)
        X = np.hstack([np.repeat(x[None, :], len(sizes), axis=0), wg_columns(sizes)])
        return self.predict_matrix(X)

    def predict_value(self, f, w) -> float:
        return float(self.predict_values(f, [w])[0])


def train_regressor(data: RegressionDataset, seed: int = 0, config: ForestConfig = REGRESSOR_DEFAULTS) -> ForestRegressor:
    if len(data) == 0:
        raise EmptyTrainingSet("cannot train on an empty dataset")
    return ForestRegressor.fit(data, config, seed)


def predict_value(model, f, w) -> float:
    return model.predict_value(f, w)

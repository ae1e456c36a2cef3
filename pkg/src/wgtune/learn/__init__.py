from .data import RUNTIME, SPEEDUP, WG_FEATURES, LabelledDataset, RegressionDataset
from .models import (
    CLASSIFIERS,
    DECISION_TREE,
    NAIVE_BAYES,
    RANDOM_FOREST,
    REGRESSOR_DEFAULTS,
    ZERO_R,
    Classifier,
    DecisionTree,
    ForestConfig,
    ForestRegressor,
    NaiveBayes,
    RandomForest,
    TreeConfig,
    ZeroR,
    predict_label,
    predict_value,
    train_classifier,
    train_regressor,
)
from .serialize import model_from_json, model_to_json
from .tree import Tree, build_tree, gini

__all__ = [
    "RUNTIME", "SPEEDUP", "WG_FEATURES", "LabelledDataset", "RegressionDataset",
    "CLASSIFIERS", "DECISION_TREE", "NAIVE_BAYES", "RANDOM_FOREST", "ZERO_R", "REGRESSOR_DEFAULTS",
    "Classifier", "DecisionTree", "ForestConfig", "ForestRegressor", "NaiveBayes", "RandomForest",
    "TreeConfig", "ZeroR", "predict_label", "predict_value", "train_classifier", "train_regressor",
    "model_from_json", "model_to_json", "Tree", "build_tree", "gini",
]

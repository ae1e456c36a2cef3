"""JSON form of trained models.

Every document carries ``algorithm`` and ``schema``. Classifier labels are
stored as strings with a ``label_type`` of ``"wgsize"`` (``"<w_c>x<w_r>"``)
or ``"str"``. Trees are nested objects: a split node is
``{"feature": i, "threshold": t, "left": {...}, "right": {...}}`` (rows with
``x[i] <= t`` go left) and a leaf is ``{"leaf": v}`` where ``v`` is a list of
per-class counts for classifiers or the mean target for regressors.
"""
from __future__ import annotations

from ..errors import InvalidArgument
from ..space import WorkgroupSize
from .models import DecisionTree, ForestRegressor, NaiveBayes, RandomForest, ZeroR
from .tree import Tree


def _labels_out(classes):
    if all(isinstance(c, WorkgroupSize) for c in classes):
        return "wgsize", [str(c) for c in classes]
    return "str", [str(c) for c in classes]


def _labels_in(kind, values):
    if kind == "wgsize":
        return tuple(WorkgroupSize.parse(v) for v in values)
    return tuple(values)


def _counts(v):
    return [float(x) for x in v]


def model_to_json(model) -> dict:
    doc = {"algorithm": model.algorithm, "schema": list(model.schema)}
    if isinstance(model, ForestRegressor):
        doc["mode"] = model.mode
        doc["trees"] = [t.to_nested(leaf=float) for t in model.trees]
        return doc
    doc["label_type"], doc["classes"] = _labels_out(model.classes)
    if isinstance(model, ZeroR):
        doc["label_index"] = model.label_index
    elif isinstance(model, NaiveBayes):
        doc["log_prior"] = model.log_prior.tolist()
        doc["means"] = model.means.tolist()
        doc["variances"] = model.variances.tolist()
    elif isinstance(model, DecisionTree):
        doc["tree"] = model.tree.to_nested(leaf=_counts)
    elif isinstance(model, RandomForest):
        doc["trees"] = [t.to_nested(leaf=_counts) for t in model.trees]
    else:
        raise InvalidArgument(f"cannot serialise {type(model).__name__}")
    return doc


def model_from_json(doc: dict):
    algo = doc.get("algorithm")
    schema = tuple(doc["schema"])
    if algo == ForestRegressor.algorithm:
        return ForestRegressor(schema, doc["mode"], [Tree.from_nested(t) for t in doc["trees"]])
    classes = _labels_in(doc.get("label_type", "str"), doc["classes"])
    if algo == ZeroR.algorithm:
        return ZeroR(schema, classes, doc["label_index"])
    if algo == NaiveBayes.algorithm:
        return NaiveBayes(schema, classes, doc["log_prior"], doc["means"], doc["variances"])
    if algo == DecisionTree.algorithm:
        return DecisionTree(schema, classes, Tree.from_nested(doc["tree"]))
    if algo == RandomForest.algorithm:
        return RandomForest(schema, classes, [Tree.from_nested(t) for t in doc["trees"]])
    raise InvalidArgument(f"unknown model algorithm {algo!r}")

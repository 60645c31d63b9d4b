"""Random forest over selected descriptor indices, trained once and frozen.

Trees are grown on bootstrap samples with Gini impurity splits over a random
feature subset of size ceil(sqrt(n_features)) per node, until pure or the
min-leaf-2 rule blocks every split. The trained model serializes to a
deterministic JSON file.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from smigan import rng as rngmod
from smigan.auxdisc.logistic import InsufficientData
from smigan.errors import DataError


class SchemaMismatch(DataError):
    pass


@dataclass
class TreeNodes:
    """Flat node arrays; feature == -1 marks a leaf."""
    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    probs: list[list[float]] = field(default_factory=list)

    def add(self, feature: int, threshold: float, probs: list[float] | None) -> int:
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(-1)
        self.right.append(-1)
        self.probs.append(probs if probs is not None else [])
        return len(self.feature) - 1


@dataclass
class RandomForestModel:
    trees: list[TreeNodes]
    features: list[int]          # selected descriptor indices
    n_trees: int
    n_classes: int
    class_names: list[str]
    schema_version: str
    rules: list[dict]            # per-class structural-rule parameters

    def to_json(self) -> str:
        payload = {
            "schema_version": self.schema_version,
            "class_names": self.class_names,
            "n_classes": self.n_classes,
            "n_trees": self.n_trees,
            "features": self.features,
            "rules": self.rules,
            "trees": [
                {
                    "feature": t.feature,
                    "threshold": t.threshold,
                    "left": t.left,
                    "right": t.right,
                    "probs": t.probs,
                }
                for t in self.trees
            ],
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "RandomForestModel":
        payload = json.loads(text)
        trees = [
            TreeNodes(t["feature"], t["threshold"], t["left"], t["right"], t["probs"])
            for t in payload["trees"]
        ]
        return cls(
            trees=trees,
            features=payload["features"],
            n_trees=payload["n_trees"],
            n_classes=payload["n_classes"],
            class_names=payload["class_names"],
            schema_version=payload["schema_version"],
            rules=payload["rules"],
        )


_MIN_LEAF = 2


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return 1.0 - float(p @ p)


def _best_split(x: np.ndarray, y: np.ndarray, feats: np.ndarray, n_classes: int):
    """(feature, threshold) minimizing weighted child Gini, or None."""
    best = None
    best_score = math.inf
    for f in feats:
        col = x[:, f]
        order = np.argsort(col, kind="stable")
        col_s = col[order]
        y_s = y[order]
        left_counts = np.zeros(n_classes)
        right_counts = np.bincount(y_s, minlength=n_classes).astype(np.float64)
        n = len(y_s)
        for i in range(n - 1):
            left_counts[y_s[i]] += 1
            right_counts[y_s[i]] -= 1
            if col_s[i + 1] == col_s[i]:
                continue
            n_left = i + 1
            n_right = n - n_left
            if n_left < _MIN_LEAF or n_right < _MIN_LEAF:
                continue
            score = (n_left * _gini(left_counts) + n_right * _gini(right_counts)) / n
            if score < best_score - 1e-12:
                best_score = score
                best = (int(f), float((col_s[i] + col_s[i + 1]) / 2.0))
    if best is None:
        return None
    parent = _gini(np.bincount(y, minlength=n_classes).astype(np.float64))
    return best if best_score < parent - 1e-12 else None


def _grow_tree(x: np.ndarray, y: np.ndarray, n_classes: int,
               gen: np.random.Generator) -> TreeNodes:
    nodes = TreeNodes()
    m = int(math.ceil(math.sqrt(x.shape[1])))

    def leaf_probs(rows: np.ndarray) -> list[float]:
        counts = np.bincount(y[rows], minlength=n_classes).astype(np.float64)
        return (counts / counts.sum()).tolist()

    def grow(rows: np.ndarray) -> int:
        labels = y[rows]
        if len(np.unique(labels)) == 1 or len(rows) < 2 * _MIN_LEAF:
            return nodes.add(-1, 0.0, leaf_probs(rows))
        feats = gen.choice(x.shape[1], size=m, replace=False)
        split = _best_split(x[rows], labels, np.sort(feats), n_classes)
        if split is None:
            return nodes.add(-1, 0.0, leaf_probs(rows))
        f, thr = split
        node = nodes.add(f, thr, None)
        mask = x[rows, f] <= thr
        nodes.left[node] = grow(rows[mask])
        nodes.right[node] = grow(rows[~mask])
        return node

    grow(np.arange(len(y)))
    return nodes


def train_random_forest(
    values: np.ndarray,
    labels: np.ndarray,
    features: list[int],
    n_trees: int = 100,
    seed: int = 0,
    class_names: list[str] | None = None,
    schema_version: str = "",
    rules: list[dict] | None = None,
) -> RandomForestModel:
    """Bootstrap-aggregated Gini trees over the selected feature columns."""
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if len(values) < 2:
        raise InsufficientData("need at least two rows to train")
    if not features:
        raise InsufficientData("feature list is empty")
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    x = values[:, features]
    n_classes = int(labels.max()) + 1
    trees = []
    for t in range(n_trees):
        gen = rngmod.stream(seed, rngmod.FOREST, t)
        boot = gen.integers(0, len(x), size=len(x))
        trees.append(_grow_tree(x[boot], labels[boot], n_classes, gen))
    return RandomForestModel(
        trees=trees,
        features=list(features),
        n_trees=n_trees,
        n_classes=n_classes,
        class_names=class_names or [str(c) for c in range(n_classes)],
        schema_version=schema_version,
        rules=rules or [],
    )


def predict_proba(model: RandomForestModel, values: np.ndarray,
                  schema_version: str | None = None) -> np.ndarray:
    """Mean of tree leaf probability vectors; accepts (d,) or (n, d)."""
    values = np.asarray(values, dtype=np.float64)
    single = values.ndim == 1
    if single:
        values = values[None, :]
    if schema_version is not None and schema_version != model.schema_version:
        raise SchemaMismatch(
            f"model schema {model.schema_version!r} != input {schema_version!r}")
    if values.shape[1] <= max(model.features):
        raise SchemaMismatch("descriptor vector shorter than the model schema")
    x = values[:, model.features]
    out = np.zeros((len(x), model.n_classes))
    for tree in model.trees:
        feature = np.asarray(tree.feature)
        threshold = np.asarray(tree.threshold)
        left = np.asarray(tree.left)
        right = np.asarray(tree.right)
        node = np.zeros(len(x), dtype=np.int64)
        while True:
            at_leaf = feature[node] == -1
            if at_leaf.all():
                break
            live = ~at_leaf
            f = feature[node[live]]
            goes_left = x[live, f] <= threshold[node[live]]
            nxt = np.where(goes_left, left[node[live]], right[node[live]])
            node[live] = nxt
        probs = np.asarray([tree.probs[n] for n in node])
        out += probs
    out /= model.n_trees
    return out[0] if single else out

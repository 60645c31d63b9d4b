"""Univariate logistic-regression feature screening with cross-validated AUC."""
from __future__ import annotations

import numpy as np

from smigan.errors import DataError
from smigan import rng as rngmod


class DegenerateLabels(DataError):
    pass


class InsufficientData(DataError):
    pass


def auc(scores, labels) -> float:
    """Mann-Whitney AUC: probability a random positive outranks a random
    negative, ties counted 0.5."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels("AUC needs both classes present")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0  # average rank, 1-based
        i = j + 1
    rank_sum_pos = ranks[labels == 1].sum()
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def _fit_univariate(x: np.ndarray, y: np.ndarray, iters: int = 200, lr: float = 0.1):
    """Logistic fit on one z-scored feature by plain gradient descent."""
    mu, sd = x.mean(), x.std()
    sd = sd if sd > 1e-12 else 1.0
    xz = (x - mu) / sd
    w, b = 0.0, 0.0
    n = len(x)
    for _ in range(iters):
        z = w * xz + b
        p = 1.0 / (1.0 + np.exp(-z))
        err = p - y
        w -= lr * float(err @ xz) / n
        b -= lr * float(err.sum()) / n
    return w, b, mu, sd


def _stratified_folds(labels: np.ndarray, folds: int, seed: int) -> np.ndarray:
    """Fold assignment per row: seeded shuffle, then round-robin per class."""
    assign = np.empty(len(labels), dtype=np.int64)
    gen = rngmod.stream(seed, rngmod.FOLDS)
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        idx = idx[gen.permutation(len(idx))]
        assign[idx] = np.arange(len(idx)) % folds
    return assign


def select_features(
    values: np.ndarray,
    labels: np.ndarray,
    k: int,
    folds: int = 5,
    seed: int = 0,
) -> list[int]:
    """Rank features by mean held-out AUC of a per-feature logistic fit;
    return the top-k indices in descending AUC (ties by ascending index).
    With more than two classes the screen is first-class-vs-rest.
    """
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if k == 0:
        return []
    if values.ndim != 2 or k > values.shape[1]:
        raise InsufficientData("k exceeds the descriptor schema length")
    classes, counts = np.unique(labels, return_counts=True)
    if len(classes) < 2:
        raise DegenerateLabels("feature selection needs at least two classes")
    if counts.min() < folds:
        raise InsufficientData(
            f"every class needs >= {folds} rows for {folds}-fold CV")
    y = (labels != classes[0]).astype(np.float64)

    assign = _stratified_folds(labels, folds, seed)
    scores = np.zeros(values.shape[1])
    for f in range(values.shape[1]):
        fold_aucs = []
        for fold in range(folds):
            train = assign != fold
            test = ~train
            if len(np.unique(y[test])) < 2:
                continue
            w, b, mu, sd = _fit_univariate(values[train, f], y[train])
            z = w * (values[test, f] - mu) / sd + b
            fold_aucs.append(auc(z, y[test].astype(np.int64)))
        scores[f] = float(np.mean(fold_aucs)) if fold_aucs else 0.5
    ranked = sorted(range(values.shape[1]), key=lambda i: (-scores[i], i))
    return ranked[:k]

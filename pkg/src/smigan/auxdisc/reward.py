"""Frozen-classifier reward for generated SMILES text."""
from __future__ import annotations

import numpy as np

from smigan.auxdisc.forest import RandomForestModel, predict_proba
from smigan.auxdisc.rules import StructuralRules, structural_score
from smigan.chem import MolecularGraph, ParseError, TokenizeError, parse
from smigan.descriptors import SCHEMA_VERSION, compute_descriptors


def class_rules(model: RandomForestModel, label: int) -> StructuralRules:
    if model.rules and label < len(model.rules):
        return StructuralRules.from_dict(model.rules[label])
    return StructuralRules()


def auxiliary_reward(
    model: RandomForestModel,
    smiles: str,
    label: int,
    mode: str = "product",
    threshold: float = 0.40,
) -> float:
    """Reward in [0, 1] for one string; unparseable input scores 0.0.

    product: classifier probability x structural multiplier.
    threshold: 1.0 once the class probability exceeds `threshold`, otherwise
    the product score (keeps a gradient for near-misses).
    """
    try:
        graph = parse(smiles)
    except (ParseError, TokenizeError):
        return 0.0
    return _reward_from_graph(model, graph, label, mode, threshold)


def _reward_from_graph(model, graph, label, mode, threshold) -> float:
    proba = predict_proba(model, compute_descriptors(graph), SCHEMA_VERSION)
    p = float(proba[label])
    if mode == "threshold" and p > threshold:
        return 1.0
    return p * structural_score(graph, class_rules(model, label))


def auxiliary_reward_many(
    model: RandomForestModel,
    texts: list[str],
    label: int,
    mode: str = "product",
    threshold: float = 0.40,
) -> np.ndarray:
    """Vectorized rewards for a batch of strings, with a per-call parse cache
    so repeated rollout completions are scored once."""
    cache: dict[str, float] = {}
    graphs: dict[str, MolecularGraph] = {}
    for text in texts:
        if text in cache or text in graphs:
            continue
        try:
            graphs[text] = parse(text)
        except (ParseError, TokenizeError):
            cache[text] = 0.0
    if graphs:
        keys = sorted(graphs)
        matrix = np.stack([compute_descriptors(graphs[k]) for k in keys])
        probas = predict_proba(model, matrix, SCHEMA_VERSION)
        for k, proba in zip(keys, probas):
            p = float(proba[label])
            if mode == "threshold" and p > threshold:
                cache[k] = 1.0
            else:
                cache[k] = p * structural_score(graphs[k], class_rules(model, label))
    return np.array([cache[t] for t in texts], dtype=np.float64)


def classify(model: RandomForestModel, graph: MolecularGraph) -> int:
    """Predicted class: argmax of probability x per-class structural score."""
    proba = predict_proba(model, compute_descriptors(graph), SCHEMA_VERSION)
    scored = [
        proba[c] * structural_score(graph, class_rules(model, c))
        for c in range(model.n_classes)
    ]
    return int(np.argmax(scored))

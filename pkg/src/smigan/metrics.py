"""Generation-quality metrics: validity, uniqueness, novelty, yield,
label responsiveness, diversity, and length statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from smigan import rng as rngmod
from smigan.auxdisc import RandomForestModel, classify
from smigan.chem import ParseError, TokenizeError, fingerprint, parse, tanimoto, tokenize
from smigan.chem import canonicalize
from smigan.errors import DataError


class EmptySampleSet(DataError):
    pass


@dataclass
class GenerationReport:
    n_samples: int
    validity: float
    uniqueness: float            # distinct canonical / valid
    novelty: float               # unseen canonical / distinct canonical
    class_ratio: list[float]     # per-class fraction among valid
    class_yield: list[float]     # validity * uniqueness * class_ratio[c]
    requested_class: int
    mean_len: float
    std_len: float
    diversity: float             # mean pairwise Tanimoto on the subsample
    diversity_sample: int

    @property
    def yield_value(self) -> float:
        return self.class_yield[self.requested_class]

    def to_record(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "validity": self.validity,
            "uniqueness": self.uniqueness,
            "novelty": self.novelty,
            "class_ratio": self.class_ratio,
            "class_yield": self.class_yield,
            "requested_class": self.requested_class,
            "yield": self.yield_value,
            "mean_len": self.mean_len,
            "std_len": self.std_len,
            "diversity": self.diversity,
            "diversity_sample": self.diversity_sample,
        }

    def to_text(self) -> str:
        lines = [f"{k} = {v}" for k, v in self.to_record().items()]
        return "\n".join(lines) + "\n"


def evaluate(
    samples: list[str],
    requested_class: int,
    training_canon: set[str],
    model: RandomForestModel,
    fp_radius: int = 2,
    fp_width: int = 2048,
    diversity_subsample: int = 1000,
    seed: int = 0,
) -> GenerationReport:
    """Score a sample set against the frozen classifier and training set.

    validity: parseable fraction. uniqueness: distinct canonicals among
    valid. novelty: distinct canonicals not in the training set. yield per
    class: validity x uniqueness x class ratio.
    """
    if not samples:
        raise EmptySampleSet("no samples to evaluate")
    n = len(samples)
    lengths: list[int] = []
    valid_graphs = []
    valid_canon = []
    for text in samples:
        try:
            toks = tokenize(text)
        except TokenizeError:
            continue
        lengths.append(len(toks))
        try:
            graph = parse(toks)
        except ParseError:
            continue
        valid_graphs.append(graph)
        valid_canon.append(canonicalize(graph))

    n_valid = len(valid_graphs)
    validity = n_valid / n
    distinct = sorted(set(valid_canon))
    uniqueness = len(distinct) / n_valid if n_valid else 0.0
    novel = [c for c in distinct if c not in training_canon]
    novelty = len(novel) / len(distinct) if distinct else 0.0

    counts = [0] * model.n_classes
    for graph in valid_graphs:
        counts[classify(model, graph)] += 1
    class_ratio = [c / n_valid if n_valid else 0.0 for c in counts]
    class_yield = [validity * uniqueness * r for r in class_ratio]

    diversity, div_n = _diversity(distinct, fp_radius, fp_width,
                                  diversity_subsample, seed)
    return GenerationReport(
        n_samples=n,
        validity=validity,
        uniqueness=uniqueness,
        novelty=novelty,
        class_ratio=class_ratio,
        class_yield=class_yield,
        requested_class=requested_class,
        mean_len=float(np.mean(lengths)) if lengths else 0.0,
        std_len=float(np.std(lengths)) if lengths else 0.0,
        diversity=diversity,
        diversity_sample=div_n,
    )


def _diversity(canons: list[str], radius: int, width: int,
               subsample: int, seed: int) -> tuple[float, int]:
    if len(canons) < 2:
        return 0.0, len(canons)
    picked = canons
    if len(canons) > subsample:
        gen = rngmod.stream(seed, rngmod.DIVERSITY)
        idx = gen.choice(len(canons), size=subsample, replace=False)
        picked = [canons[i] for i in sorted(idx)]
    fps = [fingerprint(parse(c), radius, width) for c in picked]
    total = 0.0
    pairs = 0
    for i in range(len(fps)):
        for j in range(i + 1, len(fps)):
            total += tanimoto(fps[i], fps[j])
            pairs += 1
    return total / pairs, len(picked)


def responsiveness(yield_target_label: float, yield_other_label: float) -> float:
    """log10 of the yield ratio; +/-inf sentinels when one side is zero and
    0.0 when both are (no preference either way)."""
    if yield_target_label == 0.0 and yield_other_label == 0.0:
        return 0.0
    if yield_other_label == 0.0:
        return math.inf
    if yield_target_label == 0.0:
        return -math.inf
    return math.log10(yield_target_label / yield_other_label)

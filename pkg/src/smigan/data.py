"""Dataset ingestion, preprocessing filters, vocabulary, and the
oversampling batch sampler.

Input format: comma-separated two-column text (label, SMILES) with an
optional "label,smiles" header. Rejected rows are reported with typed
reasons rather than aborting the run.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from smigan import rng as rngmod
from smigan.chem import (
    ParseError,
    Token,
    TokenizeError,
    canonicalize,
    connected_components,
    parse,
    subgraph,
    tokenize,
)
from smigan.errors import DataError

ALLOWED_ELEMENTS = {"C", "H", "N", "O", "F", "Cl", "Br", "I", "B", "S", "P"}

PAD, EOS = "<pad>", "<eos>"


class EmptyDataset(DataError):
    pass


class MalformedRow(DataError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnknownClass(DataError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    tokens: tuple[str, ...]          # reserved first, then chemistry tokens
    n_classes: int

    @property
    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.tokens)}

    @property
    def pad(self) -> int:
        return 0

    @property
    def eos(self) -> int:
        return 1

    def start(self, label: int) -> int:
        if not 0 <= label < self.n_classes:
            raise UnknownClass(f"class label {label} out of range")
        return 2 + label

    def __len__(self) -> int:
        return len(self.tokens)

    def encode(self, texts: list[str]) -> list[int]:
        idx = self.index
        return [idx[t] for t in texts]

    def decode(self, indices: list[int]) -> str:
        """Concatenated chemistry tokens; reserved tokens are dropped and
        everything after the end token is ignored."""
        out = []
        for i in indices:
            tok = self.tokens[i]
            if i == self.eos:
                break
            if i == self.pad or tok.startswith("<"):
                continue
            out.append(tok)
        return "".join(out)


@dataclass(frozen=True)
class DatasetRecord:
    label: int
    smiles: str              # canonical form
    tokens: tuple[int, ...]  # chemistry token indices (no start/eos)
    length: int


@dataclass(frozen=True)
class Rejection:
    row: int
    reason: str
    detail: str


def load_dataset(path: str) -> tuple[list[tuple[str, str]], list[str]]:
    """Raw (label text, SMILES text) rows in file order plus the class-name
    list in first-appearance order."""
    rows: list[tuple[str, str]] = []
    classes: list[str] = []
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise
    with fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise MalformedRow(lineno, f"expected 2 fields, got {len(row)}")
            label, smiles = row[0].strip(), row[1].strip()
            if lineno == 1 and label.lower() == "label" and smiles.lower() == "smiles":
                continue
            if not label or not smiles:
                raise MalformedRow(lineno, "empty label or SMILES field")
            if label not in classes:
                classes.append(label)
            rows.append((label, smiles))
    if not rows:
        raise EmptyDataset(f"no data rows in {path}")
    return rows, classes


def preprocess(label: int, smiles: str, row: int = 0,
               min_tokens: int = 10, max_tokens: int = 80):
    """DatasetRecord (without vocab indices) or a typed Rejection.

    Pipeline: parse; reject disallowed elements; keep the largest
    dot-separated fragment (salt stripping); canonicalize; enforce the token
    length window.
    """
    try:
        graph = parse(smiles)
    except (ParseError, TokenizeError) as err:
        return Rejection(row, "ParseFailure", str(err))
    bad = sorted({a.element for a in graph.atoms} - ALLOWED_ELEMENTS)
    if bad:
        return Rejection(row, "DisallowedElement", ",".join(bad))
    comps = connected_components(graph)
    if len(comps) > 1:
        frags = [subgraph(graph, comp) for comp in comps]
        frags.sort(key=lambda g: (-g.heavy_atom_count(), canonicalize(g)))
        graph = frags[0]
    canon = canonicalize(graph)
    token_texts = [t.text for t in tokenize(canon)]
    if not min_tokens <= len(token_texts) <= max_tokens:
        return Rejection(row, "LengthOutOfRange",
                         f"{len(token_texts)} tokens not in [{min_tokens}, {max_tokens}]")
    return label, canon, token_texts


def preprocess_dataset(
    raw_rows: list[tuple[str, str]],
    classes: list[str],
    min_tokens: int = 10,
    max_tokens: int = 80,
) -> tuple[list[DatasetRecord], Vocabulary, list[Rejection]]:
    """Filter rows, build the vocabulary, and encode records."""
    class_index = {name: i for i, name in enumerate(classes)}
    kept: list[tuple[int, str, list[str]]] = []
    rejected: list[Rejection] = []
    for row, (label_text, smiles) in enumerate(raw_rows, start=1):
        result = preprocess(class_index[label_text], smiles, row,
                            min_tokens, max_tokens)
        if isinstance(result, Rejection):
            rejected.append(result)
        else:
            kept.append(result)
    if not kept:
        raise EmptyDataset("no rows survived preprocessing")
    vocab = build_vocab([texts for _, _, texts in kept], len(classes))
    index = vocab.index
    records = [
        DatasetRecord(label=label, smiles=canon,
                      tokens=tuple(index[t] for t in texts), length=len(texts))
        for label, canon, texts in kept
    ]
    return records, vocab, rejected


def build_vocab(token_lists: list[list[str]], n_classes: int) -> Vocabulary:
    """Reserved tokens first (pad, eos, one start per class), then the
    observed chemistry tokens in lexicographic order."""
    if not token_lists:
        raise EmptyDataset("cannot build a vocabulary from no records")
    observed: set[str] = set()
    for texts in token_lists:
        observed.update(texts)
    reserved = [PAD, EOS] + [f"<start{c}>" for c in range(n_classes)]
    return Vocabulary(tokens=tuple(reserved + sorted(observed)), n_classes=n_classes)


def tokens_of(token: Token) -> str:
    return token.text


class Sampler:
    """Infinite seeded batch sampler over an oversampled record pool."""

    def __init__(self, records: list[DatasetRecord], target_class: int | None,
                 factor: int, seed: int):
        if factor < 1:
            raise ValueError("oversample factor must be >= 1")
        if target_class is not None:
            labels = {r.label for r in records}
            if target_class not in labels:
                raise UnknownClass(f"no records with class {target_class}")
        self.pool: list[DatasetRecord] = []
        for record in records:
            copies = factor if (target_class is not None
                                and record.label == target_class) else 1
            self.pool.extend([record] * copies)
        self._gen = rngmod.stream(seed, rngmod.SAMPLER)

    def draw(self, n: int) -> list[DatasetRecord]:
        idx = self._gen.integers(0, len(self.pool), size=n)
        return [self.pool[i] for i in idx]


def oversample(records: list[DatasetRecord], target_class: int | None,
               factor: int, seed: int) -> Sampler:
    return Sampler(records, target_class, factor, seed)


def length_stats(records: list[DatasetRecord], n_classes: int,
                 sigma_floor: float = 1.0) -> list[tuple[float, float]]:
    """Per-class (mean, std) of token lengths; std floored to avoid a
    degenerate length kernel."""
    out = []
    for c in range(n_classes):
        lengths = [r.length for r in records if r.label == c]
        if not lengths:
            out.append((0.0, sigma_floor))
            continue
        mu = float(np.mean(lengths))
        sd = max(float(np.std(lengths)), sigma_floor)
        out.append((mu, sd))
    return out

"""Embedding + single-layer LSTM generator with manual backpropagation.

All math is float64 numpy. Gate layout in the fused weight matrix is
input, forget, cell, output. Sampling draws one uniform per step from a
per-sequence stream and inverts the softmax CDF, so results are identical
for any batching of the same streams.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from smigan.errors import SmiganError


class IndexOutOfVocab(SmiganError):
    pass


class ShapeMismatch(SmiganError):
    pass


@dataclass
class GeneratorParams:
    emb: np.ndarray      # (V, d_emb)
    lstm_w: np.ndarray   # (d_emb + d_hid, 4 * d_hid)
    lstm_b: np.ndarray   # (4 * d_hid,)
    out_w: np.ndarray    # (d_hid, V)
    out_b: np.ndarray    # (V,)

    @property
    def vocab_size(self) -> int:
        return self.emb.shape[0]

    @property
    def d_emb(self) -> int:
        return self.emb.shape[1]

    @property
    def d_hid(self) -> int:
        return self.out_w.shape[0]

    def tensors(self) -> dict[str, np.ndarray]:
        return {"emb": self.emb, "lstm_w": self.lstm_w, "lstm_b": self.lstm_b,
                "out_w": self.out_w, "out_b": self.out_b}

    def copy(self) -> "GeneratorParams":
        return GeneratorParams(**{k: v.copy() for k, v in self.tensors().items()})


@dataclass
class GeneratorState:
    h: np.ndarray
    c: np.ndarray


def init_generator(vocab_size: int, d_emb: int, d_hid: int,
                   rng: np.random.Generator) -> GeneratorParams:
    k = d_emb + d_hid
    params = GeneratorParams(
        emb=rng.normal(0.0, 0.1, size=(vocab_size, d_emb)),
        lstm_w=rng.normal(0.0, 1.0 / np.sqrt(k), size=(k, 4 * d_hid)),
        lstm_b=np.zeros(4 * d_hid),
        out_w=rng.normal(0.0, 1.0 / np.sqrt(d_hid), size=(d_hid, vocab_size)),
        out_b=np.zeros(vocab_size),
    )
    params.lstm_b[d_hid:2 * d_hid] = 1.0  # forget-gate bias
    return params


def zero_state(params: GeneratorParams, batch: int = 1) -> GeneratorState:
    return GeneratorState(h=np.zeros((batch, params.d_hid)),
                          c=np.zeros((batch, params.d_hid)))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def step_batch(params: GeneratorParams, h: np.ndarray, c: np.ndarray,
               tokens: np.ndarray):
    """One LSTM step for a batch of token indices; returns (logits, h, c)."""
    dh = params.d_hid
    x = params.emb[tokens]
    z = np.concatenate([x, h], axis=1) @ params.lstm_w + params.lstm_b
    i = _sigmoid(z[:, :dh])
    f = _sigmoid(z[:, dh:2 * dh])
    g = np.tanh(z[:, 2 * dh:3 * dh])
    o = _sigmoid(z[:, 3 * dh:])
    c2 = f * c + i * g
    h2 = o * np.tanh(c2)
    logits = h2 @ params.out_w + params.out_b
    return logits, h2, c2


def generator_step(params: GeneratorParams, state: GeneratorState, token: int):
    """Single-sequence step: embedding lookup, LSTM cell, projection."""
    if not 0 <= token < params.vocab_size:
        raise IndexOutOfVocab(f"token {token} outside vocab of {params.vocab_size}")
    logits, h, c = step_batch(params, state.h, state.c, np.array([token]))
    return logits[0], GeneratorState(h, c)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _masked_logits(logits: np.ndarray, eos_token: int | None, step: int,
                   eos_mask_steps: int) -> np.ndarray:
    if eos_token is not None and step < eos_mask_steps:
        logits = logits.copy()
        logits[..., eos_token] -= 1e9
    return logits


def sample_batch(
    params: GeneratorParams,
    start_tokens: np.ndarray,
    max_len: int,
    streams: list[np.random.Generator],
    eos_token: int | None = None,
    min_len: int = 0,
    prefixes: list[list[int]] | None = None,
) -> list[list[int]]:
    """Multinomial sampling from the (eos-masked) softmax policy.

    Returns per-row action lists including the end token when emitted.
    `prefixes` pins the first tokens of each row (used by rollouts); forced
    positions ignore the drawn uniform for that step.
    """
    batch = len(start_tokens)
    uniforms = np.stack([s.random(max_len) for s in streams])
    h = np.zeros((batch, params.d_hid))
    c = np.zeros((batch, params.d_hid))
    tokens = np.asarray(start_tokens)
    alive = np.ones(batch, dtype=bool)
    out: list[list[int]] = [[] for _ in range(batch)]

    for t in range(max_len):
        logits, h, c = step_batch(params, h, c, tokens)
        forced = None
        if prefixes is not None:
            forced = np.array([p[t] if t < len(p) else -1 for p in prefixes])
        probs = softmax(_masked_logits(logits, eos_token, t, min_len))
        cdf = np.cumsum(probs, axis=1)
        cdf[:, -1] = 1.1  # guard against u landing above a rounded-down total
        draw = (uniforms[:, t, None] < cdf).argmax(axis=1)
        if forced is not None:
            draw = np.where(forced >= 0, forced, draw)
        for b in range(batch):
            if not alive[b]:
                continue
            tok = int(draw[b])
            out[b].append(tok)
            if eos_token is not None and tok == eos_token:
                alive[b] = False
        if not alive.any():
            break
        tokens = draw
    return out


def sample_sequence(
    params: GeneratorParams,
    start_token: int,
    max_len: int,
    rng: np.random.Generator,
    eos_token: int | None = None,
    min_len: int = 0,
) -> list[int]:
    """Single-sequence convenience wrapper over sample_batch."""
    return sample_batch(params, np.array([start_token]), max_len, [rng],
                        eos_token=eos_token, min_len=min_len)[0]


def greedy_decode(params: GeneratorParams, start_token: int, max_len: int,
                  eos_token: int | None = None) -> list[int]:
    h = np.zeros((1, params.d_hid))
    c = np.zeros((1, params.d_hid))
    token = np.array([start_token])
    out = []
    for _ in range(max_len):
        logits, h, c = step_batch(params, h, c, token)
        tok = int(logits[0].argmax())
        out.append(tok)
        if eos_token is not None and tok == eos_token:
            break
        token = np.array([tok])
    return out


def sequence_log_prob(
    params: GeneratorParams,
    start_token: int,
    actions: list[int],
    eos_token: int | None = None,
    eos_mask_steps: int = 0,
) -> float:
    """Sum of log softmax probabilities of the realized actions."""
    for tok in actions:
        if not 0 <= tok < params.vocab_size:
            raise IndexOutOfVocab(f"token {tok} outside vocab of {params.vocab_size}")
    h = np.zeros((1, params.d_hid))
    c = np.zeros((1, params.d_hid))
    token = np.array([start_token])
    total = 0.0
    for t, realized in enumerate(actions):
        logits, h, c = step_batch(params, h, c, token)
        masked = _masked_logits(logits[0], eos_token, t, eos_mask_steps)
        z = masked - masked.max()
        log_probs = z - np.log(np.exp(z).sum())
        total += float(log_probs[realized])
        token = np.array([realized])
    return total


def weighted_nll_grads(
    params: GeneratorParams,
    inputs: np.ndarray,
    targets: np.ndarray,
    weights: np.ndarray,
    eos_token: int | None = None,
    eos_mask_steps: int = 0,
):
    """Loss = sum over positions of weight * (-log p(target)); returns
    (loss, grads) with exact reverse-mode gradients for every tensor.

    inputs/targets/weights are (B, S); weight 0 skips a position. The same
    eos mask used at sampling time is applied so policy-gradient weights
    differentiate the actual sampling distribution.
    """
    if inputs.shape != targets.shape or inputs.shape != weights.shape:
        raise ShapeMismatch("inputs, targets, and weights must share a shape")
    if targets.max(initial=0) >= params.vocab_size:
        raise IndexOutOfVocab("target token outside vocabulary")
    B, S = inputs.shape
    dh = params.d_hid

    h = np.zeros((B, dh))
    c = np.zeros((B, dh))
    cache = []
    loss = 0.0
    dlogits_all = np.zeros((S, B, params.vocab_size))
    for t in range(S):
        x = params.emb[inputs[:, t]]
        z = np.concatenate([x, h], axis=1) @ params.lstm_w + params.lstm_b
        i = _sigmoid(z[:, :dh])
        f = _sigmoid(z[:, dh:2 * dh])
        g = np.tanh(z[:, 2 * dh:3 * dh])
        o = _sigmoid(z[:, 3 * dh:])
        c2 = f * c + i * g
        tc2 = np.tanh(c2)
        h2 = o * tc2
        logits = h2 @ params.out_w + params.out_b
        masked = _masked_logits(logits, eos_token, t, eos_mask_steps)
        probs = softmax(masked)
        w = weights[:, t]
        p_target = probs[np.arange(B), targets[:, t]]
        loss += float(w @ -np.log(np.maximum(p_target, 1e-300)))
        dlog = probs * w[:, None]
        dlog[np.arange(B), targets[:, t]] -= w
        dlogits_all[t] = dlog
        cache.append((x, h, c, i, f, g, o, c2, tc2, h2))
        h, c = h2, c2

    grads = {k: np.zeros_like(v) for k, v in params.tensors().items()}
    dh_next = np.zeros((B, dh))
    dc_next = np.zeros((B, dh))
    for t in reversed(range(S)):
        x, h_prev, c_prev, i, f, g, o, c2, tc2, h2 = cache[t]
        dlog = dlogits_all[t]
        grads["out_w"] += h2.T @ dlog
        grads["out_b"] += dlog.sum(axis=0)
        dh2 = dlog @ params.out_w.T + dh_next
        do = dh2 * tc2
        dc2 = dh2 * o * (1.0 - tc2 ** 2) + dc_next
        di = dc2 * g
        df = dc2 * c_prev
        dg = dc2 * i
        dc_next = dc2 * f
        dz = np.concatenate([
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g ** 2),
            do * o * (1.0 - o),
        ], axis=1)
        xh = np.concatenate([x, h_prev], axis=1)
        grads["lstm_w"] += xh.T @ dz
        grads["lstm_b"] += dz.sum(axis=0)
        dxh = dz @ params.lstm_w.T
        dh_next = dxh[:, params.d_emb:]
        np.add.at(grads["emb"], inputs[:, t], dxh[:, :params.d_emb])
    return loss, grads

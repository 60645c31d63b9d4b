"""Convolutional text critic with a highway layer and scalar output.

Embeddings feed parallel convolutions (one bank per window size), ReLU,
max-over-time pooling, a highway layer, and an unsquashed linear head.
Convolutions are computed as shifted matmuls, so no im2col copies are made.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from smigan.neural.lstm import ShapeMismatch


@dataclass
class CriticParams:
    emb: np.ndarray                      # (V, d_emb)
    conv_w: dict[int, np.ndarray]        # window -> (window * d_emb, filters)
    conv_b: dict[int, np.ndarray]        # window -> (filters,)
    hw_t_w: np.ndarray                   # (F, F) transform gate
    hw_t_b: np.ndarray
    hw_h_w: np.ndarray                   # (F, F) candidate
    hw_h_b: np.ndarray
    out_w: np.ndarray                    # (F,)
    out_b: np.ndarray                    # (1,)

    @property
    def windows(self) -> tuple[int, ...]:
        return tuple(sorted(self.conv_w))

    @property
    def d_emb(self) -> int:
        return self.emb.shape[1]

    def tensors(self) -> dict[str, np.ndarray]:
        out = {"emb": self.emb, "hw_t_w": self.hw_t_w, "hw_t_b": self.hw_t_b,
               "hw_h_w": self.hw_h_w, "hw_h_b": self.hw_h_b,
               "out_w": self.out_w, "out_b": self.out_b}
        for w in self.windows:
            out[f"conv_w{w}"] = self.conv_w[w]
            out[f"conv_b{w}"] = self.conv_b[w]
        return out

    def copy(self) -> "CriticParams":
        return CriticParams(
            emb=self.emb.copy(),
            conv_w={w: m.copy() for w, m in self.conv_w.items()},
            conv_b={w: m.copy() for w, m in self.conv_b.items()},
            hw_t_w=self.hw_t_w.copy(), hw_t_b=self.hw_t_b.copy(),
            hw_h_w=self.hw_h_w.copy(), hw_h_b=self.hw_h_b.copy(),
            out_w=self.out_w.copy(), out_b=self.out_b.copy(),
        )


def init_critic(vocab_size: int, d_emb: int, windows: tuple[int, ...],
                filters: int, rng: np.random.Generator) -> CriticParams:
    total = filters * len(windows)
    return CriticParams(
        emb=rng.normal(0.0, 0.02, size=(vocab_size, d_emb)),
        conv_w={w: rng.normal(0.0, 0.02, size=(w * d_emb, filters)) for w in windows},
        conv_b={w: np.zeros(filters) for w in windows},
        hw_t_w=rng.normal(0.0, 0.02, size=(total, total)),
        hw_t_b=np.zeros(total),
        hw_h_w=rng.normal(0.0, 0.02, size=(total, total)),
        hw_h_b=np.zeros(total),
        out_w=rng.normal(0.0, 0.02, size=total),
        out_b=np.zeros(1),
    )


def pad_tokens(seqs: list[list[int]], pad_to: int, pad_token: int = 0) -> np.ndarray:
    """Right-pad (or truncate) token lists into a (B, pad_to) index matrix."""
    out = np.full((len(seqs), pad_to), pad_token, dtype=np.int64)
    for i, seq in enumerate(seqs):
        trimmed = seq[:pad_to]
        out[i, :len(trimmed)] = trimmed
    return out


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def critic_forward(params: CriticParams, tokens: np.ndarray):
    """Scores for a (B, L) index matrix; returns (scores, cache)."""
    B, L = tokens.shape
    emb = params.emb[tokens]  # (B, L, d)
    pooled = []
    conv_cache = {}
    for w in params.windows:
        P = L - w + 1
        if P < 1:
            raise ShapeMismatch(f"pad length {L} shorter than window {w}")
        pre = np.broadcast_to(params.conv_b[w], (B, P, len(params.conv_b[w]))).copy()
        for k in range(w):
            wk = params.conv_w[w][k * params.d_emb:(k + 1) * params.d_emb]
            pre += emb[:, k:k + P, :] @ wk
        act = np.maximum(pre, 0.0)
        arg = act.argmax(axis=1)                      # (B, f)
        mx = np.take_along_axis(act, arg[:, None, :], axis=1)[:, 0, :]
        pooled.append(mx)
        conv_cache[w] = (pre, arg)
    x = np.concatenate(pooled, axis=1)                # (B, F)
    t_gate = _sigmoid(x @ params.hw_t_w + params.hw_t_b)
    h_pre = x @ params.hw_h_w + params.hw_h_b
    h_cand = np.maximum(h_pre, 0.0)
    hw = t_gate * h_cand + (1.0 - t_gate) * x
    scores = hw @ params.out_w + params.out_b[0]
    cache = (tokens, emb, conv_cache, x, t_gate, h_pre, h_cand, hw)
    return scores, cache


def critic_backward(params: CriticParams, cache, dscores: np.ndarray) -> dict[str, np.ndarray]:
    tokens, emb, conv_cache, x, t_gate, h_pre, h_cand, hw = cache
    B, L, d = emb.shape
    grads = {k: np.zeros_like(v) for k, v in params.tensors().items()}

    grads["out_w"] += hw.T @ dscores
    grads["out_b"][0] += dscores.sum()
    dhw = np.outer(dscores, params.out_w)

    dt = dhw * (h_cand - x)
    dh_cand = dhw * t_gate
    dx = dhw * (1.0 - t_gate)
    dh_pre = dh_cand * (h_pre > 0)
    dt_pre = dt * t_gate * (1.0 - t_gate)
    grads["hw_h_w"] += x.T @ dh_pre
    grads["hw_h_b"] += dh_pre.sum(axis=0)
    grads["hw_t_w"] += x.T @ dt_pre
    grads["hw_t_b"] += dt_pre.sum(axis=0)
    dx += dh_pre @ params.hw_h_w.T + dt_pre @ params.hw_t_w.T

    demb = np.zeros_like(emb)
    offset = 0
    for w in params.windows:
        f = params.conv_b[w].shape[0]
        dmx = dx[:, offset:offset + f]                # (B, f)
        offset += f
        pre, arg = conv_cache[w]
        P = pre.shape[1]
        dact = np.zeros_like(pre)
        np.put_along_axis(dact, arg[:, None, :], dmx[:, None, :], axis=1)
        dpre = dact * (pre > 0)
        grads[f"conv_b{w}"] += dpre.sum(axis=(0, 1))
        for k in range(w):
            wk = params.conv_w[w][k * d:(k + 1) * d]
            grads[f"conv_w{w}"][k * d:(k + 1) * d] += np.einsum(
                "bpd,bpf->df", emb[:, k:k + P, :], dpre)
            demb[:, k:k + P, :] += dpre @ wk.T
    flat = demb.reshape(B * L, d)
    np.add.at(grads["emb"], tokens.reshape(-1), flat)
    return grads


def critic_score(params: CriticParams, seq: list[int], pad_to: int) -> float:
    """Score one sequence padded/truncated to pad_to."""
    scores, _ = critic_forward(params, pad_tokens([seq], pad_to))
    return float(scores[0])


def clip_weights(params: CriticParams, c: float) -> CriticParams:
    """Clamp every critic tensor into [-c, c] (Lipschitz surrogate)."""
    if c <= 0:
        raise ValueError("clip bound must be positive")
    clipped = params.copy()
    for tensor in clipped.tensors().values():
        np.clip(tensor, -c, c, out=tensor)
    return clipped

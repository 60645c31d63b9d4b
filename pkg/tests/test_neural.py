import math

import numpy as np
import pytest

from smigan import rng as rngmod
from smigan.neural import (
    AdamState,
    GeneratorParams,
    GeneratorState,
    IndexOutOfVocab,
    ShapeMismatch,
    adam_step,
    clip_weights,
    critic_backward,
    critic_forward,
    critic_score,
    finite_difference_gradients,
    generator_step,
    init_critic,
    init_generator,
    max_relative_error,
    pad_tokens,
    sample_batch,
    sample_sequence,
    sequence_log_prob,
    weighted_nll_grads,
    zero_state,
)

from oracles import enumerate_sequences


def zero_generator(vocab=4, d_emb=3, d_hid=2) -> GeneratorParams:
    return GeneratorParams(
        emb=np.zeros((vocab, d_emb)),
        lstm_w=np.zeros((d_emb + d_hid, 4 * d_hid)),
        lstm_b=np.zeros(4 * d_hid),
        out_w=np.zeros((d_hid, vocab)),
        out_b=np.zeros(vocab),
    )


# --- generator step ------------------------------------------------------------

def test_step_zero_weights():
    params = zero_generator()
    logits, state = generator_step(params, zero_state(params), 1)
    assert np.all(logits == 0.0)
    assert np.all(state.h == 0.0) and np.all(state.c == 0.0)


def test_step_deterministic():
    params = init_generator(6, 4, 5, rngmod.stream(0, rngmod.TOY))
    s0 = zero_state(params)
    a = generator_step(params, s0, 2)
    b = generator_step(params, s0, 2)
    assert np.array_equal(a[0], b[0])
    assert np.array_equal(a[1].h, b[1].h)


def test_step_out_of_vocab():
    params = zero_generator(vocab=4)
    with pytest.raises(IndexOutOfVocab):
        generator_step(params, zero_state(params), 4)


def test_step_matches_hand_computed_cell():
    # 1-dim everything, weights chosen by hand
    params = GeneratorParams(
        emb=np.array([[0.5], [-1.0]]),
        lstm_w=np.array([[0.3, -0.2, 0.7, 0.1],   # x row
                         [0.05, 0.4, -0.6, 0.2]]),  # h row
        lstm_b=np.array([0.01, 0.02, 0.03, 0.04]),
        out_w=np.array([[2.0, -1.0]]),
        out_b=np.array([0.1, -0.1]),
    )
    h0, c0 = 0.2, -0.3
    x = 0.5
    sig = lambda v: 1.0 / (1.0 + math.exp(-v))
    i = sig(x * 0.3 + h0 * 0.05 + 0.01)
    f = sig(x * -0.2 + h0 * 0.4 + 0.02)
    g = math.tanh(x * 0.7 + h0 * -0.6 + 0.03)
    o = sig(x * 0.1 + h0 * 0.2 + 0.04)
    c1 = f * c0 + i * g
    h1 = o * math.tanh(c1)
    state = GeneratorState(h=np.array([[h0]]), c=np.array([[c0]]))
    logits, new_state = generator_step(params, state, 0)
    assert new_state.c[0, 0] == pytest.approx(c1, abs=1e-12)
    assert new_state.h[0, 0] == pytest.approx(h1, abs=1e-12)
    assert logits[0] == pytest.approx(h1 * 2.0 + 0.1, abs=1e-12)
    assert logits[1] == pytest.approx(h1 * -1.0 - 0.1, abs=1e-12)


# --- sampling -------------------------------------------------------------------

def test_sample_one_hot_deterministic():
    params = zero_generator(vocab=3)
    params.out_b = np.array([0.0, 50.0, -50.0])  # token 1 forced
    seq = sample_sequence(params, 0, max_len=5, rng=rngmod.stream(1, rngmod.TOY))
    assert seq == [1, 1, 1, 1, 1]


def test_sample_respects_max_len():
    params = init_generator(5, 3, 4, rngmod.stream(2, rngmod.TOY))
    seq = sample_sequence(params, 0, max_len=7, rng=rngmod.stream(3, rngmod.TOY))
    assert len(seq) <= 7


def test_sample_seeded_reproducible():
    params = init_generator(5, 3, 4, rngmod.stream(4, rngmod.TOY))
    a = sample_sequence(params, 0, 10, rngmod.stream(5, rngmod.TOY), eos_token=1)
    b = sample_sequence(params, 0, 10, rngmod.stream(5, rngmod.TOY), eos_token=1)
    assert a == b


def test_sample_eos_mask_respects_min_len():
    params = init_generator(5, 3, 4, rngmod.stream(6, rngmod.TOY))
    params.out_b[1] = 30.0  # eos strongly preferred when unmasked
    for row in range(8):
        seq = sample_sequence(params, 0, max_len=12,
                              rng=rngmod.stream(7, rngmod.TOY, row),
                              eos_token=1, min_len=4)
        chem_len = len(seq) - (1 if seq and seq[-1] == 1 else 0)
        assert chem_len >= 4


def test_sample_batch_matches_single():
    params = init_generator(6, 3, 4, rngmod.stream(8, rngmod.TOY))
    streams = [rngmod.stream(9, rngmod.TOY, i) for i in range(4)]
    batch = sample_batch(params, np.array([0, 0, 2, 2]), 8, streams, eos_token=1)
    for i, start in enumerate([0, 0, 2, 2]):
        single = sample_sequence(params, start, 8,
                                 rngmod.stream(9, rngmod.TOY, i), eos_token=1)
        assert batch[i] == single


def test_sample_prefix_preserved():
    params = init_generator(6, 3, 4, rngmod.stream(10, rngmod.TOY))
    prefix = [3, 2, 4]
    streams = [rngmod.stream(11, rngmod.TOY, i) for i in range(5)]
    rollouts = sample_batch(params, np.array([0] * 5), 8, streams,
                            eos_token=1, prefixes=[prefix] * 5)
    for r in rollouts:
        assert r[:3] == prefix


# --- sequence log prob ----------------------------------------------------------

def test_log_prob_uniform_logits():
    params = zero_generator(vocab=4)
    lp = sequence_log_prob(params, 0, [1, 2, 3])
    assert lp == pytest.approx(3 * math.log(1 / 4), abs=1e-12)


def test_log_prob_empty_sequence():
    params = zero_generator()
    assert sequence_log_prob(params, 0, []) == 0.0


def test_log_prob_total_mass_with_stopping():
    # vocab: 0=start-ish filler, 1=eos, 2=other; enumerate all stop-respecting
    # outcomes of sampling with max_len=3 and check their mass sums to 1
    params = init_generator(3, 2, 3, rngmod.stream(12, rngmod.TOY))
    eos = 1
    total = 0.0
    outcomes = []
    for L in (1, 2, 3):
        for seq in enumerate_sequences(3, L):
            if L < 3:
                if seq[-1] != eos or any(t == eos for t in seq[:-1]):
                    continue
            else:
                if any(t == eos for t in seq[:-1]):
                    continue
            outcomes.append(list(seq))
    for seq in outcomes:
        total += math.exp(sequence_log_prob(params, 0, seq))
    assert total == pytest.approx(1.0, abs=1e-9)


# --- gradients -------------------------------------------------------------------

def test_nll_grads_constant_loss_zero():
    params = init_generator(5, 3, 4, rngmod.stream(13, rngmod.TOY))
    inputs = np.array([[0, 2, 3]])
    targets = np.array([[2, 3, 1]])
    weights = np.zeros((1, 3))
    loss, grads = weighted_nll_grads(params, inputs, targets, weights)
    assert loss == 0.0
    assert all(np.all(g == 0.0) for g in grads.values())


def test_lstm_gradients_match_finite_differences():
    params = init_generator(12, 4, 8, rngmod.stream(14, rngmod.TOY))
    gen = rngmod.stream(15, rngmod.TOY)
    inputs = gen.integers(0, 12, size=(3, 5))
    targets = gen.integers(0, 12, size=(3, 5))
    weights = gen.random((3, 5))
    _, analytic = weighted_nll_grads(params, inputs, targets, weights)
    numeric = finite_difference_gradients(
        lambda: weighted_nll_grads(params, inputs, targets, weights)[0],
        params.tensors())
    assert max_relative_error(analytic, numeric) < 1e-4


def test_lstm_gradients_with_eos_mask_match_finite_differences():
    params = init_generator(8, 3, 5, rngmod.stream(16, rngmod.TOY))
    gen = rngmod.stream(17, rngmod.TOY)
    inputs = gen.integers(0, 8, size=(2, 4))
    targets = gen.integers(2, 8, size=(2, 4))
    weights = gen.random((2, 4))
    kw = dict(eos_token=1, eos_mask_steps=2)
    _, analytic = weighted_nll_grads(params, inputs, targets, weights, **kw)
    numeric = finite_difference_gradients(
        lambda: weighted_nll_grads(params, inputs, targets, weights, **kw)[0],
        params.tensors())
    assert max_relative_error(analytic, numeric) < 1e-4


def test_critic_gradients_match_finite_differences():
    params = init_critic(12, 4, windows=(1, 2, 3), filters=4,
                         rng=rngmod.stream(18, rngmod.TOY))
    # non-tiny weights so pooling argmaxes are stable under +-h
    for t in params.tensors().values():
        t *= 20.0
    gen = rngmod.stream(19, rngmod.TOY)
    tokens = gen.integers(0, 12, size=(3, 9))
    coeff = gen.random(3)

    def loss_fn() -> float:
        scores, _ = critic_forward(params, tokens)
        return float(coeff @ scores)

    scores, cache = critic_forward(params, tokens)
    analytic = critic_backward(params, cache, coeff)
    numeric = finite_difference_gradients(loss_fn, params.tensors())
    assert max_relative_error(analytic, numeric) < 1e-4


# --- critic behavior --------------------------------------------------------------

def test_critic_zero_weights_zero_score():
    params = init_critic(6, 3, (1, 2), 2, rngmod.stream(20, rngmod.TOY))
    for t in params.tensors().values():
        t[...] = 0.0
    assert critic_score(params, [1, 2, 3], pad_to=8) == 0.0


def test_critic_deterministic():
    params = init_critic(6, 3, (1, 2, 3), 4, rngmod.stream(21, rngmod.TOY))
    a = critic_score(params, [2, 3, 4, 5], pad_to=10)
    b = critic_score(params, [2, 3, 4, 5], pad_to=10)
    assert a == b


def test_critic_sensitive_to_mid_sequence_token_after_training():
    # real and fake patterns differ only in the middle token, so a trained
    # critic must move its score when that token flips
    params = init_critic(6, 4, (1, 2), 4, rngmod.stream(22, rngmod.TOY))
    real = pad_tokens([[2, 2, 2, 2, 2]] * 8, 8)
    fake = pad_tokens([[2, 2, 3, 2, 2]] * 8, 8)
    state = AdamState()
    for _ in range(20):
        _, cache_real = critic_forward(params, real)
        _, cache_fake = critic_forward(params, fake)
        g_real = critic_backward(params, cache_real, np.full(8, -1.0 / 8))
        g_fake = critic_backward(params, cache_fake, np.full(8, 1.0 / 8))
        grads = {k: g_real[k] + g_fake[k] for k in g_real}
        adam_step(params.tensors(), grads, state, lr=5e-3)
        params = clip_weights(params, 0.05)
    base = critic_score(params, [2, 2, 2, 2, 2], 8)
    flipped = critic_score(params, [2, 2, 3, 2, 2], 8)
    assert base != flipped
    assert base > flipped


def test_clip_weights_bounds():
    params = init_critic(6, 3, (1, 2), 4, rngmod.stream(23, rngmod.TOY))
    params.hw_t_w[0, 0] = 0.5
    clipped = clip_weights(params, 0.01)
    assert clipped.hw_t_w[0, 0] == 0.01
    assert all(np.abs(t).max() <= 0.01 for t in clipped.tensors().values())
    # in-range weights unchanged
    small = init_critic(6, 3, (1, 2), 4, rngmod.stream(24, rngmod.TOY))
    for t in small.tensors().values():
        np.clip(t, -0.009, 0.009, out=t)
    before = {k: v.copy() for k, v in small.tensors().items()}
    after = clip_weights(small, 0.01)
    assert all(np.array_equal(before[k], v) for k, v in after.tensors().items())


# --- adam --------------------------------------------------------------------------

def test_adam_zero_gradient_keeps_params():
    params = {"w": np.array([1.0, -2.0, 3.0])}
    before = params["w"].copy()
    state = AdamState()
    adam_step(params, {"w": np.zeros(3)}, state, lr=0.1)
    assert np.array_equal(params["w"], before)


def test_adam_first_step_magnitude():
    params = {"w": np.array([0.0])}
    state = AdamState()
    adam_step(params, {"w": np.array([3.7])}, state, lr=0.01)
    assert abs(params["w"][0] + 0.01) < 1e-6  # ~ -lr * sign(g)


def test_adam_converges_on_quadratic():
    w = {"w": np.array([1.0])}
    state = AdamState()
    for _ in range(50):
        grad = {"w": 2.0 * w["w"]}
        adam_step(w, grad, state, lr=0.05)
    assert abs(w["w"][0]) < 0.1


def test_adam_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        adam_step({"w": np.zeros(3)}, {"w": np.zeros(4)}, AdamState(), lr=0.1)

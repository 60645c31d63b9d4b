"""From-scratch dense numerical core: LSTM generator, CNN critic, Adam,
and gradient checking."""

from smigan.neural.lstm import (
    GeneratorParams,
    GeneratorState,
    IndexOutOfVocab,
    ShapeMismatch,
    generator_step,
    greedy_decode,
    init_generator,
    sample_batch,
    sample_sequence,
    sequence_log_prob,
    softmax,
    step_batch,
    weighted_nll_grads,
    zero_state,
)
from smigan.neural.critic import (
    CriticParams,
    clip_weights,
    critic_backward,
    critic_forward,
    critic_score,
    init_critic,
    pad_tokens,
)
from smigan.neural.adam import AdamState, adam_step
from smigan.neural.gradcheck import finite_difference_gradients, max_relative_error

__all__ = [
    "AdamState", "CriticParams", "GeneratorParams", "GeneratorState",
    "IndexOutOfVocab", "ShapeMismatch", "adam_step", "clip_weights",
    "critic_backward", "critic_forward", "critic_score",
    "finite_difference_gradients", "generator_step", "greedy_decode",
    "init_critic", "init_generator", "max_relative_error", "pad_tokens",
    "sample_batch", "sample_sequence", "sequence_log_prob", "softmax",
    "step_batch", "weighted_nll_grads", "zero_state",
]

"""Deterministic RNG stream derivation.

Every random draw in the package comes from a Generator keyed by
(seed, purpose, *context) so parallel and serial schedules, and re-runs with
the same config, produce identical results.
"""
from __future__ import annotations

import numpy as np

# purpose tags; never reuse a value
GEN_INIT = 1
CRITIC_INIT = 2
MLE_SHUFFLE = 3
SAMPLER = 4
EVAL_SAMPLE = 5
GENERATE = 6
ROLLOUT = 7
POLICY_SAMPLE = 8
FOREST = 9
FOLDS = 10
DIVERSITY = 11
TOY = 12


def stream(seed: int, *context: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, *context)))

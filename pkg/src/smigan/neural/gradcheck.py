"""Central finite-difference gradient checking for named tensor dicts."""
from __future__ import annotations

from typing import Callable

import numpy as np


def finite_difference_gradients(
    loss_fn: Callable[[], float],
    tensors: dict[str, np.ndarray],
    h: float = 1e-4,
) -> dict[str, np.ndarray]:
    """Perturb every coordinate in place and evaluate (f(+h) - f(-h)) / 2h."""
    out = {}
    for name, tensor in tensors.items():
        grad = np.zeros_like(tensor)
        flat = tensor.reshape(-1)
        gflat = grad.reshape(-1)
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + h
            up = loss_fn()
            flat[idx] = orig - h
            down = loss_fn()
            flat[idx] = orig
            gflat[idx] = (up - down) / (2.0 * h)
        out[name] = grad
    return out


def max_relative_error(
    analytic: dict[str, np.ndarray],
    numeric: dict[str, np.ndarray],
    floor: float = 1e-3,
) -> float:
    """max over coordinates of |a - n| / max(|a|, |n|, floor).

    The floor absorbs finite-difference roundoff on near-zero components.
    """
    worst = 0.0
    for name in analytic:
        a = analytic[name]
        n = numeric[name]
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst

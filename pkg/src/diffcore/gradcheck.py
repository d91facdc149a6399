"""
Finite-difference verification of analytic gradients.
"""
from typing import Callable

import numpy as np

from src.diffcore.params import ParamStore
from src.diffcore.tensor import Tape, Tensor, backward

Objective = Callable[[ParamStore], Tensor]


def finite_diff_check(f: Objective, params: ParamStore, eps: float = 1e-5) -> float:
    """
    Compare backward() against central differences for every parameter entry.

    @param f - Pure, deterministic scalar function of the parameters
    @param params - Point of evaluation; restored exactly afterwards
    @param eps - Perturbation size
    @return Maximum relative error, denominator max(|a|, |b|, 1e-8)
    """
    with Tape() as tape:
        loss = f(params)
    analytic = backward(tape, loss, params)

    worst = 0.0
    for name, tensor in params.items():
        flat = tensor.data.reshape(-1)
        grad = analytic[name].reshape(-1)
        for k in range(flat.size):
            original = flat[k]
            flat[k] = original + eps
            upper = f(params).item()
            flat[k] = original - eps
            lower = f(params).item()
            flat[k] = original
            numeric = (upper - lower) / (2.0 * eps)
            denom = max(abs(grad[k]), abs(numeric), 1e-8)
            worst = max(worst, abs(grad[k] - numeric) / denom)
    return worst

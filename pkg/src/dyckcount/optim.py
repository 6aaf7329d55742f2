"""Adam on flat parameter vectors."""

import numpy as np
from dataclasses import dataclass

from .nets import NetParams


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def for_params(cls, params: NetParams) -> "AdamState":
        return cls(np.zeros_like(params.theta), np.zeros_like(params.theta))


def adam_update(params: NetParams, grads: np.ndarray, state: AdamState, lr: float = 1e-3,
                beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> tuple[NetParams, AdamState]:
    """One bias-corrected Adam step; returns new parameters and optimizer state."""
    grads = np.asarray(grads, dtype=np.float64)
    if grads.shape != params.theta.shape:
        raise ValueError(f"gradient shape {grads.shape} does not match parameters {params.theta.shape}")
    t = state.t + 1
    m = beta1 * state.m + (1 - beta1) * grads
    v = beta2 * state.v + (1 - beta2) * grads * grads
    m_hat = m / (1 - beta1 ** t)
    v_hat = v / (1 - beta2 ** t)
    theta = params.theta - lr * m_hat / (np.sqrt(v_hat) + eps)
    new = NetParams(params.architecture, params.D, params.H, theta, params.readout_bias)
    return new, AdamState(m, v, t)


def adam_step_inplace(theta: np.ndarray, grads: np.ndarray, state: AdamState, lr: float = 1e-3,
                      beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> None:
    # same arithmetic as adam_update without allocating new containers (training hot loop)
    state.t += 1
    state.m *= beta1
    state.m += (1 - beta1) * grads
    state.v *= beta2
    state.v += (1 - beta2) * grads * grads
    step = lr / (1 - beta1 ** state.t)
    theta -= step * state.m / (np.sqrt(state.v / (1 - beta2 ** state.t)) + eps)

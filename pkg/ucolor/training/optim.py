"""ADAM optimizer over named parameter maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping

import numpy as np

from ucolor.errors import ShapeError


@dataclass
class AdamState:
    """First/second moment estimates and the step counter."""

    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    def copy(self) -> "AdamState":
        return AdamState(
            self.step,
            {name: value.copy() for name, value in self.m.items()},
            {name: value.copy() for name, value in self.v.items()},
        )


def adam_step(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[Dict[str, np.ndarray], AdamState]:
    """One bias-corrected ADAM update; inputs are left untouched.

    Parameters
    ----------
    params, grads : Mapping[str, numpy.ndarray]
        Parameters and their gradients, keyed by the same names.
    state : AdamState
        Moments from the previous step (empty before the first step).
    lr : float
        Learning rate.
    beta1, beta2, eps : float, optional
        Usual ADAM constants.

    Returns
    -------
    tuple
        Updated parameters and the new state.
    """
    if set(params) != set(grads):
        missing = sorted(set(params) ^ set(grads))
        raise ShapeError(f"parameters and gradients disagree on names: {missing}", axis="name")
    step = state.step + 1
    new_params: Dict[str, np.ndarray] = {}
    new_m: Dict[str, np.ndarray] = {}
    new_v: Dict[str, np.ndarray] = {}
    for name, value in params.items():
        grad = np.asarray(grads[name], dtype=np.float64)
        if grad.shape != np.shape(value):
            raise ShapeError(
                f"gradient for '{name}' has shape {grad.shape}, parameter has {np.shape(value)}",
                axis="shape",
            )
        m = state.m.get(name, np.zeros_like(grad))
        v = state.v.get(name, np.zeros_like(grad))
        if m.shape != grad.shape or v.shape != grad.shape:
            raise ShapeError(f"optimizer state for '{name}' does not match its gradient", axis="shape")
        m = beta1 * m + (1.0 - beta1) * grad
        v = beta2 * v + (1.0 - beta2) * grad * grad
        m_hat = m / (1.0 - beta1**step)
        v_hat = v / (1.0 - beta2**step)
        new_params[name] = value - lr * m_hat / (np.sqrt(v_hat) + eps)
        new_m[name], new_v[name] = m, v
    return new_params, AdamState(step, new_m, new_v)


class Adam:
    """Stateful wrapper around :func:`adam_step`."""

    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> None:
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.state = AdamState()

    def step(self, params: Mapping[str, np.ndarray], grads: Mapping[str, np.ndarray]) -> Dict[str, np.ndarray]:
        updated, self.state = adam_step(
            params, grads, self.state, self.lr, self.beta1, self.beta2, self.eps
        )
        return updated

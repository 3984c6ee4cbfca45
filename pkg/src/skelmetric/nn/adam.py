"""Adam optimizer over flat lists of parameter arrays."""

from dataclasses import dataclass, field

import numpy as np

from skelmetric.errors import ShapeError


@dataclass
class AdamState:
    """Moment accumulators mirroring a fixed-order list of parameter arrays."""

    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)


def init_adam_state(params, learning_rate=1e-3, beta1=0.9, beta2=0.999, epsilon=1e-8):
    return AdamState(
        learning_rate=learning_rate,
        beta1=beta1,
        beta2=beta2,
        epsilon=epsilon,
        step=0,
        m=[np.zeros_like(p) for p in params],
        v=[np.zeros_like(p) for p in params],
    )


def adam_step(params, grads, state):
    """One bias-corrected Adam update, applied to the arrays in place.

    Returns (params, state) for convenience; both are the mutated inputs.
    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ShapeError(
            f"param/grad/state lengths differ: {len(params)}/{len(grads)}/{len(state.m)}"
        )
    state.step += 1
    bc1 = 1.0 - state.beta1**state.step
    bc2 = 1.0 - state.beta2**state.step
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if p.shape != g.shape:
            raise ShapeError(f"grad shape {g.shape} does not mirror param {p.shape}")
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p -= state.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + state.epsilon)
    return params, state


def clip_gradients(grads, max_norm):
    """Scale all gradient arrays so their global L2 norm is at most max_norm.

    Returns the pre-clip norm. No-op when max_norm is None.
    """
    total = np.sqrt(sum(float(np.sum(g * g)) for g in grads))
    if max_norm is not None and total > max_norm and total > 0.0:
        scale = max_norm / total
        for g in grads:
            g *= scale
    return total

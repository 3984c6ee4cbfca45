"""Finite-difference verification of analytic gradients."""

import numpy as np

from skelmetric.errors import NumericError, ValidationError


def central_difference_gradients(loss_fn, params, epsilon=1e-5):
    """Numeric gradient of loss_fn w.r.t. every element of every array.

    loss_fn takes the params list and returns a scalar; it must be
    deterministic. Each element is perturbed by +/- epsilon in place and
    restored afterwards. Returns arrays mirroring params.
    """
    numeric = [np.zeros_like(p) for p in params]
    for p, n in zip(params, numeric):
        flat_p = p.ravel()
        flat_n = n.ravel()
        for idx in range(flat_p.size):
            orig = flat_p[idx]
            flat_p[idx] = orig + epsilon
            up = loss_fn(params)
            flat_p[idx] = orig - epsilon
            down = loss_fn(params)
            flat_p[idx] = orig
            if not (np.isfinite(up) and np.isfinite(down)):
                raise NumericError("loss_fn returned a non-finite value")
            flat_n[idx] = (up - down) / (2.0 * epsilon)
    return numeric


def finite_diff_check(loss_fn, params, analytic_grads, epsilon=1e-5):
    """Max relative error between analytic and central-difference gradients.

    Relative error per element is |a - n| / max(|a|, |n|, 1e-8).
    """
    if not 1e-7 <= epsilon <= 1e-3:
        raise ValidationError(f"epsilon {epsilon} outside [1e-7, 1e-3]")
    numeric = central_difference_gradients(loss_fn, params, epsilon)
    worst = 0.0
    for a, n in zip(analytic_grads, numeric):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-8)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst

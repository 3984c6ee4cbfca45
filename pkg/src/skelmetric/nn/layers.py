"""Linear layers, ReLU stacks, and softmax cross-entropy."""

from dataclasses import dataclass

import numpy as np

from skelmetric.errors import ShapeError, ValidationError


@dataclass
class LinearParams:
    """Affine map y = weight @ x + bias with weight (out, in), bias (out,)."""

    weight: np.ndarray
    bias: np.ndarray

    @property
    def in_dim(self):
        return self.weight.shape[1]

    @property
    def out_dim(self):
        return self.weight.shape[0]

    def arrays(self):
        return [self.weight, self.bias]

    def copy(self):
        return LinearParams(self.weight.copy(), self.bias.copy())


def init_linear_params(in_dim, out_dim, rng):
    bound = 1.0 / np.sqrt(in_dim)
    return LinearParams(
        rng.uniform(-bound, bound, size=(out_dim, in_dim)), np.zeros(out_dim)
    )


def zeros_like_linear(params):
    return LinearParams(np.zeros_like(params.weight), np.zeros_like(params.bias))


def _relu_flags(layers, relu_after):
    if relu_after is None:
        return [True] * (len(layers) - 1) + [False]
    if len(relu_after) != len(layers):
        raise ShapeError(
            f"relu_after has {len(relu_after)} flags for {len(layers)} layers"
        )
    return list(relu_after)


def linear_relu_stack_forward(x, layers, relu_after=None):
    """Chain of affine layers with ReLU applied where flagged.

    By default ReLU follows every layer except the last. Accepts a single
    vector (in,) or a batch (B, in). Returns (y, cache).
    """
    flags = _relu_flags(layers, relu_after)
    out = np.asarray(x, dtype=np.float64)
    cache = []
    for layer, relu in zip(layers, flags):
        if out.shape[-1] != layer.in_dim:
            raise ShapeError(
                f"input width {out.shape[-1]} does not match layer in_dim {layer.in_dim}"
            )
        a = out @ layer.weight.T + layer.bias
        cache.append((out, a, relu))
        out = np.maximum(a, 0.0) if relu else a
    return out, cache


def linear_relu_stack_backward(grad_y, cache, layers):
    """Reverse of linear_relu_stack_forward.

    Returns (grad_layers, grad_x) where grad_layers is a list of
    LinearParams-shaped gradients in layer order. Batched inputs sum their
    parameter gradients over the batch.
    """
    grad_layers = [zeros_like_linear(layer) for layer in layers]
    d = np.asarray(grad_y, dtype=np.float64)
    for idx in range(len(layers) - 1, -1, -1):
        x_in, a, relu = cache[idx]
        if relu:
            d = d * (a > 0.0)
        d2 = np.atleast_2d(d)
        x2 = np.atleast_2d(x_in)
        grad_layers[idx].weight += d2.T @ x2
        grad_layers[idx].bias += d2.sum(axis=0)
        d = d @ layers[idx].weight
    return grad_layers, d


def softmax(logits):
    """Max-subtraction stabilized softmax along the last axis."""
    z = np.asarray(logits, dtype=np.float64)
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _check_one_hot(target, width):
    t = np.asarray(target, dtype=np.float64)
    if t.shape != (width,):
        raise ShapeError(f"target shape {t.shape} does not match logits ({width},)")
    if not (np.all((t == 0.0) | (t == 1.0)) and t.sum() == 1.0):
        raise ValidationError("target must be a one-hot vector")
    return t


def softmax_cross_entropy(logits, target):
    """Cross-entropy of softmax(logits) against a one-hot target.

    Returns (loss, probs, grad_logits) with grad_logits = probs - target.
    The loss is computed in log-sum-exp form and stays finite for any
    finite logits.
    """
    z = np.asarray(logits, dtype=np.float64)
    if z.ndim != 1:
        raise ShapeError(f"logits must be a vector, got shape {z.shape}")
    t = _check_one_hot(target, z.shape[0])
    zmax = z.max()
    shifted = z - zmax
    e = np.exp(shifted)
    probs = e / e.sum()
    loss = float(np.log(e.sum()) - shifted[np.argmax(t)])
    return loss, probs, probs - t


def softmax_cross_entropy_batch(logits, targets):
    """Row-wise cross-entropy for (B, K) logits and one-hot targets.

    Returns (losses (B,), probs (B, K), grad_logits (B, K)).
    """
    z = np.asarray(logits, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if z.shape != t.shape:
        raise ShapeError(f"logits {z.shape} and targets {t.shape} differ")
    zmax = z.max(axis=1, keepdims=True)
    shifted = z - zmax
    e = np.exp(shifted)
    sums = e.sum(axis=1)
    probs = e / sums[:, None]
    losses = np.log(sums) - (shifted * t).sum(axis=1)
    return losses, probs, probs - t

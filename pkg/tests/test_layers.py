import numpy as np
import pytest

from skelmetric.errors import ShapeError, ValidationError
from skelmetric.nn import (
    LinearParams,
    init_linear_params,
    linear_relu_stack_forward,
    softmax,
    softmax_cross_entropy,
    softmax_cross_entropy_batch,
)


def test_identity_stack_passes_nonnegative_input_through():
    layer = LinearParams(np.eye(3), np.zeros(3))
    x = np.array([0.0, 1.5, 2.0])
    y, _ = linear_relu_stack_forward(x, [layer, layer], relu_after=[True, False])
    np.testing.assert_array_equal(y, x)


def test_relu_zeroes_negative_preactivations():
    layer = LinearParams(-np.eye(2), np.zeros(2))
    tail = LinearParams(np.eye(2), np.zeros(2))
    y, _ = linear_relu_stack_forward(np.array([1.0, 2.0]), [layer, tail])
    np.testing.assert_array_equal(y, np.zeros(2))


def test_head_shaped_stack_dimensions():
    # the 256 -> 128 -> 64 -> 2 head of the single-layer topology
    rng = np.random.default_rng(0)
    layers = [
        init_linear_params(256, 128, rng),
        init_linear_params(128, 64, rng),
        init_linear_params(64, 2, rng),
    ]
    y, _ = linear_relu_stack_forward(rng.normal(size=256), layers)
    assert y.shape == (2,)


def test_dimension_mismatch_raises():
    layers = [LinearParams(np.zeros((2, 3)), np.zeros(2))]
    with pytest.raises(ShapeError):
        linear_relu_stack_forward(np.zeros(4), layers)


def test_softmax_symmetric_logits():
    loss, probs, grad = softmax_cross_entropy(np.zeros(2), np.array([1.0, 0.0]))
    np.testing.assert_allclose(probs, [0.5, 0.5], atol=1e-15)
    assert loss == pytest.approx(np.log(2.0), abs=1e-15)
    np.testing.assert_allclose(grad, [-0.5, 0.5], atol=1e-15)


def test_softmax_extreme_logits_stay_finite():
    loss, probs, _ = softmax_cross_entropy(
        np.array([1000.0, 0.0]), np.array([1.0, 0.0])
    )
    assert np.isfinite(loss)
    assert probs[0] == pytest.approx(1.0, abs=1e-12)
    assert probs[1] == pytest.approx(0.0, abs=1e-12)
    # and the losing class still yields a finite (large) loss
    loss2, _, _ = softmax_cross_entropy(np.array([1000.0, 0.0]), np.array([0.0, 1.0]))
    assert np.isfinite(loss2)
    assert loss2 == pytest.approx(1000.0, rel=1e-9)


def test_softmax_sums_to_one_for_any_finite_logits():
    rng = np.random.default_rng(1)
    for _ in range(200):
        logits = rng.normal(scale=rng.uniform(0.1, 100.0), size=rng.integers(2, 6))
        p = softmax(logits)
        assert abs(p.sum() - 1.0) <= 1e-12
        assert np.all(p >= 0.0) and np.all(p <= 1.0)
        if logits.max() - logits.min() < 30.0:
            # strictly interior until float64 rounding saturates (~spread 37)
            assert np.all(p > 0.0) and np.all(p < 1.0)


def test_invalid_one_hot_rejected():
    with pytest.raises(ValidationError):
        softmax_cross_entropy(np.zeros(2), np.array([0.5, 0.5]))
    with pytest.raises(ShapeError):
        softmax_cross_entropy(np.zeros(2), np.array([1.0, 0.0, 0.0]))


def test_batch_cross_entropy_matches_single():
    rng = np.random.default_rng(2)
    logits = rng.normal(size=(4, 2))
    targets = np.zeros((4, 2))
    targets[np.arange(4), rng.integers(0, 2, size=4)] = 1.0
    losses, probs, grads = softmax_cross_entropy_batch(logits, targets)
    for r in range(4):
        loss_r, probs_r, grad_r = softmax_cross_entropy(logits[r], targets[r])
        assert losses[r] == pytest.approx(loss_r, abs=1e-15)
        np.testing.assert_allclose(probs[r], probs_r, atol=1e-15)
        np.testing.assert_allclose(grads[r], grad_r, atol=1e-15)

"""Dense numeric primitives: LSTM, linear layers, loss, optimizer, gradient checks.

Everything runs in 64-bit floats. Forward passes are pure functions of their
inputs; backward passes are hand-derived reverse-mode gradients that are
verified against central finite differences in the test suite.
"""

from skelmetric.nn.adam import AdamState, adam_step, clip_gradients, init_adam_state
from skelmetric.nn.gradcheck import central_difference_gradients, finite_diff_check
from skelmetric.nn.layers import (
    LinearParams,
    init_linear_params,
    linear_relu_stack_backward,
    linear_relu_stack_forward,
    softmax,
    softmax_cross_entropy,
    softmax_cross_entropy_batch,
)
from skelmetric.nn.lstm import (
    LstmParams,
    init_lstm_params,
    lstm_batch_backward,
    lstm_batch_forward,
    lstm_cell_forward,
    lstm_sequence_backward,
    lstm_sequence_backward_steps,
    lstm_sequence_forward,
    lstm_stack_backward,
    lstm_stack_forward,
    pad_sequences,
    zeros_like_lstm,
)

__all__ = [
    "AdamState",
    "LinearParams",
    "LstmParams",
    "adam_step",
    "central_difference_gradients",
    "clip_gradients",
    "finite_diff_check",
    "init_adam_state",
    "init_linear_params",
    "init_lstm_params",
    "linear_relu_stack_backward",
    "linear_relu_stack_forward",
    "lstm_batch_backward",
    "lstm_batch_forward",
    "lstm_cell_forward",
    "lstm_sequence_backward",
    "lstm_sequence_backward_steps",
    "lstm_sequence_forward",
    "lstm_stack_backward",
    "lstm_stack_forward",
    "pad_sequences",
    "softmax",
    "softmax_cross_entropy",
    "softmax_cross_entropy_batch",
    "zeros_like_lstm",
]

"""LSTM cell and sequence forward/backward passes.

Gate convention (storage order along the leading axis of the stacked
parameter tensors): input, forget, cell candidate, output.

    i = sigmoid(Wx_i x + Wh_i h + b_i)
    f = sigmoid(Wx_f x + Wh_f h + b_f)
    g = tanh   (Wx_g x + Wh_g h + b_g)
    o = sigmoid(Wx_o x + Wh_o h + b_o)
    c_t = f * c_prev + i * g
    h_t = o * tanh(c_t)

A sequence is consumed left to right from zero initial state; the encoding
of the sequence is the final hidden state, whose size is fixed regardless
of sequence length.

Two call styles exist: the single-sequence functions take one frame vector
per step, while the batch functions take zero-padded time-major tensors
plus per-row lengths and freeze finished rows so that the state after the
last step equals each row's state at its own final frame.
"""

from dataclasses import dataclass

import numpy as np

from skelmetric.errors import NumericError, ShapeError, ValidationError

GATE_INPUT, GATE_FORGET, GATE_CELL, GATE_OUTPUT = 0, 1, 2, 3


@dataclass
class LstmParams:
    """Per-gate weights stacked along axis 0 in (input, forget, cell, output) order.

    w_x: (4, hidden, input) input-to-hidden matrices
    w_h: (4, hidden, hidden) hidden-to-hidden matrices
    b:   (4, hidden) biases
    """

    w_x: np.ndarray
    w_h: np.ndarray
    b: np.ndarray

    @property
    def input_dim(self):
        return self.w_x.shape[2]

    @property
    def hidden_dim(self):
        return self.w_x.shape[1]

    @property
    def param_count(self):
        return self.w_x.size + self.w_h.size + self.b.size

    def arrays(self):
        return [self.w_x, self.w_h, self.b]

    def copy(self):
        return LstmParams(self.w_x.copy(), self.w_h.copy(), self.b.copy())


def init_lstm_params(input_dim, hidden_dim, rng):
    """Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)]; forget-gate bias +1."""
    if input_dim < 1 or hidden_dim < 1:
        raise ValidationError(f"dims must be positive, got ({input_dim}, {hidden_dim})")
    bx = 1.0 / np.sqrt(input_dim)
    bh = 1.0 / np.sqrt(hidden_dim)
    w_x = rng.uniform(-bx, bx, size=(4, hidden_dim, input_dim))
    w_h = rng.uniform(-bh, bh, size=(4, hidden_dim, hidden_dim))
    b = np.zeros((4, hidden_dim))
    b[GATE_FORGET] = 1.0
    return LstmParams(w_x, w_h, b)


def zeros_like_lstm(params):
    return LstmParams(
        np.zeros_like(params.w_x), np.zeros_like(params.w_h), np.zeros_like(params.b)
    )


def _sigmoid(x):
    # 0.5 * (tanh(x/2) + 1): same function, fewer temporaries than 1/(1+exp(-x))
    return 0.5 * np.tanh(0.5 * x) + 0.5


def _flat_views(params):
    """2-D views of the stacked gate tensors: (4H, I), (4H, H), (4H,)."""
    four, hid, inp = params.w_x.shape
    wx2 = params.w_x.reshape(four * hid, inp)
    wh2 = params.w_h.reshape(four * hid, hid)
    b1 = params.b.reshape(four * hid)
    return wx2, wh2, b1


def _cell_step(x, h_prev, c_prev, wx2, wh2, b1, hid):
    """Core cell math on 2-D (batch, dim) arrays. Returns (h, c, cache)."""
    a = x @ wx2.T + h_prev @ wh2.T + b1
    sig = _sigmoid(a[:, : 2 * hid])
    i = sig[:, :hid]
    f = sig[:, hid:]
    g = np.tanh(a[:, 2 * hid : 3 * hid])
    o = _sigmoid(a[:, 3 * hid :])
    c = f * c_prev + i * g
    tc = np.tanh(c)
    h = o * tc
    cache = (x, h_prev, c_prev, i, f, g, o, tc)
    return h, c, cache


def _cell_step_backward(dh, dc_in, cache, wx2, wh2, gw_x, gw_h, gb):
    """Reverse of _cell_step; accumulates parameter gradients in place.

    Returns (dx, dh_prev, dc_prev). The upstream gradient is dh on the
    hidden output plus dc_in carried on the cell state.
    """
    x, h_prev, c_prev, i, f, g, o, tc = cache
    do = dh * tc
    dc = dc_in + dh * o * (1.0 - tc * tc)
    di = dc * g
    df = dc * c_prev
    dg = dc * i
    dc_prev = dc * f
    da = np.concatenate(
        [
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g * g),
            do * o * (1.0 - o),
        ],
        axis=1,
    )
    gw_x += da.T @ x
    gw_h += da.T @ h_prev
    gb += da.sum(axis=0)
    dx = da @ wx2
    dh_prev = da @ wh2
    return dx, dh_prev, dc_prev


def _check_vector(name, v, dim):
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (dim,):
        raise ShapeError(f"{name} has shape {v.shape}, expected ({dim},)")
    if not np.all(np.isfinite(v)):
        raise NumericError(f"{name} contains non-finite values")
    return v


def lstm_cell_forward(x_t, h_prev, c_prev, params):
    """One LSTM step on single vectors. Returns (h_t, c_t, cache)."""
    x_t = _check_vector("x_t", x_t, params.input_dim)
    h_prev = _check_vector("h_prev", h_prev, params.hidden_dim)
    c_prev = _check_vector("c_prev", c_prev, params.hidden_dim)
    wx2, wh2, b1 = _flat_views(params)
    h, c, cache = _cell_step(
        x_t[None, :], h_prev[None, :], c_prev[None, :], wx2, wh2, b1, params.hidden_dim
    )
    return h[0], c[0], cache


def lstm_cell_backward(grad_h, grad_c, cache, params, grads):
    """Reverse one step; accumulates into `grads` (an LstmParams of zeros or sums).

    Returns (grad_x, grad_h_prev, grad_c_prev) as single vectors.
    """
    wx2, wh2, _ = _flat_views(params)
    gwx2, gwh2, gb1 = _flat_views(grads)
    dx, dh_prev, dc_prev = _cell_step_backward(
        np.atleast_2d(grad_h), np.atleast_2d(grad_c), cache, wx2, wh2, gwx2, gwh2, gb1
    )
    return dx[0], dh_prev[0], dc_prev[0]


def _frames_array(seq, input_dim):
    frames = np.asarray(seq, dtype=np.float64)
    if frames.ndim != 2 or frames.shape[0] < 1:
        raise ValidationError(
            f"sequence must be a non-empty (T, {input_dim}) array, got shape {frames.shape}"
        )
    if frames.shape[1] != input_dim:
        raise ShapeError(
            f"frame width {frames.shape[1]} does not match input_dim {input_dim}"
        )
    if not np.all(np.isfinite(frames)):
        raise NumericError("sequence contains non-finite values")
    return frames


def lstm_sequence_forward(seq, params):
    """Run the cell over a (T, input_dim) sequence from zero state.

    Returns (O, caches) where O is the final hidden state, length hidden_dim
    for every T >= 1.
    """
    frames = _frames_array(seq, params.input_dim)
    hid = params.hidden_dim
    wx2, wh2, b1 = _flat_views(params)
    h = np.zeros((1, hid))
    c = np.zeros((1, hid))
    caches = []
    for t in range(frames.shape[0]):
        h, c, cache = _cell_step(frames[t][None, :], h, c, wx2, wh2, b1, hid)
        caches.append(cache)
    return h[0], caches


def lstm_sequence_backward_steps(grad_steps, caches, params):
    """Backprop through time given per-step gradients on every hidden output.

    grad_steps: (T, hidden) array, entry t is dL/dh_t.
    Returns (grad_params, grad_inputs) with grad_inputs of shape (T, input_dim).
    """
    t_len = len(caches)
    grad_steps = np.asarray(grad_steps, dtype=np.float64)
    if grad_steps.shape != (t_len, params.hidden_dim):
        raise ShapeError(
            f"grad_steps shape {grad_steps.shape} does not match "
            f"({t_len}, {params.hidden_dim})"
        )
    grads = zeros_like_lstm(params)
    wx2, wh2, _ = _flat_views(params)
    gwx2, gwh2, gb1 = _flat_views(grads)
    dh = np.zeros((1, params.hidden_dim))
    dc = np.zeros((1, params.hidden_dim))
    grad_inputs = np.empty((t_len, params.input_dim))
    for t in range(t_len - 1, -1, -1):
        dh = dh + grad_steps[t][None, :]
        dx, dh, dc = _cell_step_backward(dh, dc, caches[t], wx2, wh2, gwx2, gwh2, gb1)
        grad_inputs[t] = dx[0]
    return grads, grad_inputs


def lstm_sequence_backward(grad_out, caches, params):
    """Backprop through time from a gradient on the final hidden state only."""
    grad_out = _check_vector("grad_out", grad_out, params.hidden_dim)
    grad_steps = np.zeros((len(caches), params.hidden_dim))
    grad_steps[-1] = grad_out
    return lstm_sequence_backward_steps(grad_steps, caches, params)


def pad_sequences(seqs):
    """Zero-pad a list of (T_i, input_dim) arrays into time-major (T, B, I).

    Returns (padded, lengths). Rows keep their own order.
    """
    if not seqs:
        raise ValidationError("cannot pad an empty list of sequences")
    lengths = np.array([s.shape[0] for s in seqs], dtype=np.int64)
    t_max = int(lengths.max())
    inp = seqs[0].shape[1]
    padded = np.zeros((t_max, len(seqs), inp))
    for b, s in enumerate(seqs):
        if s.shape[1] != inp:
            raise ShapeError(
                f"sequence {b} has frame width {s.shape[1]}, expected {inp}"
            )
        padded[: s.shape[0], b] = s
    return padded, lengths


@dataclass
class BatchCache:
    """Stacked per-step intermediates of one lstm_batch_forward call."""

    x: np.ndarray        # (T, B, I) padded inputs
    h_steps: np.ndarray  # (T, B, H) masked hidden states
    c_steps: np.ndarray  # (T, B, H) masked cell states
    gates: np.ndarray    # (T, B, 4H) activated gates [i, f, g, o]
    tc: np.ndarray       # (T, B, H) tanh of the unmasked new cell state
    mask: np.ndarray     # (T, B, 1) 1.0 while the row is still active


def lstm_batch_forward(x, lengths, params):
    """Forward over a padded time-major batch (T, B, input_dim).

    Rows are frozen once their length is exhausted, so the state after the
    last step equals each row's state at its own final frame. The input
    projection for all steps runs as one matrix product; only the recurrent
    half loops over time.
    Returns (h_final (B, H), h_steps (T, B, H), cache).
    """
    t_max, batch, inp = x.shape
    if inp != params.input_dim:
        raise ShapeError(f"batch width {inp} does not match input_dim {params.input_dim}")
    hid = params.hidden_dim
    wx2, wh2, b1 = _flat_views(params)
    wh2t = wh2.T.copy()
    ax = (x.reshape(t_max * batch, inp) @ wx2.T + b1).reshape(t_max, batch, 4 * hid)
    mask = (
        np.arange(t_max)[:, None] < np.asarray(lengths)[None, :]
    ).astype(np.float64)[:, :, None]
    h = np.zeros((batch, hid))
    c = np.zeros((batch, hid))
    h_steps = np.empty((t_max, batch, hid))
    c_steps = np.empty((t_max, batch, hid))
    gates = np.empty((t_max, batch, 4 * hid))
    tcs = np.empty((t_max, batch, hid))
    for t in range(t_max):
        a = ax[t] + h @ wh2t
        g_t = gates[t]
        g_t[:, : 2 * hid] = _sigmoid(a[:, : 2 * hid])
        g_t[:, 2 * hid : 3 * hid] = np.tanh(a[:, 2 * hid : 3 * hid])
        g_t[:, 3 * hid :] = _sigmoid(a[:, 3 * hid :])
        i = g_t[:, :hid]
        f = g_t[:, hid : 2 * hid]
        g = g_t[:, 2 * hid : 3 * hid]
        o = g_t[:, 3 * hid :]
        c_new = f * c + i * g
        tc = np.tanh(c_new)
        tcs[t] = tc
        m = mask[t]
        h = m * (o * tc) + (1.0 - m) * h
        c = m * c_new + (1.0 - m) * c
        h_steps[t] = h
        c_steps[t] = c
    cache = BatchCache(x, h_steps, c_steps, gates, tcs, mask)
    return h, h_steps, cache


def lstm_batch_backward(grad_final, grad_steps, cache, params):
    """Reverse of lstm_batch_forward.

    grad_final: (B, H) gradient on the state after the last step, or None.
    grad_steps: (T, B, H) per-step gradients on the masked hidden outputs,
        or None. At least one must be given.
    Returns (grad_params, grad_inputs (T, B, input_dim)).
    """
    if grad_final is None and grad_steps is None:
        raise ValidationError("one of grad_final / grad_steps is required")
    t_len, batch, inp = cache.x.shape
    hid = params.hidden_dim
    grads = zeros_like_lstm(params)
    wx2, wh2, _ = _flat_views(params)
    gwx2, gwh2, gb1 = _flat_views(grads)
    dh = np.zeros((batch, hid))
    dc = np.zeros((batch, hid))
    if grad_final is not None:
        dh = dh + grad_final
    da_all = np.empty((t_len, batch, 4 * hid))
    for t in range(t_len - 1, -1, -1):
        if grad_steps is not None:
            dh = dh + grad_steps[t]
        g_t = cache.gates[t]
        i = g_t[:, :hid]
        f = g_t[:, hid : 2 * hid]
        g = g_t[:, 2 * hid : 3 * hid]
        o = g_t[:, 3 * hid :]
        tc = cache.tc[t]
        c_prev = cache.c_steps[t - 1] if t > 0 else np.zeros((batch, hid))
        m = cache.mask[t]
        dh_m = dh * m
        do = dh_m * tc
        dcc = dc * m + dh_m * o * (1.0 - tc * tc)
        da = da_all[t]
        da[:, :hid] = (dcc * g) * i * (1.0 - i)
        da[:, hid : 2 * hid] = (dcc * c_prev) * f * (1.0 - f)
        da[:, 2 * hid : 3 * hid] = (dcc * i) * (1.0 - g * g)
        da[:, 3 * hid :] = do * o * (1.0 - o)
        inv = 1.0 - m
        dh = inv * dh + da @ wh2
        dc = inv * dc + dcc * f
    flat_da = da_all.reshape(t_len * batch, 4 * hid)
    gwx2 += flat_da.T @ cache.x.reshape(t_len * batch, inp)
    h_prevs = np.concatenate(
        [np.zeros((1, batch, hid)), cache.h_steps[:-1]], axis=0
    ).reshape(t_len * batch, hid)
    gwh2 += flat_da.T @ h_prevs
    gb1 += flat_da.sum(axis=0)
    grad_inputs = (flat_da @ wx2).reshape(t_len, batch, inp)
    return grads, grad_inputs


def lstm_stack_forward(x, lengths, layers):
    """Run stacked LSTM layers over a padded batch; each layer consumes the
    per-step hidden outputs of the one below.

    Returns (h_final of the top layer, list of per-layer caches).
    """
    if not layers:
        raise ValidationError("encoder needs at least one LSTM layer")
    all_caches = []
    feed = x
    h_final = None
    for params in layers:
        h_final, h_steps, caches = lstm_batch_forward(feed, lengths, params)
        all_caches.append(caches)
        feed = h_steps
    return h_final, all_caches


def lstm_stack_backward(grad_final, all_caches, layers):
    """Reverse of lstm_stack_forward given the gradient on the top final state.

    Returns (list of per-layer grad_params, grad on the bottom inputs).
    """
    grad_params = [None] * len(layers)
    d_final = grad_final
    d_steps = None
    for idx in range(len(layers) - 1, -1, -1):
        grads, d_inputs = lstm_batch_backward(
            d_final, d_steps, all_caches[idx], layers[idx]
        )
        grad_params[idx] = grads
        d_final = None
        d_steps = d_inputs
    return grad_params, d_steps

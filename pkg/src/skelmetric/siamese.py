"""Siamese-LSTM similarity model and its pair-based trainer.

One shared LSTM encoder maps each of the two input sequences to a
fixed-size encoding; the concatenated encodings feed a small ReLU MLP
whose softmax output is the (match, not-match) probability pair. Both
branches reference the same parameter objects, so gradients from either
input flow into a single weight set.
"""

from dataclasses import dataclass, field

import numpy as np

from skelmetric.data import SequencePair
from skelmetric.errors import NumericError, ShapeError, ValidationError
from skelmetric.nn import (
    adam_step,
    clip_gradients,
    init_adam_state,
    init_linear_params,
    init_lstm_params,
    linear_relu_stack_backward,
    linear_relu_stack_forward,
    lstm_stack_backward,
    lstm_stack_forward,
    pad_sequences,
    softmax,
    softmax_cross_entropy_batch,
)

# targets are (match, not-match) one-hot rows
MATCH_ROW = np.array([1.0, 0.0])
NOT_MATCH_ROW = np.array([0.0, 1.0])


@dataclass(frozen=True)
class SiameseTopology:
    """Encoder and head widths. hidden_dims lists the stacked LSTM layers
    bottom-up (the last entry is the encoding size M); head_dims lists the
    hidden widths of the match head, which always maps 2M -> ... -> 2."""

    input_dim: int
    hidden_dims: tuple = (128,)
    head_dims: tuple = (128, 64)

    def __post_init__(self):
        object.__setattr__(self, "hidden_dims", tuple(self.hidden_dims))
        object.__setattr__(self, "head_dims", tuple(self.head_dims))
        if self.input_dim < 1:
            raise ValidationError(f"input_dim must be positive, got {self.input_dim}")
        if not self.hidden_dims or any(h < 1 for h in self.hidden_dims):
            raise ValidationError(f"bad hidden_dims {self.hidden_dims}")
        if any(h < 1 for h in self.head_dims):
            raise ValidationError(f"bad head_dims {self.head_dims}")

    @property
    def encoding_dim(self):
        return self.hidden_dims[-1]

    @property
    def feature_dim(self):
        return 2 * self.encoding_dim


# presets named after the datasets whose published layer widths they follow;
# the second hidden width of the deeper head reads an inconsistent printed
# chain as 400 -> 300 -> 150 -> 50 -> 2
TOPOLOGY_PRESETS = {
    "florence": SiameseTopology(input_dim=75, hidden_dims=(128,), head_dims=(128, 64)),
    "gtu": SiameseTopology(input_dim=75, hidden_dims=(200, 200), head_dims=(300, 150, 50)),
}


@dataclass
class SimilarityVector:
    """Softmax output over (match, not-match) for one ordered pair."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.shape != (2,):
            raise ShapeError(f"similarity vector must have 2 entries, got {probs.shape}")
        if not np.all(np.isfinite(probs)) or abs(float(probs.sum()) - 1.0) > 1e-9:
            raise NumericError(f"similarity probabilities invalid: {probs}")
        self.probs = probs

    @property
    def p_match(self):
        return float(self.probs[0])

    @property
    def p_not_match(self):
        return float(self.probs[1])

    def predicted_match(self):
        # exact ties resolve to not-match
        return bool(self.probs[0] > self.probs[1])


@dataclass
class SiameseModel:
    topology: SiameseTopology
    encoder: list  # LstmParams, bottom-up; the single shared copy
    head: list     # LinearParams, 2M -> head_dims... -> 2

    def __post_init__(self):
        if len(self.encoder) != len(self.topology.hidden_dims):
            raise ShapeError("encoder layer count does not match topology")
        if self.head[0].in_dim != self.topology.feature_dim:
            raise ShapeError(
                f"head input width {self.head[0].in_dim} != 2M = {self.topology.feature_dim}"
            )
        if self.head[-1].out_dim != 2:
            raise ShapeError("head must end in a 2-way output")

    def parameters(self):
        """All parameter arrays in checkpoint order: encoder layers bottom-up
        (w_x, w_h, b each), then head layers (weight, bias each)."""
        arrays = []
        for layer in self.encoder:
            arrays.extend(layer.arrays())
        for layer in self.head:
            arrays.extend(layer.arrays())
        return arrays

    def copy(self):
        return SiameseModel(
            self.topology,
            [layer.copy() for layer in self.encoder],
            [layer.copy() for layer in self.head],
        )


def init_siamese_model(topology, rng):
    encoder = []
    in_dim = topology.input_dim
    for hidden in topology.hidden_dims:
        encoder.append(init_lstm_params(in_dim, hidden, rng))
        in_dim = hidden
    head = []
    dims = (topology.feature_dim,) + topology.head_dims + (2,)
    for a, b in zip(dims[:-1], dims[1:]):
        head.append(init_linear_params(a, b, rng))
    return SiameseModel(topology, encoder, head)


def _sequence_features(seq, input_dim):
    feats = seq.features()
    if feats.shape[1] != input_dim:
        raise ShapeError(
            f"sequence {seq.sequence_id}: frame width {feats.shape[1]} does not "
            f"match encoder input {input_dim}"
        )
    return feats


def encode_sequence(seq, model):
    """Encoding of one sequence: the top layer's final hidden state."""
    feats = _sequence_features(seq, model.topology.input_dim)
    padded, lengths = pad_sequences([feats])
    final, _ = lstm_stack_forward(padded, lengths, model.encoder)
    return final[0]


def encode_batch(seqs, model):
    """Encodings for many sequences, padded together. Row order preserved."""
    feats = [_sequence_features(s, model.topology.input_dim) for s in seqs]
    padded, lengths = pad_sequences(feats)
    final, _ = lstm_stack_forward(padded, lengths, model.encoder)
    return final


def similarity_features(p, q, model):
    """concat(encode(p), encode(q)): length 2M regardless of either length.

    Each half is computed by the same shared encoder, so swapping the
    arguments swaps the halves exactly.
    """
    return np.concatenate([encode_sequence(p, model), encode_sequence(q, model)])


def head_forward(features, model):
    """Match head on a 2M feature vector; returns a SimilarityVector."""
    features = np.asarray(features, dtype=np.float64)
    if features.shape != (model.topology.feature_dim,):
        raise ShapeError(
            f"feature length {features.shape} does not match 2M = "
            f"{model.topology.feature_dim}"
        )
    logits, _ = linear_relu_stack_forward(features, model.head)
    return SimilarityVector(softmax(logits))


def compare(p, q, model):
    """Similarity of the ordered pair (p, q)."""
    return head_forward(similarity_features(p, q, model), model)


def _targets_array(pairs):
    rows = np.empty((len(pairs), 2))
    for k, pair in enumerate(pairs):
        rows[k] = MATCH_ROW if pair.is_match else NOT_MATCH_ROW
    return rows


def _pair_batch_forward(model, feats_p, feats_q):
    """Forward a batch of pairs; both branches share one padded batch."""
    padded, lengths = pad_sequences(feats_p + feats_q)
    final, caches = lstm_stack_forward(padded, lengths, model.encoder)
    n = len(feats_p)
    features = np.hstack([final[:n], final[n:]])
    logits, head_cache = linear_relu_stack_forward(features, model.head)
    return logits, caches, head_cache


def _pair_batch_loss_and_grads(model, feats_p, feats_q, targets):
    """Mean pair loss plus gradients for every encoder and head parameter.

    Returns (loss, probs, grads) with grads ordered like model.parameters().
    """
    n = len(feats_p)
    logits, enc_caches, head_cache = _pair_batch_forward(model, feats_p, feats_q)
    losses, probs, dlogits = softmax_cross_entropy_batch(logits, targets)
    loss = float(losses.mean())
    head_grads, d_features = linear_relu_stack_backward(
        dlogits / n, head_cache, model.head
    )
    m = model.topology.encoding_dim
    d_final = np.vstack([d_features[:, :m], d_features[:, m:]])
    enc_grads, _ = lstm_stack_backward(d_final, enc_caches, model.encoder)
    grads = []
    for layer_grads in enc_grads:
        grads.extend(layer_grads.arrays())
    for layer_grads in head_grads:
        grads.extend(layer_grads.arrays())
    return loss, probs, grads


def predict_pair_probs(model, pairs, chunk_pairs=128):
    """(n, 2) match probabilities for a list of pairs, batched for speed."""
    if not pairs:
        raise ValidationError("empty pair list")
    out = np.empty((len(pairs), 2))
    dim = model.topology.input_dim
    for start in range(0, len(pairs), chunk_pairs):
        block = pairs[start : start + chunk_pairs]
        feats_p = [_sequence_features(p.p, dim) for p in block]
        feats_q = [_sequence_features(p.q, dim) for p in block]
        logits, _, _ = _pair_batch_forward(model, feats_p, feats_q)
        out[start : start + len(block)] = softmax(logits)
    return out


def pair_accuracy(model, pairs):
    """Fraction of pairs whose argmax prediction equals the target.

    Exact (0.5, 0.5) ties count as not-match.
    """
    probs = predict_pair_probs(model, pairs)
    predicted_match = probs[:, 0] > probs[:, 1]
    actual = np.array([p.is_match for p in pairs])
    return float(np.mean(predicted_match == actual))


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 1e-3
    validation_fraction: float = 0.1
    patience: int | None = 25
    restore_best: bool = True
    clip_norm: float | None = None
    train_both_orders: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValidationError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValidationError(f"batch_size must be >= 1, got {self.batch_size}")
        if not 0.0 <= self.validation_fraction <= 0.5:
            raise ValidationError(
                f"validation_fraction must be in [0, 0.5], got {self.validation_fraction}"
            )
        if self.patience is not None and self.patience < 1:
            raise ValidationError(f"patience must be >= 1 or None, got {self.patience}")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    train_accuracy: float
    val_accuracy: float


@dataclass
class TrainHistory:
    records: list = field(default_factory=list)
    best_epoch: int = 0
    stopped_epoch: int = 0

    def __len__(self):
        return len(self.records)


def train_slstm(pairs, config, topology, epoch_callback=None):
    """Train a SiameseModel on match / no-match pairs.

    Mini-batch gradient descent on the mean pair cross-entropy; gradients
    from both branches accumulate into the single shared encoder. Early
    stopping watches validation pair accuracy with the configured patience
    and restores the best epoch's parameters. The optional epoch_callback
    receives (epoch, model) after each epoch, plus (0, model) before
    training starts.

    Returns (model, TrainHistory) with one record per epoch actually run.
    """
    if not pairs:
        raise ValidationError("no training pairs")
    targets_present = {p.is_match for p in pairs}
    if len(targets_present) < 2:
        raise ValidationError("training pairs must contain both targets")

    rng = np.random.default_rng(config.seed)
    model = init_siamese_model(topology, rng)
    dim = topology.input_dim

    work = list(pairs)
    if config.train_both_orders:
        work += [SequencePair(p.q, p.p, p.is_match) for p in pairs]
    perm = rng.permutation(len(work))
    n_val = int(round(len(work) * config.validation_fraction))
    val_pairs = [work[k] for k in perm[:n_val]]
    train_pairs = [work[k] for k in perm[n_val:]]
    if not train_pairs:
        raise ValidationError("validation split consumed every pair")

    feats_p = [_sequence_features(p.p, dim) for p in train_pairs]
    feats_q = [_sequence_features(p.q, dim) for p in train_pairs]
    targets = _targets_array(train_pairs)
    is_match = np.array([p.is_match for p in train_pairs])

    params = model.parameters()
    state = init_adam_state(params, learning_rate=config.learning_rate)
    history = TrainHistory()
    best_metric = -np.inf
    best_snapshot = None
    best_epoch = 0
    bad_epochs = 0

    if epoch_callback is not None:
        epoch_callback(0, model)

    stopped = config.epochs
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(train_pairs))
        loss_sum = 0.0
        hit_sum = 0
        for start in range(0, len(order), config.batch_size):
            idx = order[start : start + config.batch_size]
            b_p = [feats_p[k] for k in idx]
            b_q = [feats_q[k] for k in idx]
            loss, probs, grads = _pair_batch_loss_and_grads(
                model, b_p, b_q, targets[idx]
            )
            if not np.isfinite(loss):
                raise NumericError(
                    f"non-finite loss at epoch {epoch}, batch {start // config.batch_size}"
                )
            if config.clip_norm is not None:
                clip_gradients(grads, config.clip_norm)
            adam_step(params, grads, state)
            loss_sum += loss * len(idx)
            hit_sum += int(np.sum((probs[:, 0] > probs[:, 1]) == is_match[idx]))
        train_loss = loss_sum / len(train_pairs)
        train_acc = hit_sum / len(train_pairs)
        val_acc = pair_accuracy(model, val_pairs) if val_pairs else train_acc
        history.records.append(EpochRecord(epoch, train_loss, train_acc, val_acc))
        if epoch_callback is not None:
            epoch_callback(epoch, model)

        if val_acc > best_metric:
            best_metric = val_acc
            best_epoch = epoch
            best_snapshot = [p.copy() for p in params]
            bad_epochs = 0
        else:
            bad_epochs += 1
        if config.patience is not None and bad_epochs >= config.patience:
            stopped = epoch
            break

    if config.restore_best and best_snapshot is not None:
        for current, saved in zip(params, best_snapshot):
            current[...] = saved
    history.best_epoch = best_epoch
    history.stopped_epoch = min(stopped, len(history.records))
    return model, history

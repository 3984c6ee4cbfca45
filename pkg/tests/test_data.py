import numpy as np
import pytest

from skelmetric.data import (
    ActionSequence,
    Dataset,
    SequencePair,
    normalize_sequence,
    split_cross_subject,
)
from skelmetric.errors import NumericError, ValidationError
from skelmetric.synth import SynthConfig, synth_dataset


def make_seq(seq_id="s0", subject=0, label=0, t=4, n=3, rng=None):
    rng = rng or np.random.default_rng(0)
    return ActionSequence(seq_id, subject, label, rng.normal(size=(t, n, 3)))


def test_sequence_validation():
    with pytest.raises(ValidationError):
        ActionSequence("x", 0, 0, np.zeros((0, 3, 3)))
    with pytest.raises(ValidationError):
        ActionSequence("x", 0, 0, np.zeros((2, 3)))
    with pytest.raises(NumericError):
        ActionSequence("x", 0, 0, np.full((1, 2, 3), np.nan))


def test_features_flatten_joint_major():
    frames = np.arange(12, dtype=np.float64).reshape(2, 2, 3)
    seq = ActionSequence("x", 0, 0, frames)
    feats = seq.features()
    assert feats.shape == (2, 6)
    # x1 y1 z1 x2 y2 z2 ordering
    np.testing.assert_array_equal(feats[0], [0, 1, 2, 3, 4, 5])


def test_pair_target_implied_and_checked():
    a = make_seq("a", label=1)
    b = make_seq("b", label=1)
    c = make_seq("c", label=2)
    assert SequencePair(a, b).is_match is True
    assert SequencePair(a, c).is_match is False
    with pytest.raises(ValidationError):
        SequencePair(a, c, is_match=True)


def test_normalize_none_is_identity():
    seq = make_seq()
    assert normalize_sequence(seq, "none") is seq


def test_center_root_zeroes_root_joint():
    rng = np.random.default_rng(1)
    frames = np.repeat(rng.normal(size=(1, 4, 3)), 5, axis=0)
    seq = ActionSequence("x", 0, 0, frames)
    out = normalize_sequence(seq, "center-root", root_joint=2)
    np.testing.assert_array_equal(out.frames[:, 2, :], np.zeros((5, 3)))


def test_center_root_translation_invariant():
    rng = np.random.default_rng(2)
    for trial in range(10):
        seq = make_seq(rng=np.random.default_rng(trial))
        shifted = ActionSequence(
            seq.sequence_id, seq.subject_id, seq.label, seq.frames + np.array([5.0, 5.0, 5.0])
        )
        a = normalize_sequence(seq, "center-root")
        b = normalize_sequence(shifted, "center-root")
        np.testing.assert_allclose(a.frames, b.frames, atol=1e-12)


def test_center_scale_unit_torso():
    rng = np.random.default_rng(3)
    seq = make_seq(rng=rng)
    out = normalize_sequence(seq, "center-scale", root_joint=0, torso_joint=1)
    torso = np.linalg.norm(out.frames[:, 1, :], axis=1).mean()
    assert torso == pytest.approx(1.0, abs=1e-12)


def test_center_scale_zero_torso_errors():
    frames = np.zeros((3, 2, 3))
    seq = ActionSequence("x", 0, 0, frames)
    with pytest.raises(NumericError):
        normalize_sequence(seq, "center-scale")


def test_unknown_scheme_rejected():
    with pytest.raises(ValidationError):
        normalize_sequence(make_seq(), "whiten")


def test_split_cross_subject_nine_subjects():
    seqs = [
        make_seq(f"s{i}_{j}", subject=i, label=j % 2, rng=np.random.default_rng(i * 10 + j))
        for i in range(9)
        for j in range(3)
    ]
    ds = Dataset(tuple(seqs), ("a", "b"), 3)
    train, test = split_cross_subject(ds, 3)
    assert sorted(set(s.subject_id for s in train.sequences)) == [
        0, 1, 2, 4, 5, 6, 7, 8,
    ]
    assert set(s.subject_id for s in test.sequences) == {3}
    assert len(train) + len(test) == len(ds)


def test_split_partition_property():
    rng = np.random.default_rng(9)
    for trial in range(5):
        ds = synth_dataset(
            SynthConfig(class_count=3, subjects=4, sequences_per_class_per_subject=2,
                        joint_count=4, frame_range=(5, 8), noise_std=0.01),
            rng_seed=trial,
        )
        subject = int(rng.integers(0, 4))
        train, test = split_cross_subject(ds, subject)
        assert len(train) + len(test) == len(ds)
        train_ids = {s.sequence_id for s in train.sequences}
        test_ids = {s.sequence_id for s in test.sequences}
        assert not train_ids & test_ids
        assert train_ids | test_ids == {s.sequence_id for s in ds.sequences}


def test_split_unknown_or_only_subject_errors():
    ds = Dataset((make_seq("a", subject=0), make_seq("b", subject=0, label=1)), ("x", "y"), 3)
    with pytest.raises(ValidationError):
        split_cross_subject(ds, 5)
    with pytest.raises(ValidationError):
        split_cross_subject(ds, 0)

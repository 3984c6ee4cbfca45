"""Skeleton-sequence data model: sequences, datasets, normalization, splits.

A sequence stores its frames as a (T, N, 3) float64 array: T frames of N
joints with (x, y, z) coordinates in dataset units. Frames are flattened
to feature vectors in joint-major order (x1, y1, z1, x2, ...) when they
enter an encoder.
"""

from dataclasses import dataclass

import numpy as np

from skelmetric.errors import NumericError, ValidationError

NORMALIZATION_SCHEMES = ("none", "center-root", "center-scale")


@dataclass(frozen=True)
class ActionSequence:
    """One recorded action: ordered skeleton frames plus identity metadata."""

    sequence_id: str
    subject_id: int
    label: int
    frames: np.ndarray  # (T, N, 3) float64

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 3 or frames.shape[2] != 3:
            raise ValidationError(
                f"frames must be (T, N, 3), got shape {frames.shape}"
            )
        if frames.shape[0] < 1:
            raise ValidationError("a sequence needs at least one frame")
        if not np.all(np.isfinite(frames)):
            raise NumericError(f"sequence {self.sequence_id} has non-finite joints")
        object.__setattr__(self, "frames", frames)

    @property
    def length(self):
        return self.frames.shape[0]

    @property
    def joint_count(self):
        return self.frames.shape[1]

    def features(self):
        """Frames flattened joint-major to (T, 3N), the encoder input layout."""
        t, n, _ = self.frames.shape
        return self.frames.reshape(t, 3 * n)


@dataclass(frozen=True)
class Dataset:
    """A set of sequences with dense labels in [0, class_count)."""

    sequences: tuple
    class_names: tuple
    joint_count: int
    unit: str = "m"

    def __post_init__(self):
        object.__setattr__(self, "sequences", tuple(self.sequences))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        u = len(self.class_names)
        for seq in self.sequences:
            if seq.joint_count != self.joint_count:
                raise ValidationError(
                    f"sequence {seq.sequence_id} has {seq.joint_count} joints, "
                    f"dataset declares {self.joint_count}"
                )
            if not 0 <= seq.label < u:
                raise ValidationError(
                    f"sequence {seq.sequence_id} label {seq.label} outside [0, {u})"
                )

    def __len__(self):
        return len(self.sequences)

    @property
    def class_count(self):
        return len(self.class_names)

    @property
    def subject_ids(self):
        return sorted({seq.subject_id for seq in self.sequences})

    @property
    def feature_dim(self):
        return 3 * self.joint_count


@dataclass(frozen=True)
class SequencePair:
    """Two sequences plus the match target implied by their labels."""

    p: ActionSequence
    q: ActionSequence
    is_match: bool | None = None

    def __post_init__(self):
        implied = self.p.label == self.q.label
        if self.is_match is None:
            object.__setattr__(self, "is_match", implied)
        elif self.is_match != implied:
            raise ValidationError(
                f"pair target {self.is_match} contradicts labels "
                f"({self.p.label}, {self.q.label})"
            )


def normalize_sequence(seq, scheme, root_joint=0, torso_joint=1):
    """Return a coordinate-normalized copy of the sequence.

    "none": identity. "center-root": subtract the root joint's coordinates
    from every joint, per frame. "center-scale": additionally divide by the
    mean root-to-torso distance over the sequence.
    """
    if scheme not in NORMALIZATION_SCHEMES:
        raise ValidationError(f"unknown normalization scheme {scheme!r}")
    if scheme == "none":
        return seq
    n = seq.joint_count
    if not (0 <= root_joint < n and 0 <= torso_joint < n):
        raise ValidationError(
            f"root/torso joints ({root_joint}, {torso_joint}) outside [0, {n})"
        )
    frames = seq.frames - seq.frames[:, root_joint : root_joint + 1, :]
    if scheme == "center-scale":
        torso = np.linalg.norm(frames[:, torso_joint, :], axis=1).mean()
        if torso <= 0.0:
            raise NumericError(
                f"sequence {seq.sequence_id}: zero torso length under center-scale"
            )
        frames = frames / torso
    return ActionSequence(seq.sequence_id, seq.subject_id, seq.label, frames)


def normalize_dataset(ds, scheme, root_joint=0, torso_joint=1):
    """normalize_sequence applied to every sequence of the dataset."""
    if scheme == "none":
        return ds
    return Dataset(
        tuple(
            normalize_sequence(s, scheme, root_joint, torso_joint)
            for s in ds.sequences
        ),
        ds.class_names,
        ds.joint_count,
        ds.unit,
    )


def split_cross_subject(ds, held_out_subject):
    """Partition into (train, test): test holds exactly the one subject."""
    subjects = set(ds.subject_ids)
    if held_out_subject not in subjects:
        raise ValidationError(
            f"subject {held_out_subject} not present (have {sorted(subjects)})"
        )
    if len(subjects) < 2:
        raise ValidationError("cannot hold out the only subject: train would be empty")
    test = tuple(s for s in ds.sequences if s.subject_id == held_out_subject)
    train = tuple(s for s in ds.sequences if s.subject_id != held_out_subject)
    make = lambda seqs: Dataset(seqs, ds.class_names, ds.joint_count, ds.unit)
    return make(train), make(test)

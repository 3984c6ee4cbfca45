"""Parametric synthetic action generator.

Each class is a family of per-joint sinusoidal trajectories with its own
frequency / phase / amplitude signature around a class-specific base pose.
Subjects add a global position offset and a playback-speed factor; frames
add Gaussian jitter. Trajectories are sampled at a fixed frame period, so
two noise-free sequences of the same class and subject agree wherever
their frame indices align and differ only in length.
"""

from dataclasses import dataclass

import numpy as np

from skelmetric.data import ActionSequence, Dataset
from skelmetric.errors import ValidationError

FRAME_PERIOD = 1.0 / 30.0  # seconds per frame


@dataclass(frozen=True)
class SynthConfig:
    class_count: int = 5
    subjects: int = 4
    sequences_per_class_per_subject: int = 6
    joint_count: int = 15
    frame_range: tuple = (20, 60)
    noise_std: float = 0.05

    def validate(self):
        if self.class_count < 2:
            raise ValidationError(f"class_count must be >= 2, got {self.class_count}")
        if self.subjects < 1:
            raise ValidationError(f"subjects must be >= 1, got {self.subjects}")
        if self.sequences_per_class_per_subject < 1:
            raise ValidationError(
                "sequences_per_class_per_subject must be >= 1, got "
                f"{self.sequences_per_class_per_subject}"
            )
        if self.joint_count < 1:
            raise ValidationError(f"joint_count must be >= 1, got {self.joint_count}")
        lo, hi = self.frame_range
        if not (5 <= lo <= hi <= 200):
            raise ValidationError(
                f"frame_range must satisfy 5 <= lo <= hi <= 200, got {self.frame_range}"
            )
        if self.noise_std < 0.0:
            raise ValidationError(f"noise_std must be >= 0, got {self.noise_std}")


def synth_dataset(config, rng_seed):
    """Generate a Dataset per the config; identical seeds give identical data."""
    config.validate()
    rng = np.random.default_rng(rng_seed)
    u = config.class_count
    n = config.joint_count
    shape = (u, n, 3)

    base = rng.normal(0.0, 0.4, size=shape)
    amplitude = rng.uniform(0.05, 0.3, size=shape)
    frequency = rng.uniform(0.5, 2.0, size=shape)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=shape)
    subject_offset = rng.normal(0.0, 0.1, size=(config.subjects, 3))
    subject_speed = rng.uniform(0.85, 1.2, size=config.subjects)

    lo, hi = config.frame_range
    sequences = []
    for label in range(u):
        for subject in range(config.subjects):
            for rep in range(config.sequences_per_class_per_subject):
                t_len = int(rng.integers(lo, hi + 1))
                times = np.arange(t_len) * FRAME_PERIOD * subject_speed[subject]
                angle = (
                    2.0 * np.pi * frequency[label][None, :, :] * times[:, None, None]
                    + phase[label][None, :, :]
                )
                frames = (
                    base[label][None, :, :]
                    + subject_offset[subject][None, None, :]
                    + amplitude[label][None, :, :] * np.sin(angle)
                )
                frames = frames + config.noise_std * rng.normal(size=frames.shape)
                sequences.append(
                    ActionSequence(
                        sequence_id=f"c{label:02d}_s{subject:02d}_r{rep:02d}",
                        subject_id=subject,
                        label=label,
                        frames=frames,
                    )
                )
    class_names = tuple(f"action_{c:02d}" for c in range(u))
    return Dataset(tuple(sequences), class_names, n, unit="m")

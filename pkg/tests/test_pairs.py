import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skelmetric.data import ActionSequence, Dataset
from skelmetric.errors import ValidationError
from skelmetric.pairs import default_match_ratio, max_pair_budget, sample_pairs
from skelmetric.synth import SynthConfig, synth_dataset


def toy_dataset(class_count, per_class, joint_count=2):
    rng = np.random.default_rng(0)
    seqs = []
    for label in range(class_count):
        for k in range(per_class):
            seqs.append(
                ActionSequence(
                    f"c{label}_{k}", subject_id=k, label=label,
                    frames=rng.normal(size=(3, joint_count, 3)),
                )
            )
    names = tuple(f"class{c}" for c in range(class_count))
    return Dataset(tuple(seqs), names, joint_count)


def test_one_over_u_balance_for_fourteen_classes():
    ds = toy_dataset(14, 10)
    pairs = sample_pairs(ds, default_match_ratio(ds), 1400, rng_seed=5)
    assert len(pairs) == 1400
    n_match = sum(p.is_match for p in pairs)
    assert abs(n_match - 100) <= 1


def test_budget_zero_gives_empty_list():
    ds = toy_dataset(3, 4)
    assert sample_pairs(ds, 0.5, 0, rng_seed=1) == []


def test_exact_match_count_and_target_consistency():
    ds = toy_dataset(3, 10)
    pairs = sample_pairs(ds, 0.5, 100, rng_seed=2)
    assert sum(p.is_match for p in pairs) == 50
    for pair in pairs:
        assert pair.is_match == (pair.p.label == pair.q.label)
        assert pair.p.sequence_id != pair.q.sequence_id


def test_no_duplicate_pairs():
    ds = toy_dataset(3, 6)
    pairs = sample_pairs(ds, 0.3, 60, rng_seed=3)
    keys = {tuple(sorted((p.p.sequence_id, p.q.sequence_id))) for p in pairs}
    assert len(keys) == 60


def test_identical_seeds_identical_pairs():
    ds = toy_dataset(4, 5)
    a = sample_pairs(ds, 0.25, 40, rng_seed=9)
    b = sample_pairs(ds, 0.25, 40, rng_seed=9)
    assert [(p.p.sequence_id, p.q.sequence_id) for p in a] == [
        (p.p.sequence_id, p.q.sequence_id) for p in b
    ]
    c = sample_pairs(ds, 0.25, 40, rng_seed=10)
    assert [(p.p.sequence_id, p.q.sequence_id) for p in a] != [
        (p.p.sequence_id, p.q.sequence_id) for p in c
    ]


def test_single_class_rejected():
    ds = toy_dataset(1, 5)
    with pytest.raises(ValidationError):
        sample_pairs(ds, 0.5, 4, rng_seed=0)


def test_over_budget_rejected():
    ds = toy_dataset(2, 3)  # 6 match pairs, 9 no-match pairs
    with pytest.raises(ValidationError):
        sample_pairs(ds, 0.5, 100, rng_seed=0)
    with pytest.raises(ValidationError):
        sample_pairs(ds, 0.9, 10, rng_seed=0)  # needs 9 match pairs, only 6 exist


def test_invalid_ratio_rejected():
    ds = toy_dataset(2, 3)
    for ratio in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValidationError):
            sample_pairs(ds, ratio, 4, rng_seed=0)


def test_max_pair_budget_is_tight():
    ds = toy_dataset(3, 4)  # 18 match, 48 no-match
    budget = max_pair_budget(ds, 0.5)
    pairs = sample_pairs(ds, 0.5, budget, rng_seed=1)
    assert len(pairs) == budget
    with pytest.raises(ValidationError):
        sample_pairs(ds, 0.5, budget + 1, rng_seed=1)


@settings(max_examples=20, deadline=None)
@given(
    budget=st.integers(min_value=1, max_value=60),
    ratio=st.floats(min_value=0.1, max_value=0.6),
    seed=st.integers(min_value=0, max_value=10_000),
)
def test_match_fraction_within_one_pair(budget, ratio, seed):
    ds = toy_dataset(3, 6)  # 45 match, 108 no-match distinct pairs
    want = int(round(budget * ratio))
    if want > 45 or budget - want > 108:
        return
    pairs = sample_pairs(ds, ratio, budget, rng_seed=seed)
    assert len(pairs) == budget
    assert abs(sum(p.is_match for p in pairs) - want) <= 1


def test_synth_dataset_pairs_integration():
    ds = synth_dataset(
        SynthConfig(class_count=5, subjects=4, sequences_per_class_per_subject=6,
                    joint_count=4, frame_range=(5, 10), noise_std=0.01),
        rng_seed=1,
    )
    pairs = sample_pairs(ds, 1.0 / 5.0, 2000, rng_seed=3)
    assert sum(p.is_match for p in pairs) == 400

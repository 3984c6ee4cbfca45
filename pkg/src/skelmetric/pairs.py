"""Balanced match / no-match pair sampling for metric-learning training.

The number of possible no-match pairs dwarfs the match pairs, so training
sets are drawn at a configured match fraction, defaulting to 1/U for a
dataset of U classes.
"""

from itertools import combinations

import numpy as np

from skelmetric.data import SequencePair
from skelmetric.errors import ValidationError


def default_match_ratio(ds):
    """1/U for a dataset of U classes."""
    return 1.0 / ds.class_count


def enumerate_index_pairs(labels):
    """All distinct unordered index pairs, split into (match, no_match) lists."""
    match = []
    no_match = []
    for i, j in combinations(range(len(labels)), 2):
        if labels[i] == labels[j]:
            match.append((i, j))
        else:
            no_match.append((i, j))
    return match, no_match


def max_pair_budget(ds, match_ratio):
    """Largest budget sample_pairs can satisfy at the given ratio."""
    labels = [s.label for s in ds.sequences]
    match, no_match = enumerate_index_pairs(labels)
    if match_ratio <= 0.0 or match_ratio >= 1.0:
        raise ValidationError(f"match_ratio must be in (0, 1), got {match_ratio}")
    # rounding makes feasibility non-monotonic near the boundary; scan down
    budget = len(match) + len(no_match)
    while budget > 0:
        n_match = int(round(budget * match_ratio))
        if n_match <= len(match) and budget - n_match <= len(no_match):
            return budget
        budget -= 1
    return 0


def sample_pairs(ds, match_ratio, pair_budget, rng_seed):
    """Draw pair_budget distinct sequence pairs at the given match fraction.

    Sampling is uniform without replacement within each category; the
    achieved match count is round(pair_budget * match_ratio). Identical
    seeds yield identical pair lists. A sequence is never paired with
    itself.
    """
    if pair_budget < 0:
        raise ValidationError(f"pair_budget must be >= 0, got {pair_budget}")
    if pair_budget == 0:
        return []
    if not 0.0 < match_ratio < 1.0:
        raise ValidationError(f"match_ratio must be in (0, 1), got {match_ratio}")
    labels = [s.label for s in ds.sequences]
    if len(set(labels)) < 2:
        raise ValidationError(
            "pair sampling needs at least two classes (no no-match pairs exist)"
        )
    match_pool, no_pool = enumerate_index_pairs(labels)
    n_match = int(round(pair_budget * match_ratio))
    n_no = pair_budget - n_match
    if n_match > len(match_pool) or n_no > len(no_pool):
        raise ValidationError(
            f"budget {pair_budget} at ratio {match_ratio} needs {n_match} match / "
            f"{n_no} no-match pairs but only {len(match_pool)} / {len(no_pool)} "
            "distinct pairs exist"
        )
    rng = np.random.default_rng(rng_seed)
    picked = [match_pool[k] for k in rng.choice(len(match_pool), n_match, replace=False)]
    picked += [no_pool[k] for k in rng.choice(len(no_pool), n_no, replace=False)]
    order = rng.permutation(len(picked))
    seqs = ds.sequences
    return [
        SequencePair(seqs[picked[k][0]], seqs[picked[k][1]]) for k in order
    ]

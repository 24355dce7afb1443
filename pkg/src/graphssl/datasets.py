"""Synthetic datasets for the benchmark harness and tests."""

from __future__ import annotations

import numpy as np


def gaussian_blobs(n, classes=5, spread=0.15, seed=0):
    """n points split evenly over `classes` Gaussian clusters on a circle."""
    if classes < 1:
        raise ValueError("need at least one class")
    if n < classes:
        raise ValueError("need at least one point per class")
    rng = np.random.default_rng(seed)
    angles = 2.0 * np.pi * np.arange(classes) / classes
    centers = 2.0 * np.column_stack([np.cos(angles), np.sin(angles)])
    counts = np.full(classes, n // classes)
    counts[: n % classes] += 1
    points = []
    labels = []
    for cls, count in enumerate(counts):
        points.append(centers[cls] + rng.normal(scale=spread, size=(count, 2)))
        labels.append(np.full(count, cls, dtype=np.int64))
    return np.vstack(points), np.concatenate(labels)


def two_block_corpus(n=60, vocab=40, other_vocab=30, corrupt_fraction=0.1,
                     magnitude=0.2, jitter=0.0, seed=0):
    """Paired two-block count matrices with a known corruption mask.

    Documents split into two equal blocks with disjoint vocabularies. The
    primary matrix starts as the exact block pattern and gets
    corrupt_fraction of its entries perturbed by +-magnitude (spurious words
    gain mass, true words lose it). The counterpart matrix carries the same
    block structure over its own vocabulary, optionally with positive jitter
    on the support; its linear kernel cleanly separates the blocks because
    the supports are disjoint.

    Returns (clean, corrupted, corrupted_mask, counterpart).
    """
    if n % 2 or vocab % 2 or other_vocab % 2:
        raise ValueError("n, vocab, and other_vocab must be even")
    if not 0.0 <= corrupt_fraction <= 1.0:
        raise ValueError("corrupt_fraction must lie in [0, 1]")
    if magnitude < 0 or magnitude > 1:
        raise ValueError("magnitude must lie in [0, 1] to keep counts nonnegative")
    if jitter < 0:
        raise ValueError("jitter must be nonnegative")
    rng = np.random.default_rng(seed)
    half = n // 2
    clean = np.zeros((n, vocab))
    clean[:half, : vocab // 2] = 1.0
    clean[half:, vocab // 2:] = 1.0

    total = n * vocab
    k = int(round(corrupt_fraction * total))
    flat = rng.choice(total, size=k, replace=False)
    rows, cols = np.unravel_index(flat, (n, vocab))
    corrupted = clean.copy()
    direction = np.where(clean[rows, cols] > 0, -1.0, 1.0)
    corrupted[rows, cols] += direction * magnitude
    mask = np.zeros((n, vocab), dtype=bool)
    mask[rows, cols] = True

    counterpart = np.zeros((n, other_vocab))
    counterpart[:half, : other_vocab // 2] = 1.0
    counterpart[half:, other_vocab // 2:] = 1.0
    if jitter > 0:
        counterpart = counterpart * (1.0 + rng.uniform(0.0, jitter, size=counterpart.shape))
    return clean, corrupted, mask, counterpart

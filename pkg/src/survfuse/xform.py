"""Train-fitted feature transforms: per-feature z-scoring and exact SVD PCA."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Columns with std below this are treated as constant and their std is
# recorded as 1 so that applying the standardizer zeroes them out.
ZERO_VARIANCE_GUARD = 1e-12


@dataclass
class StandardizerParams:
    means: np.ndarray
    stds: np.ndarray


@dataclass
class PcaModel:
    components: np.ndarray  # q x d, rows orthonormal
    train_means: np.ndarray  # d
    explained_variance: np.ndarray  # q, nonincreasing
    q: int


def standardize_fit(train: np.ndarray) -> StandardizerParams:
    """Column means and population stds of the training matrix.

    Constant columns get std 1 so downstream division is safe.
    """
    train = np.asarray(train, dtype=np.float64)
    if train.ndim != 2 or train.shape[0] < 2:
        raise ValueError("degenerate fit: need at least 2 rows")
    if not np.all(np.isfinite(train)):
        raise ValueError("non-finite values in training matrix")
    means = train.mean(axis=0)
    stds = train.std(axis=0)  # population (ddof=0)
    stds = np.where(stds < ZERO_VARIANCE_GUARD, 1.0, stds)
    return StandardizerParams(means=means, stds=stds)


def standardize_apply(params: StandardizerParams, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.means.shape[0]:
        raise ValueError(
            f"dimension mismatch: got {x.shape[-1]} columns, expected {params.means.shape[0]}"
        )
    return (x - params.means) / params.stds


def pca_fit(train_standardized: np.ndarray, q: int) -> PcaModel:
    """Top-q principal directions of the centered training matrix.

    Exact SVD, no randomization. Sign convention: each component is flipped
    so that its largest-magnitude entry is positive (earliest index wins
    ties), making the decomposition reproducible across runs.
    """
    x = np.asarray(train_standardized, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    n, d = x.shape
    if not (1 <= q <= min(n - 1, d)):
        raise ValueError(f"pca dim out of range: q={q}, n={n}, d={d}")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite values in training matrix")
    train_means = x.mean(axis=0)
    centered = x - train_means
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:q].copy()
    for i in range(q):
        j = int(np.argmax(np.abs(components[i])))
        if components[i, j] < 0:
            components[i] = -components[i]
    explained_variance = (s[:q] ** 2) / n
    return PcaModel(
        components=components,
        train_means=train_means,
        explained_variance=explained_variance,
        q=q,
    )


def pca_apply(model: PcaModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.train_means.shape[0]:
        raise ValueError(
            f"dimension mismatch: got {x.shape[-1]} columns, expected {model.train_means.shape[0]}"
        )
    return (x - model.train_means) @ model.components.T

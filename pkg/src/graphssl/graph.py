"""Affinity graph construction and the normalized Laplacian."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import IsolatedVertexError
from .linalg import SparseSymMatrix

SYMMETRIZATIONS = ("union", "mutual")
WEIGHT_KINDS = ("gaussian", "linear", "precomputed")


@dataclass(frozen=True)
class GraphConfig:
    """Neighborhood-graph parameters.

    sigma is the Gaussian kernel bandwidth, k the neighbor count, and
    symmetrization decides whether an edge survives when either endpoint
    selects it ("union") or only when both do ("mutual").
    """

    sigma: float = 1.0
    k: int = 4
    symmetrization: str = "union"

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.symmetrization not in SYMMETRIZATIONS:
            raise ValueError(f"symmetrization must be one of {SYMMETRIZATIONS}")


@dataclass(frozen=True)
class WeightMatrix:
    """Nonnegative symmetric affinity matrix with an empty diagonal."""

    inner: SparseSymMatrix
    kind: str = "precomputed"

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ValueError(f"kind must be one of {WEIGHT_KINDS}")
        if np.any(self.inner.vals <= 0.0):
            raise ValueError("affinity weights must be strictly positive")
        if np.any(self.inner.rows == self.inner.cols):
            raise ValueError("affinity diagonal must be empty")

    @property
    def n(self):
        return self.inner.n


def _as_features(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("features must be a 2-d array of shape (samples, dims)")
    if not np.all(np.isfinite(x)):
        raise ValueError("features must be finite")
    return x


def gaussian_weights(x, sigma):
    """Dense Gaussian-kernel affinities exp(-||xi - xj||^2 / (2 sigma^2)).

    The diagonal is forced to zero; every off-diagonal pair is stored unless
    the kernel underflows to exactly zero.
    """
    x = _as_features(x)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    n = x.shape[0]
    if n < 2:
        raise ValueError("need at least two samples")
    sq = np.sum(x * x, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    w = np.exp(-d2 / (2.0 * sigma * sigma))
    iu, ju = np.triu_indices(n, k=1)
    vals = w[iu, ju]
    keep = vals > 0.0
    return WeightMatrix(SparseSymMatrix(n, iu[keep], ju[keep], vals[keep]), kind="gaussian")


def linear_kernel(x):
    """Inner-product affinities <xi, xj> for nonnegative features.

    Zero products (orthogonal rows) are not stored; any negative feature is
    rejected because it could produce a negative weight.
    """
    x = _as_features(x)
    if np.any(x < 0.0):
        raise ValueError("linear kernel requires nonnegative features")
    n = x.shape[0]
    if n < 2:
        raise ValueError("need at least two samples")
    g = x @ x.T
    iu, ju = np.triu_indices(n, k=1)
    vals = g[iu, ju]
    keep = vals > 0.0
    return WeightMatrix(SparseSymMatrix(n, iu[keep], ju[keep], vals[keep]), kind="linear")


def knn_sparsify(w, config):
    """Keep each vertex's k strongest edges, then symmetrize.

    Union mode keeps (i, j) if either endpoint ranks the other among its top
    k weights; mutual mode requires both. Surviving weights are unchanged.
    """
    n = w.n
    if config.k >= n:
        raise ValueError(f"k={config.k} must be smaller than the number of vertices {n}")
    csr = w.inner.to_csr()
    indptr, indices, data = csr.indptr, csr.indices, csr.data
    src_parts = []
    dst_parts = []
    for i in range(n):
        lo, hi = indptr[i], indptr[i + 1]
        deg = hi - lo
        if deg == 0:
            continue
        if deg > config.k:
            sel = np.argpartition(data[lo:hi], deg - config.k)[deg - config.k:]
        else:
            sel = np.arange(deg)
        src_parts.append(np.full(sel.size, i, dtype=np.int64))
        dst_parts.append(indices[lo:hi][sel].astype(np.int64))
    if not src_parts:
        raise ValueError("weight matrix has no edges")
    src = np.concatenate(src_parts)
    dst = np.concatenate(dst_parts)
    lo_idx = np.minimum(src, dst)
    hi_idx = np.maximum(src, dst)
    keys = lo_idx * n + hi_idx
    uniq, counts = np.unique(keys, return_counts=True)
    if config.symmetrization == "mutual":
        uniq = uniq[counts == 2]
        if uniq.size == 0:
            raise ValueError("mutual symmetrization removed every edge")
    kept_rows = uniq // n
    kept_cols = uniq % n
    store_keys = w.inner.rows * n + w.inner.cols
    pos = np.searchsorted(store_keys, uniq)
    vals = w.inner.vals[pos]
    return WeightMatrix(SparseSymMatrix(n, kept_rows, kept_cols, vals), kind=w.kind)


def gaussian_knn_graph(x, config):
    """k-NN Gaussian affinity graph built directly from features.

    Matches knn_sparsify(gaussian_weights(x, sigma), config) without forming
    the dense kernel; neighbors come from a KD-tree, which keeps the
    construction close to n log n. Selecting neighbors by distance equals
    selecting by kernel value because the kernel is monotone.
    """
    x = _as_features(x)
    n = x.shape[0]
    if n < 2:
        raise ValueError("need at least two samples")
    if config.k >= n:
        raise ValueError(f"k={config.k} must be smaller than the number of samples {n}")
    tree = cKDTree(x)
    dist, idx = tree.query(x, k=config.k + 1)
    # Drop exactly one slot per row: the self match when present, else the
    # farthest hit (self can be crowded out by duplicate points).
    drop = idx == np.arange(n)[:, None]
    missing = ~drop.any(axis=1)
    drop[missing, -1] = True
    keep = ~drop
    dst = idx[keep].reshape(n, config.k)
    dd = dist[keep].reshape(n, config.k)
    src = np.repeat(np.arange(n, dtype=np.int64), config.k)
    dst = dst.reshape(-1).astype(np.int64)
    wvals = np.exp(-(dd.reshape(-1) ** 2) / (2.0 * config.sigma * config.sigma))
    nz = wvals > 0.0
    src, dst, wvals = src[nz], dst[nz], wvals[nz]
    lo_idx = np.minimum(src, dst)
    hi_idx = np.maximum(src, dst)
    keys = lo_idx * n + hi_idx
    order = np.argsort(keys, kind="stable")
    keys, lo_idx, hi_idx, wvals = keys[order], lo_idx[order], hi_idx[order], wvals[order]
    uniq_mask = np.ones(keys.size, dtype=bool)
    uniq_mask[1:] = keys[1:] != keys[:-1]
    if config.symmetrization == "mutual":
        first = np.flatnonzero(uniq_mask)
        counts = np.diff(np.append(first, keys.size))
        first = first[counts == 2]
        if first.size == 0:
            raise ValueError("mutual symmetrization removed every edge")
        lo_idx, hi_idx, wvals = lo_idx[first], hi_idx[first], wvals[first]
    else:
        lo_idx, hi_idx, wvals = lo_idx[uniq_mask], hi_idx[uniq_mask], wvals[uniq_mask]
    return WeightMatrix(SparseSymMatrix(n, lo_idx, hi_idx, wvals), kind="gaussian")


def normalized_laplacian(w):
    """I - D^-1/2 W D^-1/2 with D_ii the sum of row i of W.

    Symmetric positive semidefinite with spectrum inside [0, 2]. An isolated
    vertex (zero row sum) raises IsolatedVertexError naming the vertex.
    """
    n = w.n
    deg = np.zeros(n)
    np.add.at(deg, w.inner.rows, w.inner.vals)
    np.add.at(deg, w.inner.cols, w.inner.vals)
    zero = np.flatnonzero(deg == 0.0)
    if zero.size:
        raise IsolatedVertexError(int(zero[0]))
    inv_sqrt = 1.0 / np.sqrt(deg)
    off_vals = -w.inner.vals * inv_sqrt[w.inner.rows] * inv_sqrt[w.inner.cols]
    keep = off_vals != 0.0  # normalization can underflow an extreme weight
    idx = np.arange(n, dtype=np.int64)
    rows = np.concatenate([w.inner.rows[keep], idx])
    cols = np.concatenate([w.inner.cols[keep], idx])
    vals = np.concatenate([off_vals[keep], np.ones(n)])
    return SparseSymMatrix(n, rows, cols, vals)

"""Similarity kernel construction and ground-set clustering.

Kernels map feature vectors to pairwise similarities in [0, 1]. Two metrics
are supported:

* ``cosine``: s_ij = max(0, cos(x_i, x_j)), clamped so downstream gain
  computations never see negative similarities.
* ``euclidean``: s_ij = 1 / (1 + ||x_i - x_j||), bounded, monotone
  decreasing in distance and parameter free.

Distances, where a function needs them, are derived as d = 1 - s rather
than stored separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse as sp
from scipy.spatial.distance import cdist
from sklearn.cluster import KMeans

METRICS = ("cosine", "euclidean")


def validate_features(data: np.ndarray, name: str = "data") -> np.ndarray:
    """Coerce to a 2-D float array and check basic sanity (finite, non-empty)."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and one column")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise ValueError(f"{name} contains a non-finite entry at row {bad[0]}, column {bad[1]}")
    return arr


@dataclass(frozen=True)
class SimilarityKernel:
    """Pairwise similarity matrix over a ground set of n elements.

    ``dense`` holds the full n x n matrix; ``sparse`` holds a symmetric CSR
    matrix whose absent entries mean similarity zero. Exactly one of the two
    is set, according to ``mode``.
    """

    n: int
    mode: str                      # "dense" | "sparse"
    metric: str
    dense: np.ndarray | None = field(default=None, repr=False)
    sparse: sp.csr_matrix | None = field(default=None, repr=False)
    k_neighbors: int | None = None

    def column(self, j: int) -> np.ndarray:
        """Similarities of every element to element j, as a dense vector."""
        if self.mode == "dense":
            return self.dense[:, j]
        # rows and columns agree: the sparse kernel is symmetric by construction
        return self.sparse.getrow(j).toarray().ravel()

    def value(self, i: int, j: int) -> float:
        if self.mode == "dense":
            return float(self.dense[i, j])
        return float(self.sparse[i, j])

    def distances(self) -> np.ndarray:
        """Dense distance view d = 1 - s (sparse kernels densify first)."""
        if self.mode == "dense":
            return 1.0 - self.dense
        return 1.0 - self.sparse.toarray()


@dataclass(frozen=True)
class CrossKernel:
    """Dense rows x cols matrix of cross-similarities between two point sets."""

    rows: int
    cols: int
    values: np.ndarray = field(repr=False)
    metric: str = "euclidean"


@dataclass(frozen=True)
class ClusterMap:
    """Partition of ground-set indices into clusters 0..k-1."""

    assignments: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.assignments, dtype=np.int64)
        object.__setattr__(self, "assignments", labels)
        if labels.ndim != 1 or labels.size < 1:
            raise ValueError("cluster assignments must be a non-empty 1-D array")
        present = np.unique(labels)
        if present[0] < 0 or present[-1] >= self.k:
            raise ValueError(f"cluster ids must lie in 0..{self.k - 1}")
        if len(present) != self.k:
            missing = sorted(set(range(self.k)) - set(present.tolist()))
            raise ValueError(f"empty cluster(s): {missing}")

    @property
    def n(self) -> int:
        return int(self.assignments.size)

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == cluster)


def _cosine_matrix(a: np.ndarray, b: np.ndarray, a_name: str, b_name: str) -> np.ndarray:
    for arr, name in ((a, a_name), (b, b_name)):
        norms = np.linalg.norm(arr, axis=1)
        zero = np.flatnonzero(norms == 0.0)
        if zero.size:
            raise ValueError(f"cosine metric undefined: {name} row {zero[0]} has zero norm")
    an = a / np.linalg.norm(a, axis=1, keepdims=True)
    bn = b / np.linalg.norm(b, axis=1, keepdims=True)
    return np.clip(an @ bn.T, 0.0, 1.0)


def _euclidean_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + cdist(a, b, metric="euclidean"))


def _pairwise(a: np.ndarray, b: np.ndarray, metric: str,
              a_name: str = "data", b_name: str = "data") -> np.ndarray:
    if metric == "cosine":
        return _cosine_matrix(a, b, a_name, b_name)
    if metric == "euclidean":
        return _euclidean_matrix(a, b)
    raise ValueError(f"unsupported metric {metric!r}; expected one of {METRICS}")


def build_dense_kernel(data: np.ndarray, metric: str = "euclidean") -> SimilarityKernel:
    """Build the full n x n similarity kernel for a feature matrix.

    The result is exactly symmetric, has unit diagonal and entries in [0, 1].
    """
    arr = validate_features(data)
    s = _pairwise(arr, arr, metric)
    s = (s + s.T) / 2.0
    np.fill_diagonal(s, 1.0)
    return SimilarityKernel(n=arr.shape[0], mode="dense", metric=metric, dense=s)


def kernel_from_matrix(matrix: np.ndarray, metric: str = "precomputed") -> SimilarityKernel:
    """Wrap a user-supplied dense similarity matrix, checking kernel invariants."""
    s = np.asarray(matrix, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"kernel must be square, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValueError("kernel contains non-finite entries")
    if np.abs(s - s.T).max() > 1e-9:
        raise ValueError("kernel is not symmetric within 1e-9")
    if s.min() < -1e-12 or s.max() > 1.0 + 1e-12:
        raise ValueError("kernel entries must lie in [0, 1]")
    s = np.clip((s + s.T) / 2.0, 0.0, 1.0)
    return SimilarityKernel(n=s.shape[0], mode="dense", metric=metric, dense=s)


def build_sparse_kernel(data: np.ndarray, metric: str = "euclidean",
                        k_neighbors: int = 10) -> SimilarityKernel:
    """Build a k-nearest-neighbor similarity kernel.

    Each row keeps its ``k_neighbors`` most similar other elements plus the
    self entry; ties are broken toward the lower index. The retained pattern
    is symmetrized by union, so if j survives in row i then i is inserted in
    row j with the identical dense value. Absent entries mean similarity 0.
    """
    arr = validate_features(data)
    n = arr.shape[0]
    if not 1 <= k_neighbors < n:
        raise ValueError(f"k_neighbors must satisfy 1 <= k < n, got k={k_neighbors}, n={n}")
    dense = build_dense_kernel(arr, metric).dense

    keep = np.zeros((n, n), dtype=bool)
    for i in range(n):
        sims = dense[i].copy()
        sims[i] = -np.inf                       # self excluded from the neighbor ranking
        # stable sort on -sims: equal similarities resolve to the smaller index
        order = np.argsort(-sims, kind="stable")
        keep[i, order[:k_neighbors]] = True
    keep |= keep.T                              # union symmetrization
    np.fill_diagonal(keep, True)

    rows, cols = np.nonzero(keep)
    mat = sp.csr_matrix((dense[rows, cols], (rows, cols)), shape=(n, n))
    return SimilarityKernel(n=n, mode="sparse", metric=metric, sparse=mat,
                            k_neighbors=k_neighbors)


def build_cross_kernel(a: np.ndarray, b: np.ndarray, metric: str = "euclidean") -> CrossKernel:
    """Cross-similarity matrix between point sets a (rows) and b (columns)."""
    a_arr = validate_features(a, "a")
    b_arr = validate_features(b, "b")
    if a_arr.shape[1] != b_arr.shape[1]:
        raise ValueError(
            f"dimensionality mismatch: a has {a_arr.shape[1]} columns, b has {b_arr.shape[1]}")
    values = _pairwise(a_arr, b_arr, metric, "a", "b")
    return CrossKernel(rows=a_arr.shape[0], cols=b_arr.shape[0], values=values, metric=metric)


def cluster_ground_set(data: np.ndarray, k: int, seed: int = 0) -> ClusterMap:
    """Partition the ground set into k clusters with seeded k-means.

    Uses k-means++ initialization, at most 300 iterations and relative
    inertia tolerance 1e-4; the result is deterministic for a given seed.
    """
    arr = validate_features(data)
    n = arr.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"cluster count must satisfy 1 <= k <= n, got k={k}, n={n}")
    if k == n:
        return ClusterMap(assignments=np.arange(n), k=n)
    if k == 1:
        return ClusterMap(assignments=np.zeros(n, dtype=np.int64), k=1)
    km = KMeans(n_clusters=k, init="k-means++", n_init=10, max_iter=300,
                tol=1e-4, random_state=seed)
    labels = km.fit_predict(arr)
    # relabel so cluster ids are dense and ordered by first occurrence
    remap: dict[int, int] = {}
    for lab in labels:
        if lab not in remap:
            remap[lab] = len(remap)
    dense_labels = np.array([remap[lab] for lab in labels], dtype=np.int64)
    return ClusterMap(assignments=dense_labels, k=len(remap))


def per_cluster_kernels(data: np.ndarray, cluster_map: ClusterMap,
                        metric: str = "euclidean") -> list[SimilarityKernel]:
    """Dense within-cluster kernels, one per cluster, in cluster-id order."""
    arr = validate_features(data)
    if arr.shape[0] != cluster_map.n:
        raise ValueError("data rows and cluster assignments disagree in length")
    return [build_dense_kernel(arr[cluster_map.members(c)], metric)
            for c in range(cluster_map.k)]

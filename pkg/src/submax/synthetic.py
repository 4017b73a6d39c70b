"""Seeded synthetic 2-D datasets for demos, benchmarks, and tests."""

from __future__ import annotations

import numpy as np
from sklearn.datasets import make_blobs


def clustered_points(n: int = 500, clusters: int = 10, std: float = 4.0,
                     seed: int = 0, box: tuple[float, float] = (0.0, 100.0)) -> np.ndarray:
    """Gaussian blobs: n points around `clusters` random centers in a box."""
    data, _ = make_blobs(n_samples=n, centers=clusters, cluster_std=std,
                         center_box=box, random_state=seed)
    return data


def clusters_with_outliers(n_clusters: int = 5, per_cluster: int = 9,
                           n_outliers: int = 3, std: float = 0.5,
                           seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Tight clusters plus far-away outliers appended at the last indices.

    Returns (data, labels); outliers carry label -1. Cluster centers sit on
    a small circle, outliers far outside it, so representation-seeking
    selections visit every cluster before any outlier while dispersion-
    seeking selections jump to the outliers immediately.
    """
    rng = np.random.default_rng(seed)
    angles = 2.0 * np.pi * np.arange(n_clusters) / n_clusters
    centers = 15.0 * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    points, labels = [], []
    for c in range(n_clusters):
        points.append(centers[c] + rng.normal(scale=std, size=(per_cluster, 2)))
        labels.extend([c] * per_cluster)
    out_angles = 2.0 * np.pi * (np.arange(n_outliers) + 0.25) / max(n_outliers, 1)
    outliers = 80.0 * np.stack([np.cos(out_angles), np.sin(out_angles)], axis=1)
    points.append(outliers)
    labels.extend([-1] * n_outliers)
    return np.vstack(points), np.asarray(labels, dtype=np.int64)

# salient/clustering/dbscan.py

import logging
from typing import Callable, List

import numpy as np
from sklearn.cluster import DBSCAN

logger = logging.getLogger(__name__)

NOISE = -1


def dbscan_matrix(distances: np.ndarray, eps: float, min_samples: int) -> List[int]:
    """
    DBSCAN over a precomputed symmetric (n, n) distance matrix.

    A point is core when at least `min_samples` points (itself included) lie
    within `eps`, inclusive. Cluster ids follow the order of each cluster's
    lowest-index core point and a border point joins the lowest adjacent cluster.
    """
    distances = np.clip(np.asarray(distances, dtype=np.float64), 0.0, None)  # 1 - IoU may round to -1e-16
    if distances.shape[0] == 0:
        return []
    labels = DBSCAN(eps=eps, min_samples=min_samples, metric="precomputed").fit_predict(distances)
    return labels.tolist()


def dbscan(n: int, dist: Callable[[int, int], float], eps: float, min_samples: int) -> List[int]:
    """DBSCAN over `n` items with a pairwise distance oracle; see `dbscan_matrix`."""
    if n == 0:
        return []
    distances = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            distances[i, j] = distances[j, i] = dist(i, j)
    return dbscan_matrix(distances, eps, min_samples)

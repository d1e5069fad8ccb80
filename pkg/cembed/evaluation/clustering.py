"""
Seeded k-means clustering shared by the meta-class scheme construction and the clustering evaluation.
"""
import warnings
from dataclasses import dataclass
import numpy as np
from numpy import ndarray
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning
from ..constants.evaluation import KMEANS_MAX_ITER, KMEANS_TOLERANCE, KMEANS_RESTARTS
from ..exceptions import ParameterError
from ..utils import logger, as_seed


@dataclass(frozen=True)
class ClusteringResult:
    """
    Cluster index of every point, together with the fitted centroids and the within-cluster sum of squares.
    """

    assignments: ndarray
    k: int
    centroids: ndarray
    inertia: float

    @property
    def empty_clusters(self) -> ndarray:
        """
        Get the indices of clusters without any point.
        """
        return np.flatnonzero(np.bincount(self.assignments, minlength=self.k) == 0)


def _fill_empty_clusters(points: ndarray, assignments: ndarray, centroids: ndarray, k: int):
    """
    Move the point farthest from its centroid (among clusters with more than one point) into each empty cluster.
    """
    for cluster in range(k):
        counts = np.bincount(assignments, minlength=k)
        if counts[cluster]:
            continue
        movable = counts[assignments] > 1
        distances = np.where(movable, np.sum((points - centroids[assignments]) ** 2, axis=1), -np.inf)
        farthest = int(np.argmax(distances))
        logger.debug(f"Reseeding empty cluster {cluster} with point {farthest}")
        assignments[farthest] = cluster
        centroids[cluster] = points[farthest]


def kmeans(points: ndarray, k: int, seed: int, max_iter: int = KMEANS_MAX_ITER, tolerance: float = KMEANS_TOLERANCE,
           restarts: int = KMEANS_RESTARTS, fill_empty: bool = True) -> ClusteringResult:
    """
    Cluster points with k-means++ seeded Lloyd iterations, keeping the best of `restarts` runs.

    Unless `fill_empty` is disabled, empty clusters (possible when there are fewer distinct points than clusters) are
    reseeded with the farthest points, so that every cluster is non-empty.

    `ParameterError` will be thrown if k is not between 1 and the number of points.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if not 1 <= k <= points.shape[0]:
        raise ParameterError(f"Can't find {k} clusters among {points.shape[0]} points")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        fitted = KMeans(n_clusters=k, init="k-means++", n_init=restarts, max_iter=max_iter, tol=tolerance,
                        random_state=as_seed(seed)).fit(points)

    assignments = fitted.labels_.astype(np.int64)
    centroids = fitted.cluster_centers_.copy()
    if fill_empty:
        _fill_empty_clusters(points, assignments, centroids, k)

    inertia = float(np.sum((points - centroids[assignments]) ** 2))
    return ClusteringResult(assignments, k, centroids, inertia)

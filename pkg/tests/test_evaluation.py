"""
Verify seeded k-means, the clustering metrics and the open-set breakdown.
"""
import itertools
import numpy as np
import pytest
from cembed.enums import Scope
from cembed.evaluation import kmeans, hungarian_accuracy, hungarian_mapping, nmi, ari, score_open_set, eval_open_set
from cembed.exceptions import ParameterError


def test_kmeans_extremes():
    """
    Test one cluster per point, a single cluster and two obvious pairs.
    """
    points = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
    result = kmeans(points, 4, seed=0)
    assert sorted(result.assignments.tolist()) == [0, 1, 2, 3]
    assert result.inertia == pytest.approx(0.0)

    result = kmeans(points, 1, seed=0)
    assert np.allclose(result.centroids[0], [5.0, 0.5])

    result = kmeans(points, 2, seed=0)
    assert result.assignments[0] == result.assignments[1] != result.assignments[2] == result.assignments[3]
    assert result.inertia == pytest.approx(1.0)

    with pytest.raises(ParameterError):
        kmeans(points, 5, seed=0)


def test_kmeans_fills_empty_clusters():
    """
    Test that every cluster gets a point even with fewer distinct points than clusters.
    """
    points = np.array([[1.0, 1.0]] * 3 + [[5.0, 5.0]])
    result = kmeans(points, 3, seed=1)
    assert result.empty_clusters.size == 0
    assert np.array_equal(np.bincount(result.assignments, minlength=3) > 0, [True] * 3)


def test_kmeans_determinism():
    """
    Test that the same seed gives the same clustering.
    """
    points = np.random.default_rng(2).standard_normal((60, 3))
    first, second = kmeans(points, 5, seed=3), kmeans(points, 5, seed=3)
    assert np.array_equal(first.assignments, second.assignments)
    assert first.inertia == second.inertia


def test_hungarian_examples():
    """
    Test a relabelled perfect clustering and a clustering with a single mistake.
    """
    accuracy, mapping = hungarian_accuracy([1, 1, 0, 0], [0, 0, 1, 1])
    assert accuracy == 1.0 and mapping == {0: 1, 1: 0}

    accuracy, _ = hungarian_accuracy([1, 1, 1, 0], [0, 0, 1, 1])
    assert accuracy == pytest.approx(0.75)


@pytest.mark.parametrize("seed", range(10))
def test_hungarian_is_optimal(seed):
    """
    Test the Hungarian accuracy against every one-to-one mapping.
    """
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 7))
    truth = rng.integers(0, k, 40)
    pred = rng.integers(0, k, 40)
    clusters, classes = np.unique(pred).tolist(), np.unique(truth).tolist()

    best = 0.0
    size = min(len(clusters), len(classes))
    for assigned in itertools.combinations(clusters, size):
        for chosen in itertools.permutations(classes, size):
            mapping = dict(zip(assigned, chosen))
            best = max(best, np.mean([mapping.get(cluster) == label for cluster, label in zip(pred, truth)]))
    assert hungarian_accuracy(pred, truth)[0] == pytest.approx(best)


def test_hungarian_with_more_clusters():
    """
    Test that clusters without a class stay out of the mapping.
    """
    mapping = hungarian_mapping([0, 1, 2, 2], [5, 5, 6, 6])
    assert len(mapping) == 2 and mapping[2] == 6


def test_nmi_and_ari_examples():
    """
    Test identical partitions, relabelling, single clusters and independent partitions.
    """
    truth = [0, 0, 1, 1]
    assert nmi([3, 3, 7, 7], truth) == pytest.approx(1.0)
    assert ari([3, 3, 7, 7], truth) == pytest.approx(1.0)
    assert nmi([0, 0, 0, 0], [0, 0, 0, 0]) == pytest.approx(1.0)
    assert nmi([0, 0, 0, 0], truth) == pytest.approx(0.0)
    assert nmi([0, 1, 0, 1], truth) == pytest.approx(0.0, abs=1e-12)
    assert ari([0, 1, 0, 1], truth) == pytest.approx(-0.5)
    with pytest.raises(ParameterError):
        nmi([0, 1], [0])


def test_open_set_breakdown():
    """
    Test a hand-checked breakdown, with one mapping shared by every scope.
    """
    truth = np.array([0, 0, 0, 1, 1, 1, 2, 2])
    pred = np.array([0, 0, 1, 1, 1, 2, 2, 2])
    metrics = score_open_set(pred, truth, {0, 1})

    assert metrics.total.acc == pytest.approx(6 / 8)
    assert metrics.seen.acc == pytest.approx(4 / 6)
    assert metrics.unseen.acc == pytest.approx(1.0)
    assert (metrics.seen.count, metrics.unseen.count, metrics.total.count) == (6, 2, 8)
    assert metrics.unseen.nmi == pytest.approx(1.0) and metrics.unseen.ari == pytest.approx(1.0)
    assert metrics.seen.nmi == pytest.approx(nmi(pred[:6], truth[:6]))
    assert metrics.scope(Scope.SEEN) is metrics.seen


def test_absent_unseen_scope():
    """
    Test that without novel-class items the unseen scope is absent.
    """
    metrics = score_open_set([0, 0, 1, 1], [0, 0, 1, 1], {0, 1})
    assert metrics.unseen is None
    assert set(metrics.to_dict()) == {"seen", "total"}
    total = metrics.to_dict()["total"]
    assert total["acc"] == 1.0 and total["count"] == 4
    assert total["nmi"] == pytest.approx(1.0) and total["ari"] == pytest.approx(1.0)


def test_eval_open_set_on_separated_blobs():
    """
    Test that well separated groups are recovered perfectly in every scope.
    """
    rng = np.random.default_rng(4)
    truth = np.repeat([0, 1, 2, 3], 15)
    centres = 20 * np.eye(4)
    embeddings = centres[truth] + rng.standard_normal((60, 4))
    metrics = eval_open_set(embeddings, truth, {0, 1}, 4, seed=5)
    for scope in Scope:
        assert metrics.scope(scope).acc == 1.0
        assert metrics.scope(scope).ari == pytest.approx(1.0)

    with pytest.raises(ParameterError):
        eval_open_set(np.zeros((0, 4)), [], {0}, 1, seed=0)

"""
Verify class embeddings and the construction, lookups and files of meta-class schemes.
"""
import itertools
import numpy as np
import pytest
from cembed.data import FeatureTable, OpenSetSplit
from cembed.embedding import IdentityEncoder
from cembed.enums import EmbeddingMode
from cembed.exceptions import DataError, FormatError, ParameterError, SchemeConstructionError, UnknownClassError
from cembed.scheme import ClassEmbeddingMatrix, MetaClassScheme, class_embeddings, build_scheme, meta_label
from cembed.scheme import meta_labels, code_bits, set_bits, save_scheme, load_scheme


def _split(seen, labeled, unlabeled, novel=()) -> OpenSetSplit:
    return OpenSetSplit(frozenset(seen), frozenset(novel), frozenset(labeled), frozenset(unlabeled))


def _uniform_scheme(num_sets: int, size: int, n_classes: int) -> MetaClassScheme:
    assignment = tuple(class_index % size for class_index in range(n_classes))
    return MetaClassScheme(tuple(range(n_classes)), (size,) * num_sets, (assignment,) * num_sets,
                           tuple((index,) for index in range(num_sets)))


def test_class_means_of_single_examples():
    """
    Test that with one labeled example per class, class means are the normalised examples.
    """
    features = np.random.default_rng(0).standard_normal((6, 5)).astype(np.float32)
    table = FeatureTable(np.arange(6), np.array([0, 1, 2, 0, 1, 2]), features)
    embeddings = class_embeddings(table, _split({0, 1, 2}, {0, 1, 2}, {3, 4, 5}), IdentityEncoder(5),
                                  EmbeddingMode.CLASS_MEANS)

    assert embeddings.classes == (0, 1, 2)
    expected = features[:3] / np.linalg.norm(features[:3], axis=1, keepdims=True)
    assert np.allclose(embeddings.rows, expected, atol=1e-6)


def test_classifier_weights_point_to_their_class():
    """
    Test that each classifier weight row is closer to its own class mean than the other class's.
    """
    rng = np.random.default_rng(1)
    means = np.array([[5.0, 0.0, 0.0], [0.0, 5.0, 0.0]])
    labels = np.repeat([0, 1], 20)
    features = means[labels] + 0.3 * rng.standard_normal((40, 3))
    table = FeatureTable(np.arange(40), labels, features)
    embeddings = class_embeddings(table, _split({0, 1}, range(40), ()), IdentityEncoder(3))

    assert np.allclose(np.linalg.norm(embeddings.rows, axis=1), 1.0)
    similarities = means @ embeddings.rows.T
    assert similarities[0, 0] > 0 and similarities[1, 1] > 0
    assert similarities[0, 0] > similarities[0, 1]
    assert similarities[1, 1] > similarities[1, 0]


def test_seen_class_without_labels():
    """
    Test that a seen class without labeled records is rejected.
    """
    table = FeatureTable(np.arange(4), np.array([0, 0, 1, 1]), np.eye(4))
    with pytest.raises(DataError):
        class_embeddings(table, _split({0, 1}, {0, 1}, {2, 3}), IdentityEncoder(4))


def test_rectangle_partition():
    """
    Test that two meta-classes split the corners of a wide rectangle along its short sides, matching the best
    partition by brute force.
    """
    rows = np.array([[0.0, 0.0], [3.0, 0.0], [0.0, 1.0], [3.0, 1.0]])
    scheme = build_scheme(ClassEmbeddingMatrix((0, 1, 2, 3), rows), 1, 2, 2, seed=0)

    def cost(labels):
        return sum(np.sum((rows[np.array(labels) == group] - rows[np.array(labels) == group].mean(axis=0)) ** 2)
                   for group in set(labels))

    candidates = [labels for labels in itertools.product([0, 1], repeat=4) if labels[0] == 0 and len(set(labels)) == 2]
    best = min(candidates, key=cost)
    assert scheme.assignment[0] == best == (0, 1, 0, 1)


def test_scheme_properties():
    """
    Test the partition property, the sampled subspaces and determinism on random class embeddings.
    """
    rows = np.random.default_rng(2).standard_normal((7, 16))
    embeddings = ClassEmbeddingMatrix(tuple(range(7)), rows)
    scheme = build_scheme(embeddings, 6, 4, 0, seed=3)

    assert scheme.num_sets == 6 and scheme.sizes == (4,) * 6
    assert scheme.subspace_dim == 4
    for assignment, dims in zip(scheme.assignment, scheme.subspace_dims):
        assert len(assignment) == 7
        assert sorted(set(assignment)) == [0, 1, 2, 3]
        assert len(set(dims)) == 4 and max(dims) < 16
    assert len(set(scheme.subspace_dims)) > 1
    assert build_scheme(embeddings, 6, 4, 0, seed=3) == scheme


def test_invalid_scheme_parameters():
    """
    Test that more meta-classes than classes, oversized subspaces and empty schemes are rejected.
    """
    embeddings = ClassEmbeddingMatrix((0, 1, 2), np.eye(3))
    with pytest.raises(ParameterError):
        build_scheme(embeddings, 1, 4, 0, seed=0)
    with pytest.raises(ParameterError):
        build_scheme(embeddings, 1, 2, 4, seed=0)
    with pytest.raises(ParameterError):
        build_scheme(embeddings, 0, 2, 0, seed=0)


def test_degenerate_embeddings():
    """
    Test that identical class embeddings can't fill two meta-classes.
    """
    embeddings = ClassEmbeddingMatrix((0, 1, 2), np.ones((3, 4)))
    with pytest.raises(SchemeConstructionError):
        build_scheme(embeddings, 1, 2, 4, seed=0)


def test_meta_label_lookups():
    """
    Test lookups, the identity partition and unknown classes.
    """
    scheme = build_scheme(ClassEmbeddingMatrix((0, 1, 2, 3), np.eye(4)), 2, 4, 4, seed=0)
    for set_index, class_index in itertools.product(range(2), range(4)):
        assert meta_label(scheme, set_index, class_index) == class_index

    scheme = MetaClassScheme((0, 1, 2), (2,), ((1, 0, 1),), ((0,),))
    assert meta_label(scheme, 0, 0) == 1
    assert np.array_equal(meta_labels(scheme, [2, -1, 1]), [[1], [-1], [0]])
    with pytest.raises(UnknownClassError):
        meta_label(scheme, 0, 5)
    with pytest.raises(UnknownClassError):
        meta_labels(scheme, [0, 7])


def test_code_bits():
    """
    Test the storage budgets of the default configurations and of non-powers of two.
    """
    assert code_bits(_uniform_scheme(6, 4, 7)) == 12
    assert code_bits(_uniform_scheme(12, 4, 7)) == 24
    assert code_bits(_uniform_scheme(24, 4, 7)) == 48
    assert code_bits(_uniform_scheme(1, 2, 3)) == 1
    assert [set_bits(size) for size in (1, 2, 3, 4, 5, 8, 9)] == [0, 1, 2, 2, 3, 3, 4]


def test_scheme_file_round_trip(tmp_path):
    """
    Test that schemes survive their text file and that broken files are format errors.
    """
    scheme = build_scheme(ClassEmbeddingMatrix(tuple(range(5)), np.random.default_rng(4).standard_normal((5, 8))),
                          3, 2, 0, seed=9)
    path = str(tmp_path / "scheme.txt")
    save_scheme(scheme, path)
    assert load_scheme(path) == scheme
    with open(path) as f:
        assert f.readline().split() == ["3", "2", "9"]

    broken = tmp_path / "broken.txt"
    broken.write_text("2 1 0\n2 2\n0 1 0\n")
    with pytest.raises(FormatError):
        load_scheme(str(broken))

    unused = tmp_path / "unused.txt"
    unused.write_text("1 1 0\n3\n0 1 1\n0\n")
    with pytest.raises(FormatError):
        load_scheme(str(unused))

"""
Verify normalisation, soft and hard assignment, the combinatorial embedding and model files.
"""
import numpy as np
import pytest
from cembed.embedding import l2_normalize, soft_assign, comb_embed, hard_assign, assignment_weights, encode
from cembed.embedding import Encoder, Hyperparams, Model, save_model, load_model
from cembed.exceptions import FormatError, NormalizationError, ParameterError, ShapeError


def _model(seed: int = 0, sizes=(2, 3, 2)) -> Model:
    return Model.initialise(4, 8, 3, list(sizes), Hyperparams(), np.random.default_rng(seed))


def test_l2_normalize():
    """
    Test unit length scaling, idempotence and the zero vector.
    """
    assert np.allclose(l2_normalize(np.array([3.0, 4.0])), [0.6, 0.8])
    unit = l2_normalize(np.random.default_rng(0).standard_normal((5, 3)))
    assert np.allclose(np.linalg.norm(unit, axis=1), 1.0)
    assert np.allclose(l2_normalize(unit), unit)
    with pytest.raises(NormalizationError):
        l2_normalize(np.zeros(3))


def test_encode_splits_subvectors():
    """
    Test that z is split into M contiguous subvectors of equal size.
    """
    encoder = Encoder.initialise(4, 5, 6, np.random.default_rng(1), num_sets=3)
    x = np.random.default_rng(2).standard_normal(4)
    z, subvectors = encode(encoder, x)
    assert z.shape == (6,)
    assert [subvector.shape for subvector in subvectors] == [(2,)] * 3
    assert np.array_equal(np.concatenate(subvectors), z)

    with pytest.raises(ShapeError):
        encode(encoder, np.ones(5))


def test_zero_encoder():
    """
    Test that an encoder with zero weights and biases outputs the zero vector.
    """
    encoder = Encoder(np.zeros((3, 4)), np.zeros(4), np.zeros((4, 2)), np.zeros(2))
    assert np.array_equal(encoder(np.ones(3)), np.zeros((1, 2)))


def test_soft_assign_examples():
    """
    Test a single prototype, equally similar prototypes and a large scale.
    """
    theta = np.array([[2.0], [0.0]])
    assert np.allclose(soft_assign(np.array([0.3, -1.0]), theta, 10.0), [1.0, 0.0])

    prototypes = np.eye(2)
    assert np.allclose(soft_assign(np.array([1.0, 1.0]), prototypes, 10.0), [0.5, 0.5])
    assert np.allclose(soft_assign(np.array([1.0, 0.0]), prototypes, 1e4), [1.0, 0.0], atol=1e-3)


def test_soft_assign_is_convex():
    """
    Test that the assignment weights are non-negative and sum to 1.
    """
    rng = np.random.default_rng(3)
    weights = assignment_weights(rng.standard_normal((20, 4)), rng.standard_normal((4, 5)), 10.0)
    assert (weights >= 0).all()
    assert np.allclose(weights.sum(axis=1), 1.0)


def test_hard_limit():
    """
    Test that soft assignment at a large scale matches the most similar prototype, whenever the best similarity leads
    the runner-up by at least 0.01.
    """
    rng = np.random.default_rng(4)
    checked = 0
    for _ in range(1000):
        z = rng.standard_normal(4)
        theta = l2_normalize(rng.standard_normal((4, 4)), axis=0)
        similarities = np.sort(l2_normalize(z) @ theta)
        if similarities[-1] - similarities[-2] < 0.01:
            continue
        best = theta[:, np.argmax(l2_normalize(z) @ theta)]
        assert np.linalg.norm(soft_assign(z, theta, 1e4) - best) < 1e-3
        checked += 1
    assert checked > 900


def test_comb_embed_by_hand():
    """
    Test the concatenation of per-set soft assignments for two hand-set prototype matrices.
    """
    thetas = [np.eye(2), np.array([[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]])]
    z = np.array([2.0, 1.0, -1.0, 3.0])
    expected = np.concatenate([soft_assign(z[:2], thetas[0], 5.0), soft_assign(z[2:], thetas[1], 5.0)])
    assert np.allclose(comb_embed(z, thetas, 5.0), expected)

    weights = np.exp(5.0 * np.array([2.0, 1.0]) / np.sqrt(5.0))
    weights /= weights.sum()
    assert np.allclose(expected[:2], weights)


def test_single_meta_class_sets():
    """
    Test that the embedding doesn't depend on the input when every set has a single meta-class.
    """
    thetas = [np.array([[0.0], [2.0]]), np.array([[1.0], [0.0]])]
    rng = np.random.default_rng(5)
    embedded = comb_embed(rng.standard_normal((10, 4)), thetas, 10.0)
    assert np.allclose(embedded, [0.0, 1.0, 1.0, 0.0])


def test_hard_assign():
    """
    Test argmax assignment, ties going to the lowest index and invariance to the scale of z.
    """
    thetas = [np.eye(2), np.array([[1.0, 0.0, -1.0], [0.0, 1.0, 0.0]])]
    assert np.array_equal(hard_assign(np.array([0.2, 0.9, -3.0, 0.1]), thetas), [[1, 2]])
    assert np.array_equal(hard_assign(np.array([1.0, 1.0, 0.0, 1.0]), thetas), [[0, 1]])

    z = np.random.default_rng(6).standard_normal((50, 4))
    assert np.array_equal(hard_assign(z, thetas), hard_assign(7.5 * z, thetas))


def test_model_round_trip(tmp_path):
    """
    Test that a saved model loads back with its parameters narrowed to float32.
    """
    model = _model()
    path = str(tmp_path / "model.cemb")
    save_model(model, path)
    loaded = load_model(path)

    assert loaded.sizes == model.sizes and loaded.subvector_dim == model.subvector_dim
    for name, value in model.parameters.items():
        assert np.array_equal(loaded.parameters[name], value.astype(np.float32).astype(np.float64))
    assert loaded.hyper.scale == model.hyper.scale

    x = np.random.default_rng(7).standard_normal((5, 4))
    assert np.allclose(loaded.embed(x), model.embed(x), atol=1e-4)


def test_broken_model_files(tmp_path):
    """
    Test that bad magic bytes and truncated files are format errors.
    """
    path = tmp_path / "model.cemb"
    save_model(_model(), str(path))
    data = path.read_bytes()

    path.write_bytes(b"XXXX" + data[4:])
    with pytest.raises(FormatError):
        load_model(str(path))
    path.write_bytes(data[:-6])
    with pytest.raises(FormatError):
        load_model(str(path))


def test_invalid_hyperparameters():
    """
    Test that non-positive scales and out of range thresholds are rejected.
    """
    with pytest.raises(ParameterError):
        Hyperparams(scale=0.0)
    with pytest.raises(ParameterError):
        Hyperparams(threshold=-1.0)
    with pytest.raises(ParameterError):
        Hyperparams(alpha=-0.5)

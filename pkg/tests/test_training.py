"""
Verify augmentation, the optimiser and the training loop.
"""
import numpy as np
import pandas
import pytest
from cembed.config import TrainConfig
from cembed.data import OpenSetSplit, generate_synthetic, make_open_set_split
from cembed.embedding import Model
from cembed.enums import PositiveMode
from cembed.exceptions import ConfigurationError, DataError, ParameterError
from cembed.scheme import MetaClassScheme
from cembed.training import augment, AdamW, train, save_trace

CONFIG = TrainConfig(steps=5, batch_labeled=8, batch_unlabeled=8, hidden=16, subvector_dim=4, seed=3, log_every=1)


def _data():
    table = generate_synthetic(4, 6, 20, 10.0, 1.0, seed=0)
    split = make_open_set_split(table, 0.5, 0.5, seed=0)
    classes = tuple(sorted(split.seen_classes))
    scheme = MetaClassScheme(classes, (2, 2), ((0, 1), (1, 0)), ((0,), (1,)))
    return table, split, scheme


def test_augment_identity():
    """
    Test that augmentation without noise and dropout returns the input.
    """
    x = np.random.default_rng(0).standard_normal((4, 3))
    assert np.array_equal(augment(x, np.random.default_rng(1), 0.0, 0.0), x)


def test_augment_is_unbiased():
    """
    Test that the average of many views lies within 4 standard errors of the input.
    """
    x = np.array([1.0, -2.0, 3.0])
    views = augment(np.tile(x, (10000, 1)), np.random.default_rng(2), 0.5, 0.3)
    error = 4 * views.std(axis=0) / np.sqrt(views.shape[0])
    assert (np.abs(views.mean(axis=0) - x) <= error).all()


def test_augment_determinism():
    """
    Test that the same generator state gives the same view, and invalid settings are rejected.
    """
    x = np.ones((2, 5))
    assert np.array_equal(augment(x, np.random.default_rng(3)), augment(x, np.random.default_rng(3)))
    with pytest.raises(ParameterError):
        augment(x, np.random.default_rng(3), dropout=1.0)


def test_adamw_first_step():
    """
    Test that the first update decays the parameters and then moves each by the learning rate against its gradient.
    """
    parameters = {"w": np.array([1.0, -2.0])}
    optimizer = AdamW(parameters, learning_rate=0.1, weight_decay=0.01)
    optimizer.step({"w": np.array([0.5, -0.1])})
    assert optimizer.steps == 1
    assert np.allclose(parameters["w"], [0.999 - 0.1, -1.998 + 0.1], atol=1e-6)

    with pytest.raises(ConfigurationError):
        optimizer.step({"v": np.zeros(2)})


def test_training_determinism():
    """
    Test that the same data, scheme and configuration give the same model and trace.
    """
    table, split, scheme = _data()
    first = train(table, split, scheme, CONFIG)
    second = train(table, split, scheme, CONFIG)

    for name, value in first.model.parameters.items():
        assert np.array_equal(value, second.model.parameters[name])
    pandas.testing.assert_frame_equal(first.trace, second.trace)


def test_training_trace_and_prototypes():
    """
    Test the trace layout and that prototypes stay at unit length.
    """
    table, split, scheme = _data()
    result = train(table, split, scheme, CONFIG)

    assert list(result.trace.columns) == ["step", "meta", "sim", "cons", "total"]
    assert result.trace["step"].tolist() == [1, 2, 3, 4, 5]
    assert np.isfinite(result.trace.to_numpy()).all()
    for theta in result.model.thetas:
        assert np.allclose(np.linalg.norm(theta, axis=0), 1.0)


def test_weight_decay_only():
    """
    Test that with single meta-classes and no auxiliary terms the gradients vanish, so the encoder weights only decay.
    """
    table, split, _ = _data()
    classes = tuple(sorted(split.seen_classes))
    scheme = MetaClassScheme(classes, (1, 1), ((0,) * len(classes),) * 2, ((0,), (1,)))
    config = TrainConfig(steps=4, batch_labeled=4, batch_unlabeled=4, hidden=8, subvector_dim=3, seed=5, alpha=0.0,
                         beta=0.0, learning_rate=0.01, weight_decay=0.5)
    result = train(table, split, scheme, config)

    init_rng = np.random.default_rng(np.random.SeedSequence(5).spawn(3)[0])
    initial = Model.initialise(table.dim, 8, 3, scheme.sizes, config.hyperparams, init_rng)
    decay = (1 - 0.01 * 0.5) ** 4
    assert np.allclose(result.trace["meta"], 0.0)
    for name in ("encoder.w1", "encoder.w2"):
        assert np.allclose(result.model.parameters[name], initial.parameters[name] * decay, rtol=1e-12, atol=0.0)


def test_kmeans_positives():
    """
    Test that training runs with positives taken from batch clusters.
    """
    table, split, scheme = _data()
    config = TrainConfig(steps=2, batch_labeled=8, batch_unlabeled=8, hidden=16, subvector_dim=4,
                         positive_mode=PositiveMode.KMEANS)
    result = train(table, split, scheme, config)
    assert len(result.trace) == 2


def test_training_preconditions():
    """
    Test that training needs labeled records and a scheme over the seen classes.
    """
    table, split, scheme = _data()
    unlabeled = OpenSetSplit(split.seen_classes, split.novel_classes, frozenset(),
                             split.labeled_ids | split.unlabeled_ids)
    with pytest.raises(DataError):
        train(table, unlabeled, scheme, CONFIG)

    other = MetaClassScheme((0, 1, 2), (2, 2), ((0, 1, 1), (1, 0, 0)), ((0,), (1,)))
    with pytest.raises(ConfigurationError):
        train(table, split, other, CONFIG)


def test_save_trace(tmp_path):
    """
    Test that the trace file has a header and one line per step.
    """
    table, split, scheme = _data()
    result = train(table, split, scheme, CONFIG)
    path = tmp_path / "trace.csv"
    save_trace(result.trace, str(path))

    lines = path.read_text().splitlines()
    assert lines[0] == "step,meta,sim,cons,total"
    assert len(lines) == 6
    assert pandas.read_csv(path)["step"].tolist() == [1, 2, 3, 4, 5]


@pytest.mark.slow
def test_loss_decreases():
    """
    Test that the moving average of the total loss is lower at the end of a full run than at its start.
    """
    table = generate_synthetic(10, 64, 100, 10.0, 1.0, seed=0)
    split = make_open_set_split(table, 0.75, 0.5, seed=0)
    classes = tuple(sorted(split.seen_classes))
    assignment = tuple(tuple((rank >> bit) & 1 for rank in range(len(classes))) for bit in range(3))
    scheme = MetaClassScheme(classes, (2, 2, 2), assignment, ((0,), (1,), (2,)))
    result = train(table, split, scheme, TrainConfig(hidden=64, subvector_dim=4))

    window = result.trace["total"].rolling(100).mean().dropna()
    assert window.iloc[-1] < window.iloc[0]

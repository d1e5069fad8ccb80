"""
Verify the analytic gradients against central finite differences.
"""
from typing import Callable
import numpy as np
import pytest
from cembed.embedding import Hyperparams, Model, PredictionHead
from cembed.objectives import meta_loss, sim_loss, cons_loss, make_batch, total_loss, select_all_positives
from cembed.objectives import stop_gradient_targets
from cembed.scheme import MetaClassScheme

STEP = 1e-5
SCHEME = MetaClassScheme((0, 1, 2), (2, 2, 2), ((0, 1, 1), (0, 1, 0), (1, 0, 0)), ((0,), (1,), (2,)))
WEIGHTS = [(1.0, 1.0), (0.0, 0.0), (2.0, 0.0), (0.0, 2.0)]


def _numeric(f: Callable[[], float], array: np.ndarray) -> np.ndarray:
    """
    Central differences of f with respect to every coordinate of an array, perturbed in place.
    """
    values = []
    for index in range(array.size):
        original = array.flat[index]
        array.flat[index] = original + STEP
        plus = f()
        array.flat[index] = original - STEP
        minus = f()
        array.flat[index] = original
        values.append((plus - minus) / (2 * STEP))
    return np.array(values)


def _check(f: Callable[[], float], array: np.ndarray, grad: np.ndarray):
    analytic = grad.ravel()
    numeric = _numeric(f, array)
    error = np.linalg.norm(analytic - numeric)
    assert error <= 1e-4 * max(np.linalg.norm(analytic), np.linalg.norm(numeric)) + 1e-8


@pytest.mark.parametrize("seed", range(20))
def test_total_gradient(seed):
    """
    Test the gradient of every parameter on small random instances, with the positives and the consistency targets
    held at their values for the unperturbed parameters.
    """
    rng = np.random.default_rng(seed)
    alpha, beta = WEIGHTS[seed % len(WEIGHTS)]
    hyper = Hyperparams(scale=5.0, temperature=0.5, threshold=0.5, alpha=alpha, beta=beta)
    model = Model.initialise(4, 8, 4, [2, 2, 2], hyper, rng)
    batch = make_batch(rng.standard_normal((8, 4)), rng.standard_normal((8, 4)), [0, 1, 2, 0, -1, -1, -1, -1],
                       SCHEME)

    positives = select_all_positives(model.embed(batch.view1), hyper.threshold, batch.labels)
    targets = stop_gradient_targets(batch, model)
    result = total_loss(batch, model, SCHEME, positives, targets)

    def f() -> float:
        return total_loss(batch, model, SCHEME, positives, targets).total

    for name, value in model.parameters.items():
        _check(f, value, result.grads[name])


def test_default_targets_are_constant():
    """
    Test that the consistency targets built within the objective get the same gradients as frozen ones.
    """
    rng = np.random.default_rng(21)
    model = Model.initialise(4, 8, 4, [2, 2, 2], Hyperparams(), rng)
    batch = make_batch(rng.standard_normal((8, 4)), rng.standard_normal((8, 4)), [0, 1, 2, 0, -1, -1, -1, -1],
                       SCHEME)
    positives = select_all_positives(model.embed(batch.view1), 0.8, batch.labels)

    built = total_loss(batch, model, SCHEME, positives)
    frozen = total_loss(batch, model, SCHEME, positives, stop_gradient_targets(batch, model))
    for name, grad in built.grads.items():
        assert np.allclose(grad, frozen.grads[name])


def test_meta_loss_gradient():
    """
    Test the subvector and prototype gradients of the meta-classification loss.
    """
    rng = np.random.default_rng(22)
    slices = [rng.standard_normal((5, 3)) for _ in range(2)]
    thetas = [rng.standard_normal((3, 4)), rng.standard_normal((3, 2))]
    labels = np.stack([rng.integers(0, 4, 5), rng.integers(0, 2, 5)], axis=1)
    _, grad_slices, grad_thetas = meta_loss(slices, labels, thetas, 0.3)

    def f() -> float:
        return meta_loss(slices, labels, thetas, 0.3)[0]

    for array, grad in zip(slices + thetas, grad_slices + grad_thetas):
        _check(f, array, grad)


def test_sim_loss_gradient():
    """
    Test the anchor and embedding gradients of the similarity loss.
    """
    rng = np.random.default_rng(23)
    z = rng.standard_normal((6, 4))
    embeddings = rng.standard_normal((6, 4))
    positives = [np.array([1, 2]), np.array([0]), np.array([], dtype=int), np.array([5]), np.array([3]),
                 np.array([0, 1, 3])]
    _, grad_z, grad_embeddings = sim_loss(z, embeddings, positives)

    def f() -> float:
        return sim_loss(z, embeddings, positives)[0]

    _check(f, z, grad_z)
    _check(f, embeddings, grad_embeddings)


def test_cons_loss_gradient():
    """
    Test the view, prototype and head gradients of the consistency loss towards a fixed target.
    """
    rng = np.random.default_rng(24)
    z = rng.standard_normal((5, 6))
    thetas = [rng.standard_normal((3, 2)), rng.standard_normal((3, 3))]
    head = PredictionHead.initialise(6, 6, 6, rng)
    target = rng.standard_normal((5, 6))
    _, grads = cons_loss(z, z, thetas, 4.0, head, target)

    def f() -> float:
        return cons_loss(z, z, thetas, 4.0, head, target)[0]

    _check(f, z, grads["z"])
    for theta, grad in zip(thetas, grads["thetas"]):
        _check(f, theta, grad)
    for name, value in head.params.items():
        _check(f, value, grads["head"][name])

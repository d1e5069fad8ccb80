"""
Weighted total objective and the gradients of every model parameter.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple
import numpy as np
from numpy import ndarray
from .batch import Batch
from .losses import meta_loss, sim_loss, consistency
from .positives import select_all_positives
from ..embedding import Model, comb_embed, comb_embed_backward, split_subvectors
from ..exceptions import ConfigurationError
from ..scheme import MetaClassScheme


def weighted_total(meta: float, sim: float, cons: float, alpha: float, beta: float) -> float:
    """
    Combine the three loss terms, `meta + alpha * sim + beta * cons`.
    """
    return meta + alpha * sim + beta * cons


@dataclass
class LossBreakdown:
    """
    Values of the three loss terms and their weighted total, with the total's gradient of every parameter (keyed like
    `Model.parameters`).
    """

    meta: float
    sim: float
    cons: float
    total: float
    grads: Dict[str, ndarray] = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        """
        Check that the losses and all gradients are finite.
        """
        values = np.array([self.meta, self.sim, self.cons, self.total])
        return bool(np.isfinite(values).all() and all(np.isfinite(grad).all() for grad in self.grads.values()))


def _check_consistent(batch: Batch, model: Model, scheme: MetaClassScheme):
    if model.num_sets != scheme.num_sets or tuple(model.sizes) != tuple(scheme.sizes):
        raise ConfigurationError(f"Model meta-class sets {model.sizes} don't match the scheme's {list(scheme.sizes)}")
    if batch.view1.shape[1] != model.encoder.in_dim:
        raise ConfigurationError(f"Batch features of dimension {batch.view1.shape[1]} don't fit an encoder expecting "
                                 f"{model.encoder.in_dim}")
    batch.check(scheme)


def stop_gradient_targets(batch: Batch, model: Model) -> Tuple[ndarray, ndarray]:
    """
    Get the combinatorial embeddings of both views, which serve as the constant consistency targets.
    """
    return model.embed(batch.view1), model.embed(batch.view2)


def total_loss(batch: Batch, model: Model, scheme: MetaClassScheme, positives: Sequence[ndarray] = None,
               targets: Tuple[ndarray, ndarray] = None) -> LossBreakdown:
    """
    Evaluate the weighted total objective on a batch, with the analytic gradient of every model parameter.

        - the meta-classification loss is averaged over the labeled items of the first view
        - the similarity loss uses the first view, averaged over anchors with positives
        - the consistency loss is symmetrised over the views, each view serving once as the (constant) target

    Positives default to the thresholded combinatorial similarities of the first view (labeled items adding their
    same-class members). Both positives and consistency targets may be precomputed, in which case they are held fixed.

    `ConfigurationError` will be thrown if the model, the scheme and the batch don't fit together.
    """
    _check_consistent(batch, model, scheme)
    hyper = model.hyper
    thetas = model.thetas

    z1, cache1 = model.encoder.forward(batch.view1)
    z2, cache2 = model.encoder.forward(batch.view2)
    embeddings1 = comb_embed(z1, thetas, hyper.scale)
    embeddings2 = comb_embed(z2, thetas, hyper.scale)
    if positives is None:
        positives = select_all_positives(embeddings1, hyper.threshold, batch.labels)
    target1, target2 = (embeddings1.copy(), embeddings2.copy()) if targets is None else targets

    grad_z1 = np.zeros_like(z1)
    grad_thetas: List[ndarray] = [np.zeros_like(theta) for theta in thetas]

    meta = 0.0
    labeled = batch.labeled
    if labeled.any():
        meta, grad_slices, meta_thetas = meta_loss(split_subvectors(z1[labeled], model.num_sets),
                                                   batch.meta_labels[labeled], thetas, hyper.temperature)
        grad_z1[labeled] += np.concatenate(grad_slices, axis=1)
        grad_thetas = [grad + meta_grad for grad, meta_grad in zip(grad_thetas, meta_thetas)]

    sim, grad_sim_z, grad_sim_embeddings = sim_loss(z1, embeddings1, positives)
    grad_z1 += hyper.alpha * grad_sim_z

    predicted1, head_cache1 = model.head.forward(embeddings1)
    predicted2, head_cache2 = model.head.forward(embeddings2)
    cons1, grad_predicted1, _ = consistency(predicted1, target2)
    cons2, grad_predicted2, _ = consistency(predicted2, target1)
    cons = (cons1 + cons2) / 2

    grad_embeddings1, grad_head = model.head.backward(head_cache1, hyper.beta / 2 * grad_predicted1)
    grad_embeddings2, grad_head2 = model.head.backward(head_cache2, hyper.beta / 2 * grad_predicted2)
    grad_head = {name: grad + grad_head2[name] for name, grad in grad_head.items()}
    grad_embeddings1 += hyper.alpha * grad_sim_embeddings

    grad_embedded_z1, comb_thetas1 = comb_embed_backward(z1, thetas, hyper.scale, grad_embeddings1)
    grad_z2, comb_thetas2 = comb_embed_backward(z2, thetas, hyper.scale, grad_embeddings2)
    grad_z1 += grad_embedded_z1
    grad_thetas = [grad + first + second for grad, first, second in zip(grad_thetas, comb_thetas1, comb_thetas2)]

    _, grad_encoder = model.encoder.backward(cache1, grad_z1)
    _, grad_encoder2 = model.encoder.backward(cache2, grad_z2)

    grads = {f"encoder.{name}": grad + grad_encoder2[name] for name, grad in grad_encoder.items()}
    grads.update({f"theta.{index}": grad for index, grad in enumerate(grad_thetas)})
    grads.update({f"head.{name}": grad for name, grad in grad_head.items()})

    total = weighted_total(meta, sim, cons, hyper.alpha, hyper.beta)
    return LossBreakdown(meta, sim, cons, total, grads)

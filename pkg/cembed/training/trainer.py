"""
Training loop - mixed labeled and unlabeled mini-batches, two augmented views, total loss and AdamW updates.
"""
from dataclasses import dataclass
import numpy as np
import pandas
from .augment import augment
from .optimizer import AdamW
from ..config import TrainConfig
from ..constants.data import UNLABELED, TABLE_FLOAT_FORMAT
from ..constants.training import TRACE_COLUMNS
from ..data import FeatureTable, OpenSetSplit
from ..embedding import Model
from ..enums import PositiveMode
from ..exceptions import ConfigurationError, DataError, FormatError, NumericError
from ..objectives import make_batch, total_loss, cluster_positives
from ..scheme import MetaClassScheme
from ..utils import logger, as_seed


@dataclass(frozen=True, eq=False)
class TrainingResult:
    """
    Trained model and the loss trace, one row per step with the columns `step, meta, sim, cons, total`.
    """

    model: Model
    trace: pandas.DataFrame


def train(table: FeatureTable, split: OpenSetSplit, scheme: MetaClassScheme, config: TrainConfig) -> TrainingResult:
    """
    Train a model over the split's labeled and unlabeled records.

    Every step samples (with replacement) `batch_labeled` labeled and `batch_unlabeled` unlabeled records, makes two
    augmented views of each, evaluates the total loss and applies one AdamW update, after which the prototypes are
    renormalised. Initialisation, sampling and augmentation draw from separate streams of the configured seed, so the
    same inputs always give the same model.

    `DataError` will be thrown without labeled records, `ConfigurationError` if the scheme wasn't built over the split's
    seen classes and `NumericError` as soon as a loss or a gradient isn't finite.
    """
    if not split.labeled_ids:
        raise DataError("Training requires labeled records")
    if tuple(scheme.classes) != tuple(sorted(split.seen_classes)):
        raise ConfigurationError(f"Scheme classes {list(scheme.classes)} aren't the split's seen classes "
                                 f"{sorted(split.seen_classes)}")

    labeled = table.subset(sorted(split.labeled_ids))
    unlabeled = table.subset(sorted(split.unlabeled_ids))
    batch_unlabeled = config.batch_unlabeled if len(unlabeled) else 0
    if config.batch_unlabeled and not batch_unlabeled:
        logger.warning("The split has no unlabeled records, batches will be labeled only")

    clusters = config.positive_clusters or len(split.seen_classes | split.novel_classes)
    init_rng, sample_rng, aug_rng = (np.random.default_rng(sequence)
                                     for sequence in np.random.SeedSequence(config.seed).spawn(3))

    model = Model.initialise(table.dim, config.hidden, config.subvector_dim, scheme.sizes, config.hyperparams,
                             init_rng)
    optimizer = AdamW(model.parameters, config.learning_rate, config.weight_decay)
    logger.info(f"Training for {config.steps} steps on {len(labeled)} labeled and {len(unlabeled)} unlabeled records, "
                f"M={model.num_sets}, K={model.sizes}, d2={model.subvector_dim}")

    rows = []
    for step in range(1, config.steps + 1):
        labeled_rows = sample_rng.integers(0, len(labeled), size=config.batch_labeled)
        unlabeled_rows = sample_rng.integers(0, max(len(unlabeled), 1), size=batch_unlabeled)
        features = np.vstack([labeled.features[labeled_rows], unlabeled.features[unlabeled_rows]]).astype(np.float64)
        labels = np.concatenate([labeled.labels[labeled_rows], np.full(batch_unlabeled, UNLABELED, dtype=np.int64)])

        view1 = augment(features, aug_rng, config.aug_sigma, config.aug_dropout)
        view2 = augment(features, aug_rng, config.aug_sigma, config.aug_dropout)
        batch = make_batch(view1, view2, labels, scheme)

        positives = None
        if config.positive_mode == PositiveMode.KMEANS:
            positives = cluster_positives(model.embed(batch.view1), clusters, as_seed(config.seed, step), batch.labels)

        breakdown = total_loss(batch, model, scheme, positives)
        if not breakdown.finite:
            raise NumericError(f"Non-finite loss or gradient at step {step}")

        optimizer.step(breakdown.grads)
        model.normalise_prototypes()
        rows.append((step, breakdown.meta, breakdown.sim, breakdown.cons, breakdown.total))

        if step % config.log_every == 0:
            logger.info(f"Step {step}: meta={breakdown.meta:.4f}, sim={breakdown.sim:.4f}, cons={breakdown.cons:.4f}, "
                        f"total={breakdown.total:.4f}")

    trace = pandas.DataFrame(rows, columns=list(TRACE_COLUMNS))
    trace["step"] = trace["step"].astype(np.int64)
    return TrainingResult(model, trace)


def save_trace(trace: pandas.DataFrame, path: str):
    """
    Save the loss trace as text, with a `step,meta,sim,cons,total` header and one line per step.
    """
    try:
        trace.to_csv(path, index=False, float_format=TABLE_FLOAT_FORMAT)
    except OSError as ex:
        raise FormatError(f"Failed to write loss trace {path} - {ex}") from ex

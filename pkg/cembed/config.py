"""
Pipeline configuration - flat `key = value` files, `key=value` overrides and typed sections.

Every key is unique across the sections, so a single flat namespace addresses all of them. The `seed` key is shared by
every stage.
"""
import os
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Dict, Optional, Sequence
import dotenv
from .constants.data import DEFAULT_N_CLASSES, DEFAULT_DIM, DEFAULT_N_PER_CLASS, DEFAULT_SEPARATION
from .constants.data import DEFAULT_NOISE_SIGMA, DEFAULT_SEEN_FRACTION, DEFAULT_LABELED_FRACTION
from .constants.embedding import DEFAULT_HIDDEN, DEFAULT_SUBVECTOR_DIM, DEFAULT_SCALE, DEFAULT_TEMPERATURE
from .constants.embedding import DEFAULT_THRESHOLD, DEFAULT_ALPHA, DEFAULT_BETA
from .constants.retrieval import DEFAULT_NUM_QUERIES
from .constants.scheme import DEFAULT_NUM_SETS, DEFAULT_META_CLASSES, DEFAULT_SUBSPACE_DIM
from .constants.training import DEFAULT_LEARNING_RATE, DEFAULT_WEIGHT_DECAY, DEFAULT_STEPS, DEFAULT_BATCH_LABELED
from .constants.training import DEFAULT_BATCH_UNLABELED, DEFAULT_AUG_SIGMA, DEFAULT_AUG_DROPOUT, DEFAULT_LOG_EVERY
from .embedding import Hyperparams
from .enums import EmbeddingMode, PositiveMode, Representation
from .exceptions import ConfigurationError, FormatError, ParameterError
from .utils import logger

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class DataConfig:
    """
    Synthetic data generation and open-set split settings.
    """

    n_classes: int = DEFAULT_N_CLASSES
    dim: int = DEFAULT_DIM
    n_per_class: int = DEFAULT_N_PER_CLASS
    separation: float = DEFAULT_SEPARATION
    noise_sigma: float = DEFAULT_NOISE_SIGMA
    class_permutation: bool = False
    seen_fraction: float = DEFAULT_SEEN_FRACTION
    labeled_fraction: float = DEFAULT_LABELED_FRACTION


@dataclass(frozen=True)
class SchemeConfig:
    """
    Meta-class scheme settings, a subspace dimension of 0 meaning ceil(d1 / 4).
    """

    num_sets: int = DEFAULT_NUM_SETS
    meta_classes: int = DEFAULT_META_CLASSES
    subspace_dim: int = DEFAULT_SUBSPACE_DIM
    embedding_mode: EmbeddingMode = EmbeddingMode.CLASSIFIER_WEIGHTS


@dataclass(frozen=True)
class TrainConfig:
    """
    Training loop settings, together with the model architecture and the objective's hyperparameters.

    A positive cluster count of 0 lets the k-means positive mode use the total number of classes of the split.
    """

    learning_rate: float = DEFAULT_LEARNING_RATE
    weight_decay: float = DEFAULT_WEIGHT_DECAY
    steps: int = DEFAULT_STEPS
    batch_labeled: int = DEFAULT_BATCH_LABELED
    batch_unlabeled: int = DEFAULT_BATCH_UNLABELED
    aug_sigma: float = DEFAULT_AUG_SIGMA
    aug_dropout: float = DEFAULT_AUG_DROPOUT
    seed: int = 0
    scale: float = DEFAULT_SCALE
    temperature: float = DEFAULT_TEMPERATURE
    threshold: float = DEFAULT_THRESHOLD
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    hidden: int = DEFAULT_HIDDEN
    subvector_dim: int = DEFAULT_SUBVECTOR_DIM
    positive_mode: PositiveMode = PositiveMode.COMBINATORIAL
    positive_clusters: int = 0
    log_every: int = DEFAULT_LOG_EVERY

    def __post_init__(self):
        if self.batch_labeled < 1 or self.batch_unlabeled < 0:
            raise ParameterError(f"Need at least one labeled item per batch and no negative counts, got "
                                 f"{self.batch_labeled} and {self.batch_unlabeled}")
        if not 0 <= self.aug_dropout < 1 or self.aug_sigma < 0:
            raise ParameterError(f"Augmentation needs dropout in [0, 1) and a non-negative sigma, got "
                                 f"{self.aug_dropout} and {self.aug_sigma}")
        if self.steps < 0 or self.learning_rate <= 0 or self.weight_decay < 0:
            raise ParameterError("Steps and weight decay must be non-negative, the learning rate positive")
        if self.hidden < 1 or self.subvector_dim < 1 or self.positive_clusters < 0 or self.log_every < 1:
            raise ParameterError("Hidden width, subvector dimension and logging interval must be positive")
        # Raises for invalid hyperparameters
        self.hyperparams

    @property
    def hyperparams(self) -> Hyperparams:
        """
        Get the model's hyperparameters.
        """
        return Hyperparams(self.scale, self.temperature, self.threshold, self.alpha, self.beta)


@dataclass(frozen=True)
class EvalConfig:
    """
    Evaluation settings.
    """

    num_queries: int = DEFAULT_NUM_QUERIES
    representation: Representation = Representation.COMBINATORIAL


@dataclass(frozen=True)
class Config:
    """
    All sections of the pipeline configuration, sharing one seed.
    """

    seed: int = 0
    data: DataConfig = field(default_factory=DataConfig)
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)


_SECTIONS = {"data": DataConfig, "scheme": SchemeConfig, "train": TrainConfig, "eval": EvalConfig}


def _convert(key: str, value: str, kind: type):
    """
    Convert a textual value to the type of its field.
    """
    value = value.strip()
    try:
        if kind is bool:
            if value.lower() not in _TRUE | _FALSE:
                raise ValueError(f"expected one of {sorted(_TRUE | _FALSE)}")
            return value.lower() in _TRUE
        if issubclass(kind, Enum):
            return kind(value.lower())
        return kind(value)
    except ValueError as ex:
        raise ConfigurationError(f"Invalid value '{value}' of '{key}' - {ex}") from ex


def parse_overrides(overrides: Sequence[str]) -> Dict[str, str]:
    """
    Parse `key=value` overrides, later ones winning.
    """
    values = {}
    for override in overrides:
        key, separator, value = override.partition("=")
        if not separator or not key.strip():
            raise ConfigurationError(f"Override '{override}' must have the form key=value")
        values[key.strip()] = value.strip()
    return values


def make_config(values: Dict[str, str]) -> Config:
    """
    Build the configuration from flat key-value pairs, every missing key taking its default.

    `ConfigurationError` will be thrown for unknown keys and invalid values.
    """
    values = dict(values)
    seed = _convert("seed", values.pop("seed"), int) if "seed" in values else 0
    if seed < 0:
        raise ConfigurationError(f"Invalid value '{seed}' of 'seed' - expected a non-negative integer")

    sections = {}
    for name, section in _SECTIONS.items():
        kwargs = {item.name: _convert(item.name, values.pop(item.name), item.type)
                  for item in fields(section) if item.name in values}
        if "seed" in {item.name for item in fields(section)}:
            kwargs["seed"] = seed
        try:
            sections[name] = section(**kwargs)
        except ParameterError as ex:
            raise ConfigurationError(f"Invalid {name} configuration - {ex}") from ex

    if values:
        raise ConfigurationError(f"Unknown configuration keys {sorted(values)}")
    return Config(seed, **sections)


def load_config(path: Optional[str] = None, overrides: Sequence[str] = (), seed: Optional[int] = None) -> Config:
    """
    Load the configuration file (if any), apply the `key=value` overrides and finally the seed override.

    `FormatError` will be thrown for a missing configuration file.
    """
    values = {}
    if path is not None:
        if not os.path.isfile(path):
            raise FormatError(f"Configuration file {path} doesn't exist")
        values = {key: value for key, value in dotenv.dotenv_values(path).items() if value is not None}
        logger.debug(f"Read {len(values)} configuration values from {path}")

    values.update(parse_overrides(overrides))
    if seed is not None:
        values["seed"] = str(seed)
    return make_config(values)


"""
Open-set splits - seen and novel classes, labeled and unlabeled records.
"""
import json
import math
from dataclasses import dataclass
from typing import FrozenSet
import numpy as np
from .table import FeatureTable
from ..constants.data import UNLABELED
from ..exceptions import DataError, FormatError, ParameterError
from ..utils import logger


@dataclass(frozen=True)
class OpenSetSplit:
    """
    Partition of a table's classes into seen and novel ones, and of its records into labeled and unlabeled ones.

    Every labeled record belongs to a seen class, and every record of a novel class is unlabeled.
    """

    seen_classes: FrozenSet[int]
    novel_classes: FrozenSet[int]
    labeled_ids: FrozenSet[int]
    unlabeled_ids: FrozenSet[int]

    def __post_init__(self):
        if self.seen_classes & self.novel_classes:
            raise DataError("Seen and novel classes must be disjoint")
        if self.labeled_ids & self.unlabeled_ids:
            raise DataError("Labeled and unlabeled records must be disjoint")

    def to_dict(self) -> dict:
        """
        Get a JSON-ready representation with sorted lists.
        """
        return {
            "seen_classes": sorted(self.seen_classes),
            "novel_classes": sorted(self.novel_classes),
            "labeled_ids": sorted(self.labeled_ids),
            "unlabeled_ids": sorted(self.unlabeled_ids),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OpenSetSplit":
        """
        Build a split from its JSON representation.
        """
        return cls(
            seen_classes=frozenset(int(value) for value in data["seen_classes"]),
            novel_classes=frozenset(int(value) for value in data["novel_classes"]),
            labeled_ids=frozenset(int(value) for value in data["labeled_ids"]),
            unlabeled_ids=frozenset(int(value) for value in data["unlabeled_ids"]),
        )


def _floor(fraction: float, count: int) -> int:
    """
    Floor of fraction * count, robust to products such as 0.29 * 100 = 28.999999999999996.
    """
    return math.floor(round(fraction * count, 9))


def make_open_set_split(table: FeatureTable, seen_fraction: float, labeled_fraction: float,
                        seed: int) -> OpenSetSplit:
    """
    Split a fully labeled table into an open-set problem.

    The lowest floor(seen_fraction * K) class indices become seen. Within each seen class, floor(labeled_fraction * n_c)
    records are chosen to be labeled (seeded), every other record is unlabeled.

    `DataError` will be thrown if the table has unlabeled records.
    """
    if not 0 < seen_fraction < 1:
        raise ParameterError(f"Seen fraction must be in (0, 1), got {seen_fraction}")
    if not 0 < labeled_fraction <= 1:
        raise ParameterError(f"Labeled fraction must be in (0, 1], got {labeled_fraction}")
    if not table.labeled.all():
        raise DataError("Open-set splits require a fully labeled table")

    classes = table.classes
    n_seen = _floor(seen_fraction, classes.size)
    if n_seen < 1:
        raise ParameterError(f"Seen fraction {seen_fraction} leaves no seen class out of {classes.size}")

    seen = classes[:n_seen]
    rng = np.random.default_rng(seed)
    labeled = []
    for class_index in seen:
        members = table.ids[table.labels == class_index]
        chosen = rng.choice(members.size, size=_floor(labeled_fraction, members.size), replace=False)
        labeled.extend(int(record_id) for record_id in members[np.sort(chosen)])

    labeled_ids = frozenset(labeled)
    split = OpenSetSplit(
        seen_classes=frozenset(int(value) for value in seen),
        novel_classes=frozenset(int(value) for value in classes[n_seen:]),
        labeled_ids=labeled_ids,
        unlabeled_ids=frozenset(int(record_id) for record_id in table.ids if int(record_id) not in labeled_ids),
    )

    logger.info(f"Split {classes.size} classes into {len(split.seen_classes)} seen and {len(split.novel_classes)} "
                f"novel, with {len(split.labeled_ids)} labeled and {len(split.unlabeled_ids)} unlabeled records")
    return split


def permute_classes(table: FeatureTable, seed: int) -> FeatureTable:
    """
    Relabel the classes of a table with a seeded permutation, leaving unlabeled records unlabeled.

    Splitting a permuted table picks a different set of seen classes, which is how multiple class splits are drawn.
    """
    classes = table.classes
    permuted = np.random.default_rng(seed).permutation(classes)
    mapping = dict(zip(classes.tolist(), permuted.tolist()))
    labels = np.array([mapping.get(int(label), UNLABELED) for label in table.labels], dtype=np.int64)
    return FeatureTable(table.ids, labels, table.features)


def save_split(split: OpenSetSplit, path: str):
    """
    Save a split as a JSON object of sorted lists.
    """
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(split.to_dict(), f, indent=2)
            f.write("\n")
    except OSError as ex:
        raise FormatError(f"Failed to write split {path} - {ex}") from ex


def load_split(path: str) -> OpenSetSplit:
    """
    Load a split saved by `save_split`.
    """
    try:
        with open(path, encoding="utf-8") as f:
            return OpenSetSplit.from_dict(json.load(f))
    except OSError as ex:
        raise FormatError(f"Failed to read split {path} - {ex}") from ex
    except (ValueError, KeyError, TypeError) as ex:
        raise FormatError(f"Malformed split file {path} - {ex}") from ex

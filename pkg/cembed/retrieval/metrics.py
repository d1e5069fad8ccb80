"""
Retrieval quality - average precision over the full ranking and its mean over novel-class queries.
"""
from typing import Callable, Dict, Sequence
import numpy as np
from numpy import ndarray
from .codes import CodeIndex
from .search import search
from ..data import FeatureTable, OpenSetSplit
from ..embedding import Model
from ..exceptions import ParameterError
from ..utils import logger


def average_precision(relevances: Sequence[bool]) -> float:
    """
    Average precision of a ranked relevance list, the mean over relevant ranks r of the precision at r (0 when no
    item is relevant).
    """
    relevances = np.asarray(relevances, dtype=bool)
    if not relevances.any():
        return 0.0
    ranks = np.flatnonzero(relevances) + 1
    hits = np.arange(1, ranks.size + 1)
    return float(np.mean(hits / ranks))


def _same_class(label: int, labels: ndarray) -> ndarray:
    return labels == label


def mean_average_precision(queries: ndarray, query_labels: ndarray, index: CodeIndex, query_ids: ndarray = None,
                           relevance: Callable[[int, ndarray], ndarray] = None) -> float:
    """
    Mean over the queries of the average precision of the full asymmetric ranking of the database.

    By default an item is relevant when its label is the query's. A query found in the database (same id) is left out
    of its own ranking.

    `ParameterError` will be thrown without queries.
    """
    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    query_labels = np.asarray(query_labels, dtype=np.int64)
    if not query_labels.size:
        raise ParameterError("Mean average precision needs at least one query")
    relevance = relevance or _same_class

    labels_by_id = dict(zip(index.ids.tolist(), index.labels.tolist()))
    precisions, unmatched = [], 0
    for row, (query, label) in enumerate(zip(queries, query_labels.tolist())):
        ranked, _ = search(query, index)
        if query_ids is not None:
            ranked = ranked[ranked != query_ids[row]]
        ranked_labels = np.array([labels_by_id[item] for item in ranked.tolist()], dtype=np.int64)
        relevances = relevance(label, ranked_labels)
        unmatched += not relevances.any()
        precisions.append(average_precision(relevances))

    if unmatched:
        logger.warning(f"{unmatched} of {len(precisions)} queries have no relevant item in the database")
    return float(np.mean(precisions))


def sample_queries(table: FeatureTable, split: OpenSetSplit, num_queries: int, seed: int) -> ndarray:
    """
    Sample (without replacement, seeded) up to `num_queries` ids of unlabeled novel-class records, in ascending order.
    """
    candidates = np.array(sorted(split.unlabeled_ids), dtype=np.int64)
    if candidates.size:
        candidates = candidates[np.isin(table.subset(candidates).labels, sorted(split.novel_classes))]
    if not candidates.size or num_queries < 1:
        raise ParameterError("Retrieval evaluation needs at least one unlabeled novel-class query")
    count = min(num_queries, candidates.size)
    return np.sort(np.random.default_rng(seed).choice(candidates, size=count, replace=False))


def evaluate_retrieval(model: Model, index: CodeIndex, table: FeatureTable, split: OpenSetSplit, num_queries: int,
                       seed: int) -> Dict[str, object]:
    """
    Score novel-class queries, encoded with the model's raw encoder, against the code index.

    Returns a dictionary with the `map`, the `num_queries` and the `bits` per code.
    """
    query_ids = sample_queries(table, split, num_queries, seed)
    queries = table.subset(query_ids)
    result = mean_average_precision(model.encode(queries.features), queries.labels, index, query_ids)
    logger.info(f"Retrieval mAP over {query_ids.size} novel-class queries: {result:.4f} at {index.bits} bits")
    return {"map": result, "num_queries": int(query_ids.size), "bits": index.bits}

"""
Compact codes, asymmetric search and retrieval metrics.
"""
from .codes import CodeIndex, pack_codes, unpack_codes, code_bytes, encode_item, encode_items, save_codes, load_codes
from .search import asymmetric_distance, distance_table, search
from .metrics import average_precision, mean_average_precision, sample_queries, evaluate_retrieval

__all__ = [
    "CodeIndex",
    "pack_codes",
    "unpack_codes",
    "code_bytes",
    "encode_item",
    "encode_items",
    "save_codes",
    "load_codes",
    "asymmetric_distance",
    "distance_table",
    "search",
    "average_precision",
    "mean_average_precision",
    "sample_queries",
    "evaluate_retrieval",
]

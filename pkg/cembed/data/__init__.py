"""
Feature tables, synthetic data and open-set splits.
"""
from .table import FeatureTable, load_feature_table, save_feature_table
from .synthetic import generate_synthetic, generated_means
from .split import OpenSetSplit, make_open_set_split, permute_classes, save_split, load_split

__all__ = [
    "FeatureTable",
    "load_feature_table",
    "save_feature_table",
    "generate_synthetic",
    "generated_means",
    "OpenSetSplit",
    "make_open_set_split",
    "permute_classes",
    "save_split",
    "load_split",
]

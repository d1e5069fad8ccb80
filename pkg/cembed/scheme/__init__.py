"""
Class embeddings and the meta-class schemes built from them.
"""
from .embeddings import ClassEmbeddingMatrix, class_embeddings
from .meta_scheme import MetaClassScheme, build_scheme, meta_label, meta_labels, set_bits, code_bits
from .meta_scheme import save_scheme, load_scheme

__all__ = [
    "ClassEmbeddingMatrix",
    "class_embeddings",
    "MetaClassScheme",
    "build_scheme",
    "meta_label",
    "meta_labels",
    "set_bits",
    "code_bits",
    "save_scheme",
    "load_scheme",
]

"""
Hierarchy of all exceptions within the application.
"""


class CembedException(Exception):
    """
    Base exception for all errors in this application.
    """


class ParameterError(CembedException):
    """
    Invalid counts, fractions, ranges or other call arguments.
    """


class ConfigurationError(CembedException):
    """
    Invalid configuration keys or values, and models/schemes/indices that do not fit together.
    """


class DataError(CembedException):
    """
    Data violating a precondition, e.g. unlabeled records where a fully labeled table is required.
    """


class FormatError(CembedException):
    """
    Malformed feature table, scheme, model, split or code files.

    The `location` (line number or byte offset, if known) is kept to point the user at the offending part of the file.
    """

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{message} ({location})" if location else message)
        self.location = location


class ShapeError(CembedException):
    """
    Vector or matrix dimensions that do not match the model.
    """


class NormalizationError(CembedException):
    """
    Attempt to normalise a vector of (near) zero length.
    """


class LabelError(CembedException):
    """
    Meta-class labels outside of the valid range of a meta-class set.
    """


class UnknownClassError(CembedException, KeyError):
    """
    Lookup of a base class that the meta-class scheme was not built over.
    """


class SchemeConstructionError(CembedException):
    """
    Meta-class scheme could not be built (e.g. k-means kept producing empty meta-classes).
    """


class CodeError(CembedException):
    """
    Compact code indices outside of the codebook, or codebooks that do not match the codes.
    """


class NumericError(CembedException):
    """
    Non-finite losses or gradients.
    """

"""
Enumerations.
"""
from enum import Enum


class EmbeddingMode(Enum):
    """
    Source of the class embeddings used to build the meta-class scheme.

        - Classifier weights, i.e. the rows of a normalised softmax classifier trained on the labeled data
        - Class means, the mean encoded vector of each seen class

    """

    CLASSIFIER_WEIGHTS = "classifier_weights"
    CLASS_MEANS = "class_means"


class PositiveMode(Enum):
    """
    Strategy of estimating positive pairs for the similarity loss.

        - Combinatorial thresholds the cosine similarity of the combinatorial embeddings
        - K-means groups the batch's combinatorial embeddings into a known number of clusters

    """

    COMBINATORIAL = "combinatorial"
    KMEANS = "kmeans"


class Representation(Enum):
    """
    Vectors handed to the clustering evaluation.
    """

    COMBINATORIAL = "combinatorial"
    ENCODER = "encoder"


class Scope(Enum):
    """
    Subsets of the test items the open-set metrics are reported for.
    """

    SEEN = "seen"
    UNSEEN = "unseen"
    TOTAL = "total"


class ExitCode(Enum):
    """
    Process exit codes of the command-line interface.
    """

    SUCCESS = 0
    USAGE = 2
    FILE = 3
    NUMERIC = 4

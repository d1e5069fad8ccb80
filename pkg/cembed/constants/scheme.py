"""
Meta-class scheme constants.
"""

# Scheme defaults - subspace dimension 0 means ceil(d1 / SUBSPACE_DIVISOR)
DEFAULT_NUM_SETS = 6
DEFAULT_META_CLASSES = 4
DEFAULT_SUBSPACE_DIM = 0
SUBSPACE_DIVISOR = 4

# K-means over the class embeddings
KMEANS_MAX_ITER = 100
KMEANS_TOLERANCE = 1e-6
KMEANS_RESTARTS = 10
MAX_ATTEMPTS = 32

# Normalised softmax classifier behind the classifier weights embeddings
CLASSIFIER_C = 10.0
CLASSIFIER_MAX_ITER = 1000

"""
Dataset constants.
"""

# Label marking an unlabeled record, in memory and in files
UNLABELED = -1

# Binary feature table layout
TABLE_MAGIC = b"CEFT"
TABLE_BINARY_EXTENSION = ".ceft"

# Text feature table layout - 9 significant digits always round trip a 32-bit float
TABLE_ID_COLUMN = "id"
TABLE_LABEL_COLUMN = "label"
TABLE_FEATURE_PREFIX = "f"
TABLE_FLOAT_FORMAT = "%.9g"

# Synthetic data defaults
DEFAULT_N_CLASSES = 10
DEFAULT_DIM = 64
DEFAULT_N_PER_CLASS = 100
DEFAULT_SEPARATION = 10.0
DEFAULT_NOISE_SIGMA = 1.0

# Class means repulsion - pairs are pushed slightly past the separation to absorb rounding
REPULSION_MAX_ITERATIONS = 10000
REPULSION_MARGIN = 1.001

# Open-set split defaults
DEFAULT_SEEN_FRACTION = 0.75
DEFAULT_LABELED_FRACTION = 0.5

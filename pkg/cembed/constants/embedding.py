"""
Model constants.
"""

# Binary model layout
MODEL_MAGIC = b"CEMB"

# Architecture defaults
DEFAULT_HIDDEN = 128
DEFAULT_SUBVECTOR_DIM = 12

# Hyperparameter defaults
DEFAULT_SCALE = 10.0
DEFAULT_TEMPERATURE = 0.1
DEFAULT_THRESHOLD = 0.8
DEFAULT_ALPHA = 1.0
DEFAULT_BETA = 1.0


# Slack on similarity thresholds, so that identical directions pass a threshold of 1 despite rounding
SIMILARITY_TOLERANCE = 1e-12

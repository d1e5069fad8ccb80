"""
Training loop constants.
"""

# Optimiser defaults - only the weight decay is fixed by the default synthetic setup
DEFAULT_LEARNING_RATE = 1e-3
DEFAULT_WEIGHT_DECAY = 1e-4
ADAM_BETA_1 = 0.9
ADAM_BETA_2 = 0.999
ADAM_EPSILON = 1e-8

# Loop defaults
DEFAULT_STEPS = 2000
DEFAULT_BATCH_LABELED = 64
DEFAULT_BATCH_UNLABELED = 64
DEFAULT_LOG_EVERY = 100

# Feature-space augmentation defaults
DEFAULT_AUG_SIGMA = 0.5
DEFAULT_AUG_DROPOUT = 0.1

# Loss trace file columns
TRACE_COLUMNS = ("step", "meta", "sim", "cons", "total")

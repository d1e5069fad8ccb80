"""
Retrieval constants.
"""

# Binary code file layout
CODES_MAGIC = b"CECD"

# Number of novel-class queries scored by the retrieval evaluation
DEFAULT_NUM_QUERIES = 100

"""
Universal helpers and the shared logger.
"""
import os
import json
import logging.config
import numpy as np
from .constants.common import LOG_CONFIG_PATH, LOG_DIR, LOGGER_NAME


def as_seed(*keys: int) -> int:
    """
    Derive a 32-bit integer seed from a sequence of integer keys.

    Used wherever a library (e.g. scikit-learn) only accepts an integer `random_state`, so that sub-streams such as
    "set 3, attempt 2" stay independent and reproducible.
    """
    return int(np.random.SeedSequence([int(key) for key in keys]).generate_state(1)[0])


# Configure logging and create a new logger instance
with open(LOG_CONFIG_PATH) as f:
    log_config = json.loads(f.read())
    handlers = log_config["handlers"]
    for handler in handlers:
        handler_config = handlers[handler]
        if "filename" in handler_config:
            handler_config["filename"] = os.path.join(LOG_DIR, handler_config["filename"])
os.makedirs(LOG_DIR, exist_ok=True)
logging.config.dictConfig(log_config)
logger = logging.getLogger(LOGGER_NAME)

# logger.py
"""
Logging setup for sharelogic.

Results go to stdout, so every handler configured here writes to stderr or a
file.
"""

import logging
import os
import sys

FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logger(debug=False, level=None, log_file=None):
    """
    Sets up the root logger.

    Args:
        debug: Force DEBUG level.
        level: Level name used when debug is off, e.g. "WARNING".
        log_file: Optional path of an additional log file.

    Returns:
        The configured root logger.
    """
    logger = logging.getLogger()
    if debug:
        log_level = logging.DEBUG
    else:
        log_level = getattr(logging, str(level or "WARNING").upper(), logging.WARNING)
    logger.setLevel(log_level)

    # Prevent duplicate handlers if this function is called multiple times
    if logger.hasHandlers():
        logger.handlers.clear()

    formatter = logging.Formatter(FORMAT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        log_dir = os.path.dirname(log_file)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir)
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(log_level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger

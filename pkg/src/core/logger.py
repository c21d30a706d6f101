import logging
import os
import sys
from datetime import datetime


def setup_logging(log_level=logging.INFO, log_to_file=False, log_to_console=True):
    """
    Configures logging for a command-line run

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_to_file: Also write a dated log file under LOGS_DIR
        log_to_console: Write log records to stderr

    Returns:
        logging.Logger: The module logger, after the first record is written
    """
    from core.paths import LOGS_DIR

    log_file_path = None
    if log_to_file:
        os.makedirs(LOGS_DIR, exist_ok=True)
        log_filename = f"nsgp_{datetime.now().strftime('%Y%m%d')}.log"
        log_file_path = os.path.join(LOGS_DIR, log_filename)

    formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    # Drop handlers left over from a previous run in the same process
    for handler in logging.root.handlers[:]:
        logging.root.removeHandler(handler)

    handlers = []

    # stdout stays clean for data, logs go to stderr
    if log_to_console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        handlers.append(console_handler)

    if log_file_path is not None:
        file_handler = logging.FileHandler(log_file_path, encoding="utf-8")
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    if not handlers:
        handlers.append(logging.NullHandler())

    logging.basicConfig(level=log_level, handlers=handlers)

    logger = logging.getLogger(__name__)
    logger.debug(f"Logging initialized - Level: {logging.getLevelName(log_level)}")
    if log_file_path is not None:
        logger.info(f"Log file: {log_file_path}")

    return logger


def get_logger(name):
    """
    Returns the named logger

    Args:
        name: Logger name (usually __name__)

    Returns:
        logging.Logger: Configured logger
    """
    return logging.getLogger(name)


def get_main_logger():
    """Command-line entry point logger"""
    return get_logger("nsgp.main")

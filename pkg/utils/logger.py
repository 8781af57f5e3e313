"""
Logger utilities for gdr
With log rotation to prevent disk space issues
"""

import logging
import sys
import time
from pathlib import Path
from logging.handlers import RotatingFileHandler

# Log directory
LOG_DIR = Path(__file__).parent.parent / "logs"

# Log settings
MAX_LOG_SIZE_MB = 5  # Max size per log file
MAX_LOG_FILES = 3    # Keep only 3 backup files (total ~20MB max)

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def setup_logger(level: int = logging.INFO, log_dir: Path = LOG_DIR, to_file: bool = True):
    """Setup logging configuration with rotation"""
    root_logger = logging.getLogger()
    root_logger.setLevel(level)

    # setup_logger may be called again by tests; replace our handlers only
    for handler in list(root_logger.handlers):
        if getattr(handler, "_gdr_handler", False):
            root_logger.removeHandler(handler)
            handler.close()

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    if to_file:
        log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_dir / "gdr.log",
            maxBytes=MAX_LOG_SIZE_MB * 1024 * 1024,
            backupCount=MAX_LOG_FILES,
            encoding="utf-8"
        )
        file_handler.setFormatter(formatter)
        file_handler._gdr_handler = True
        root_logger.addHandler(file_handler)

    # Console goes to stderr: stdout carries the run summary
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    console_handler._gdr_handler = True
    root_logger.addHandler(console_handler)

    # Reduce noise from external libraries
    logging.getLogger("matplotlib").setLevel(logging.WARNING)


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance"""
    return logging.getLogger(name)


def cleanup_old_logs(days: int = 7, log_dir: Path = LOG_DIR):
    """Remove log files older than specified days"""
    if not log_dir.exists():
        return

    cutoff = time.time() - (days * 86400)
    removed_count = 0

    for log_file in log_dir.glob("*.log*"):
        if log_file.stat().st_mtime < cutoff:
            try:
                log_file.unlink()
                removed_count += 1
            except OSError:
                pass

    if removed_count > 0:
        logger = get_logger(__name__)
        logger.info(f"Cleaned up {removed_count} old log files")

"""
Logging for corpus generation, training, mining and recognition.

Everything human-readable goes to stderr (and optionally a rotating log
file); stdout stays free for the JSON results of the CLI. Worker-pool jobs
log from several threads, so the detailed format carries the thread name.
"""

import logging
import logging.handlers
import sys
import threading
import time
from pathlib import Path
from typing import Any, Dict, Optional

ROOT_LOGGER = "idocr"

CONSOLE_FORMAT = "%(asctime)s %(levelname)-7s %(message)s"
DETAILED_FORMAT = "%(asctime)s %(levelname)-7s [%(threadName)s] %(name)s.%(funcName)s:%(lineno)d %(message)s"

LOG_FILE_MAX_BYTES = 10 * 1024 * 1024


def _console_handler(level: int, verbose: bool, debug: bool) -> logging.Handler:
    handler = logging.StreamHandler(sys.stderr)
    if debug:
        handler.setLevel(logging.DEBUG)
    elif verbose:
        handler.setLevel(min(level, logging.INFO))
    else:
        handler.setLevel(level)
    fmt = DETAILED_FORMAT if (verbose or debug) else CONSOLE_FORMAT
    handler.setFormatter(logging.Formatter(fmt, datefmt="%H:%M:%S"))
    return handler


def _file_handler(log_file: str, max_bytes: int, backups: int) -> logging.Handler:
    Path(log_file).parent.mkdir(parents=True, exist_ok=True)
    handler = logging.handlers.RotatingFileHandler(
        log_file, maxBytes=max_bytes, backupCount=backups, encoding="utf-8"
    )
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(DETAILED_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
    return handler


def setup_logger(
    name: str = ROOT_LOGGER,
    log_level: str = "INFO",
    log_file: Optional[str] = None,
    log_max_size: int = LOG_FILE_MAX_BYTES,
    log_backup_count: int = 5,
    verbose: bool = False,
    debug: bool = False,
) -> logging.Logger:
    """
    Configure the package logger; calling it again replaces the handlers.

    Args:
        name: Logger name, normally the package root
        log_level: Level name from the run configuration
        log_file: Optional rotating log file (always logs at DEBUG)
        log_max_size: Bytes per log file before rotation
        log_backup_count: Rotated files to keep
        verbose: Detailed console format
        debug: DEBUG level everywhere, overriding log_level

    Returns:
        Configured logger instance
    """
    level = logging.DEBUG if debug else getattr(logging, log_level.upper(), logging.INFO)

    logger = logging.getLogger(name)
    logger.handlers.clear()
    logger.setLevel(level)
    logger.addHandler(_console_handler(level, verbose, debug))
    if log_file:
        logger.addHandler(_file_handler(log_file, log_max_size, log_backup_count))
    logger.propagate = False
    return logger


def get_logger(name: str = ROOT_LOGGER) -> logging.Logger:
    """
    Module logger below the package root ("segment" -> "idocr.segment").

    The root logger gets a default configuration the first time anything
    asks for a logger before the CLI has set one up.
    """
    if not logging.getLogger(ROOT_LOGGER).handlers:
        setup_logger(ROOT_LOGGER)
    if name != ROOT_LOGGER and not name.startswith(ROOT_LOGGER + "."):
        name = f"{ROOT_LOGGER}.{name}"
    return logging.getLogger(name)


class ProgressLogger:
    """
    Start/progress/complete records for long batch operations.

    Every record carries structured `extra` fields (event_type, operation,
    counts, duration) so file logs can be post-processed. `advance` may be
    called from worker threads; with `every=n` only every n-th item and the
    last one are logged.
    """

    def __init__(self, logger: Optional[logging.Logger] = None, every: int = 1):
        self.logger = logger or get_logger("progress")
        self.every = max(1, every)
        self.completed = 0
        self.start_time: Optional[float] = None
        self._lock = threading.Lock()

    @property
    def elapsed(self) -> Optional[float]:
        """Seconds since start_operation, None before it."""
        if self.start_time is None:
            return None
        return time.monotonic() - self.start_time

    def _emit(self, level: int, message: str, event_type: str, operation: str,
              **fields: Any) -> None:
        extra: Dict[str, Any] = {"event_type": event_type, "operation": operation, **fields}
        self.logger.log(level, message, extra=extra)

    def start_operation(self, operation: str, total_items: Optional[int] = None) -> None:
        with self._lock:
            self.completed = 0
            self.start_time = time.monotonic()
        suffix = f" over {total_items} items" if total_items else ""
        self._emit(logging.INFO, f"{operation}: started{suffix}", "operation_start", operation,
                   total_items=total_items)

    def log_progress(self, operation: str, completed: int, total: int,
                     current_item: str = "") -> None:
        if completed != total and completed % self.every:
            return
        share = completed / total if total > 0 else 0.0
        message = f"{operation}: {completed}/{total} ({share:.0%})"
        if current_item:
            message = f"{message} {current_item}"
        self._emit(logging.INFO, message, "progress", operation,
                   completed=completed, total=total, percentage=100.0 * share,
                   current_item=current_item)

    def advance(self, operation: str, total: int, current_item: str = "") -> int:
        """Count one finished item and return the running count."""
        with self._lock:
            self.completed += 1
            completed = self.completed
        self.log_progress(operation, completed, total, current_item)
        return completed

    def complete_operation(self, operation: str, total_items: int, success_count: int,
                           error_count: int = 0, **details: Any) -> Optional[float]:
        """
        Log the outcome; WARNING when any item failed.

        Returns:
            Duration in seconds, or None without a preceding start_operation
        """
        duration = self.elapsed
        message = f"{operation}: done, {success_count}/{total_items} ok"
        if error_count:
            message += f", {error_count} failed"
        if duration is not None:
            message += f" in {duration:.2f}s"
        self._emit(logging.WARNING if error_count else logging.INFO, message,
                   "operation_complete", operation, total_items=total_items,
                   success_count=success_count, error_count=error_count, duration=duration,
                   **details)
        return duration

"""
Centralized logging configuration for magcent.

This module provides structured logging with:
- One application logger, ``magcent``, that owns the handlers
- Module loggers ``magcent.<module>`` that propagate to it
- Console output on stderr, so CSV written to stdout stays clean
- File output with rotation for persistent logs
- Configurable log levels
"""

import logging
import sys
from pathlib import Path
from logging.handlers import RotatingFileHandler
from config import Config

APP_LOGGER = 'magcent'


def _configure_app_logger() -> logging.Logger:
    """Attach the console and file handlers to the application logger, once."""
    app_logger = logging.getLogger(APP_LOGGER)

    # Only configure if not already configured (prevents duplicate handlers)
    if app_logger.handlers:
        return app_logger

    log_level = getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO)
    app_logger.setLevel(log_level)

    # ========================================
    # Console Handler (stderr)
    # ========================================
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.INFO)

    console_formatter = logging.Formatter(
        fmt='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    console_handler.setFormatter(console_formatter)
    app_logger.addHandler(console_handler)

    # ========================================
    # File Handler (with rotation)
    # ========================================
    if Config.LOG_FILE:
        log_file = Path(Config.LOG_FILE)
        log_file.parent.mkdir(parents=True, exist_ok=True)

        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=10 * 1024 * 1024,  # 10 MB per file
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setLevel(logging.DEBUG)

        file_formatter = logging.Formatter(
            fmt='%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        file_handler.setFormatter(file_formatter)
        app_logger.addHandler(file_handler)

    return app_logger


def setup_logging(name: str = APP_LOGGER) -> logging.Logger:
    """
    Return the logger for ``name`` under the application logger.

    The ``magcent`` logger is configured on first use with a console
    handler (INFO+) and, unless ``LOG_FILE`` is empty, a rotating file
    handler (DEBUG+). Module loggers are its children: they carry no
    handlers and propagate records up.

    Args:
        name: Logger name (typically __name__ from calling module)

    Returns:
        ``magcent`` itself, or the child ``magcent.<name>``

    Example:
        >>> logger = setup_logging(__name__)
        >>> logger.info("Aggregated MAG built")
        2026-01-09 12:00:00 - magcent.subdet - INFO - Aggregated MAG built
    """
    app_logger = _configure_app_logger()
    if name == APP_LOGGER:
        return app_logger
    if not name.startswith(APP_LOGGER + '.'):
        name = f"{APP_LOGGER}.{name}"
    return logging.getLogger(name)


def log_exception(logger: logging.Logger, exc: Exception, context: str = "") -> None:
    """
    Log an exception with full traceback and context.

    Args:
        logger: Logger instance
        exc: Exception to log
        context: Additional context about where/why the exception occurred

    Example:
        >>> logger = setup_logging(__name__)
        >>> try:
        ...     run_experiment(manifest)
        ... except Exception as e:
        ...     log_exception(logger, e, "Experiment aborted")
    """
    if context:
        logger.error(f"{context}: {exc}", exc_info=True)
    else:
        logger.error(f"Exception occurred: {exc}", exc_info=True)


def log_task_start(logger: logging.Logger, task_name: str, task_id: str, **kwargs) -> None:
    """
    Log the start of a task with parameters.

    Args:
        logger: Logger instance
        task_name: Name of the task
        task_id: Celery task ID, or a local run identifier
        **kwargs: Task parameters to log

    Example:
        >>> log_task_start(logger, "run_instance", "abc-123", index=4, seed=7)
    """
    params_str = ", ".join(f"{k}={v}" for k, v in kwargs.items())
    logger.info(f"Task started: {task_name} [ID: {task_id}] with params: {params_str}")


def log_task_complete(logger: logging.Logger, task_name: str, task_id: str, duration: float = None) -> None:
    """
    Log the completion of a task.

    Args:
        logger: Logger instance
        task_name: Name of the task
        task_id: Celery task ID, or a local run identifier
        duration: Optional task duration in seconds
    """
    if duration is not None:
        logger.info(f"Task completed: {task_name} [ID: {task_id}] in {duration:.2f}s")
    else:
        logger.info(f"Task completed: {task_name} [ID: {task_id}]")


def log_task_failed(logger: logging.Logger, task_name: str, task_id: str, error: Exception) -> None:
    """
    Log a failed task.

    Args:
        logger: Logger instance
        task_name: Name of the task
        task_id: Celery task ID, or a local run identifier
        error: Exception that caused the failure
    """
    logger.error(f"Task failed: {task_name} [ID: {task_id}] - {error}", exc_info=True)

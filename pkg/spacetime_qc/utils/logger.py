"""Logging infrastructure with JSON and text format support."""

import logging
import sys
from typing import Optional

import structlog


def _shared_processors() -> list:
    return [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.processors.TimeStamper(fmt="iso", utc=True),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
    ]


def setup_logging(
    level: str = "INFO",
    format_type: str = "json",
    file_path: Optional[str] = None,
) -> None:
    """
    Set up logging configuration.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        format_type: Format type ('json' or 'text')
        file_path: Optional file path for log output
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, level.upper()))

    # Clear existing handlers
    root_logger.handlers.clear()

    json_formatter = structlog.stdlib.ProcessorFormatter(
        processor=structlog.processors.JSONRenderer(),
        foreign_pre_chain=_shared_processors(),
    )
    if format_type == "json":
        formatter = json_formatter
    else:
        formatter = structlog.stdlib.ProcessorFormatter(
            processor=structlog.dev.ConsoleRenderer(colors=sys.stderr.isatty()),
            foreign_pre_chain=_shared_processors(),
        )

    # Console handler (stderr keeps stdout free for plot tables)
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    # File handler if path provided
    if file_path:
        file_handler = logging.FileHandler(file_path)
        file_handler.setFormatter(json_formatter)  # Always JSON for files
        root_logger.addHandler(file_handler)

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            *_shared_processors(),
            structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=False,
    )


def get_logger(name: str) -> structlog.stdlib.BoundLogger:
    """
    Get a logger instance.

    Args:
        name: Logger name (usually __name__)

    Returns:
        Bound structlog logger
    """
    return structlog.stdlib.get_logger(name)


def get_context_logger(name: str, **context) -> structlog.stdlib.BoundLogger:
    """
    Get a logger with additional context fields.

    Args:
        name: Logger name
        **context: Additional context fields to include in all logs

    Returns:
        Logger with the context bound
    """
    return get_logger(name).bind(**context)


if __name__ == "__main__":
    print("=" * 60)
    print("LOGGER TEST")
    print("=" * 60)

    setup_logging(level="DEBUG", format_type="text")
    logger = get_logger("test")
    logger.debug("debug message")
    logger.info("info message", qubits=4)
    logger.warning("warning message")

    print("\nJSON format:")
    setup_logging(level="INFO", format_type="json")
    ctx_logger = get_context_logger("test.context", experiment="teleport-verify", seed=7)
    ctx_logger.info("message with context", trial=3)

    print("=" * 60)
    print("TEST COMPLETE")
    print("=" * 60)

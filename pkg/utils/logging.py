"""
Structured logging utilities for consistent logging across the simulator.
"""

import json
import logging
import sys
import traceback
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

UTC = timezone.utc

# Configure default logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=[logging.StreamHandler(sys.stdout)],
)


class CustomJSONEncoder(json.JSONEncoder):
    """JSON encoder for numpy values, complex numbers, paths, UUIDs and datetimes."""

    def default(self, obj):
        if isinstance(obj, (complex, np.complexfloating)):
            return {"re": float(obj.real), "im": float(obj.imag)}
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist() if not np.iscomplexobj(obj) else [self.default(v) for v in obj.ravel()]
        if isinstance(obj, (set, frozenset)):
            return sorted(obj)
        if isinstance(obj, (uuid.UUID, Path)):
            return str(obj)
        if isinstance(obj, datetime):
            return obj.isoformat()
        return super().default(obj)


class StructuredLogger:
    """
    Logger that emits one JSON object per message, with optional bound context.
    """

    def __init__(self, name: str):
        """
        Initialize a structured logger with the given name.

        Args:
            name: The logger name, typically __name__ of the module
        """
        self.logger = logging.getLogger(name)
        self.context: Dict[str, Any] = {}

    def with_context(self, **kwargs) -> "StructuredLogger":
        """
        Return a logger sharing this one's handler but carrying extra context.

        Args:
            **kwargs: Key-value pairs to add to the context

        Returns:
            A new StructuredLogger, so concurrent scenarios never share context
        """
        bound = StructuredLogger(self.logger.name)
        bound.context = {**self.context, **kwargs}
        return bound

    def _format_log(self, message: str, extra: Optional[Dict[str, Any]] = None) -> str:
        log_data: Dict[str, Any] = {
            "message": message,
            "timestamp": datetime.now(UTC).isoformat(),
        }
        if self.context:
            log_data["context"] = self.context
        if extra:
            log_data["data"] = extra
        return json.dumps(log_data, cls=CustomJSONEncoder)

    def debug(self, message: str, **kwargs) -> None:
        if self.logger.isEnabledFor(logging.DEBUG):
            self.logger.debug(self._format_log(message, kwargs or None))

    def info(self, message: str, **kwargs) -> None:
        self.logger.info(self._format_log(message, kwargs or None))

    def warning(self, message: str, **kwargs) -> None:
        self.logger.warning(self._format_log(message, kwargs or None))

    def error(self, message: str, exc_info: Optional[BaseException] = None, **kwargs) -> None:
        """
        Log an error message with optional exception info and extra data.

        Args:
            message: The error message
            exc_info: Optional exception object to include stacktrace
            **kwargs: Additional data to include in the log
        """
        extra_data = dict(kwargs)
        if exc_info:
            extra_data["exception"] = {
                "type": exc_info.__class__.__name__,
                "message": str(exc_info),
                "traceback": traceback.format_exc(),
            }
        self.logger.error(self._format_log(message, extra_data))


def configure_logging(level: str = "INFO", fmt: Optional[str] = None) -> None:
    """Apply the configured level (and format) to the root logger."""
    root = logging.getLogger()
    root.setLevel(level.upper())
    if fmt:
        for handler in root.handlers:
            handler.setFormatter(logging.Formatter(fmt))


def get_logger(name: str) -> StructuredLogger:
    """
    Get a configured structured logger.

    Usage:
    ```
    logger = get_logger(__name__)
    logger.info("Scenario finished", fidelity=0.995)
    ```
    """
    return StructuredLogger(name)

"""Structured logging: one JSON object per record, keyword fields inline."""

import json
import logging
import sys
from datetime import datetime, timezone
from typing import Any, Dict, Optional, TextIO

import numpy as np

PLAIN_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# record attribute -> JSON key
RECORD_FIELDS = {
    "levelname": "level",
    "name": "logger",
    "module": "module",
    "funcName": "function",
    "lineno": "line",
}


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


class StructuredFormatter(logging.Formatter):
    """JSON formatter; fields passed to ``StructuredLogger`` land at top level."""

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            "message": record.getMessage(),
        }
        entry.update({key: getattr(record, attr) for attr, key in RECORD_FIELDS.items()})
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        entry.update(getattr(record, "fields", {}))
        return json.dumps(entry, default=_plain)


class StructuredLogger:
    """``log.info("stationary batch", replicas=n, capped=c)``.

    ``bind`` returns a logger that adds the given fields to every record.
    """

    def __init__(self, name: str, bound: Optional[Dict[str, Any]] = None):
        self.logger = logging.getLogger(name)
        self.bound = dict(bound or {})

    def bind(self, **fields: Any) -> 'StructuredLogger':
        return StructuredLogger(self.logger.name, {**self.bound, **fields})

    def isEnabledFor(self, level: int) -> bool:
        return self.logger.isEnabledFor(level)

    def _log(self, level: int, message: str, **fields: Any) -> None:
        if not self.logger.isEnabledFor(level):
            return
        # stacklevel 3 points funcName at the caller of debug()/info()/...
        self.logger.log(level, message, extra={"fields": {**self.bound, **fields}},
                        stacklevel=3)

    def debug(self, message: str, **fields: Any) -> None:
        self._log(logging.DEBUG, message, **fields)

    def info(self, message: str, **fields: Any) -> None:
        self._log(logging.INFO, message, **fields)

    def warning(self, message: str, **fields: Any) -> None:
        self._log(logging.WARNING, message, **fields)

    def error(self, message: str, **fields: Any) -> None:
        self._log(logging.ERROR, message, **fields)


def setup_logging(level: str = "WARNING", structured: bool = True,
                  stream: Optional[TextIO] = None) -> None:
    """Route the root logger to ``stream`` (stderr by default; stdout carries results)."""
    root = logging.getLogger()
    root.setLevel(getattr(logging, level.upper(), logging.WARNING))
    root.handlers.clear()
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(StructuredFormatter() if structured else logging.Formatter(PLAIN_FORMAT))
    root.addHandler(handler)


def get_logger(name: str) -> StructuredLogger:
    return StructuredLogger(name)

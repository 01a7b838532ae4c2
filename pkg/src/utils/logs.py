"""Logging setup for the command-line entry point.

Library modules only create `logging.getLogger(__name__)`; handlers are
installed here, once, by the CLI.
"""

from __future__ import annotations

import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str = "WARNING") -> None:
    root = logging.getLogger("src")
    root.setLevel(getattr(logging, level.upper(), logging.WARNING))
    if not any(getattr(h, "_tvr_handler", False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._tvr_handler = True  # type: ignore[attr-defined]
        root.addHandler(handler)


__all__ = ["configure_logging", "LOG_FORMAT"]

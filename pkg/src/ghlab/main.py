"""ghlab entry point.

Loads configuration, sets up logging and hands over to the CLI. This is the
composition root; log records go to stderr so stdout carries only the report.
"""

from __future__ import annotations

import logging
import sys
from collections.abc import Sequence

from pydantic import ValidationError

from ghlab import cli
from ghlab.config import get_config

logger = logging.getLogger(__name__)


def setup_logging(log_level: str) -> None:
    """Configure root logger with the given level.

    Args:
        log_level: Logging level string (e.g. 'INFO', 'DEBUG').
    """
    numeric_level = getattr(logging, log_level.upper(), logging.INFO)
    logging.basicConfig(
        level=numeric_level,
        format="%(asctime)s %(levelname)-8s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    # basicConfig is a no-op when handlers already exist.
    logging.getLogger().setLevel(numeric_level)


def main(argv: Sequence[str] | None = None) -> int:
    """Run one ghlab command and return its exit code."""
    try:
        config = get_config()
    except ValidationError as exc:
        setup_logging("INFO")
        logger.error("Invalid environment configuration: %s", exc)
        return 2
    setup_logging(config.log_level)
    logger.debug("Starting ghlab", extra={"seed": config.seed, "samples": config.samples})
    return cli.main(argv)


def run() -> None:
    """Console-script wrapper around :func:`main`."""
    sys.exit(main())


if __name__ == "__main__":
    run()

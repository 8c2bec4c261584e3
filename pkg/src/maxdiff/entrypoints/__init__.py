"""Define the different ways to expose the program functionality.

Functions:
    load_config: Configure the Config object.
    load_logger: Configure the Logging logger.
    exit_code: Map an error to the exit code of the command line.
"""

import logging
import sys

from pydantic import ValidationError

from ..config import Config, ConfigError
from ..model import DegenerateStatisticError, NumericalError

log = logging.getLogger(__name__)

EXIT_INPUT_ERROR = 2
EXIT_DEGENERATE_STATISTIC = 3
EXIT_NUMERICAL_ERROR = 4


def exit_code(error: Exception) -> int:
    """Return the exit code of the family of the error."""
    if isinstance(error, NumericalError):
        return EXIT_NUMERICAL_ERROR
    if isinstance(error, DegenerateStatisticError):
        return EXIT_DEGENERATE_STATISTIC
    return EXIT_INPUT_ERROR


def load_config(config_path: str) -> Config:
    """Configure the Config object."""
    try:
        return Config(config_path)
    except ConfigError as error:
        log.error(str(error))
        sys.exit(EXIT_INPUT_ERROR)


def describe(error: Exception) -> str:
    """Return a one line description of an error for the logs."""
    if isinstance(error, ValidationError):
        return "; ".join(
            f"{'.'.join(str(part) for part in detail['loc'])}: {detail['msg']}"
            for detail in error.errors()
        )
    return str(error)


# I have no idea how to test this function :(. If you do, please send a PR.
def load_logger(verbose: bool = False) -> None:  # pragma no cover
    """Configure the Logging logger.

    Args:
        verbose: Set the logging level to Debug.
    """
    logging.addLevelName(logging.INFO, "[\033[36m+\033[0m]")
    logging.addLevelName(logging.ERROR, "[\033[31m+\033[0m]")
    logging.addLevelName(logging.DEBUG, "[\033[32m+\033[0m]")
    logging.addLevelName(logging.WARNING, "[\033[33m+\033[0m]")
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if verbose else logging.INFO,
        format="  %(levelname)s %(message)s",
    )

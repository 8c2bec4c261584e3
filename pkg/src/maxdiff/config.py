"""Define the configuration of the main program."""

import logging
import os
from collections import UserDict
from importlib import resources
from typing import Any, Dict, List, Union

from ruamel.yaml import YAML
from ruamel.yaml.parser import ParserError
from ruamel.yaml.scanner import ScannerError

from .model import MaxDiffError

log = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "~/.local/share/maxdiff/config.yaml"


class ConfigError(MaxDiffError):
    """Catch configuration errors."""


def default_config() -> str:
    """Return the contents of the packaged configuration file."""
    return (
        resources.files("maxdiff")
        .joinpath("assets/config.yaml")
        .read_text(encoding="utf-8")
    )


# R0901: UserDict has too many ancestors.
# type ignore: the generic UserDict can't be parametrized on python 3.9.
class Config(UserDict):  # type: ignore # noqa: R0901
    """Hold the defaults of the test, csv and simulate commands.

    Public methods:
        get: Fetch the configuration value of the specified key.
        section: Return a top level section as a plain dictionary.
        load: Load the configuration from the configuration YAML file.
        save: Saves the configuration in the configuration YAML file.

    Attributes and properties:
        config_path (str): Path to the configuration file.
        data(dict): Program configuration.
    """

    def __init__(self, config_path: str = DEFAULT_CONFIG_PATH) -> None:
        """Configure the attributes and load the configuration."""
        super().__init__()
        self.config_path = os.path.expanduser(config_path)
        self.load()

    def get(
        self,
        key: str,
        default: Any = None,  # noqa: ANN401
    ) -> Union[str, int, float, Dict[str, Any], List[Any]]:
        """Fetch the configuration value of the specified key.

        Nested values are reached with dots, `get("test.alpha")` returns the
        significance level of the test section.

        Raises:
            ConfigError: if the key is missing and there is no default.
        """
        value = self.data
        for config_key in key.split("."):
            try:
                value = value[config_key]
            except (KeyError, TypeError) as error:
                if default is not None:
                    return default
                raise ConfigError(
                    f"The configuration has no {config_key} while looking for {key}"
                ) from error

        return value

    def section(self, name: str) -> Dict[str, Any]:
        """Return a top level section as a plain dictionary.

        Missing sections, or sections that are not mappings, are empty.
        """
        section = self.data.get(name) if isinstance(self.data, dict) else None
        return dict(section) if isinstance(section, dict) else {}

    def load(self) -> None:
        """Load the configuration from the configuration YAML file.

        If the file doesn't exist, the default configuration is written there.
        """
        try:
            with open(self.config_path, "r", encoding="utf-8") as file_cursor:
                try:
                    self.data = YAML().load(file_cursor) or {}
                except (ParserError, ScannerError) as error:
                    raise ConfigError(str(error)) from error
        except FileNotFoundError:
            log.warning(
                f"The configuration file {self.config_path} could not be found."
                "\n Copying the default one."
            )
            os.makedirs(os.path.dirname(self.config_path) or ".", exist_ok=True)
            contents = default_config()
            with open(self.config_path, "w", encoding="utf-8") as file_cursor:
                file_cursor.write(contents)
            self.data = YAML().load(contents)

    def save(self) -> None:
        """Save the configuration in the configuration YAML file."""
        with open(self.config_path, "w+", encoding="utf-8") as file_cursor:
            yaml = YAML()
            yaml.default_flow_style = False
            yaml.dump(self.data, file_cursor)

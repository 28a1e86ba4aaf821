import json
import os
import shutil
from typing import TypeVar

from dotenv import find_dotenv, load_dotenv

from ...utils.logger import logger
from ..errors import ConfigError

T = TypeVar("T")

ENV_PREFIX = "QUBOLIN_"
KEY_ALIASES = {"r": "r_bits", "l_initial": "l", "algorithm": "algo", "n_iter": "iters"}


def normalize_key(key: str) -> str:
    key = key.strip().lower().replace("-", "_")
    return KEY_ALIASES.get(key, key)


class ConfigManager:
    """
    Layered settings: an optional user key=value file, QUBOLIN_<KEY> environment
    variables (a .env file is honoured) and the bundled config/default_settings.json.
    """

    def __init__(self, run_path, bundle_path=None, user_config_path=None, load_env=True):
        self.run_path = run_path
        bundle_config_path = os.path.join(bundle_path or run_path, "config")

        self.default_config_path = os.path.join(bundle_config_path, "default_settings.json")
        self.recipes_config_path = os.path.join(bundle_config_path, "recipes.json")
        self.about_config_path = os.path.join(bundle_config_path, "version.json")
        self.user_config_path = user_config_path

        self._cache = {}
        if load_env:
            dotenv_path = find_dotenv(usecwd=True)
            if dotenv_path:
                load_dotenv(dotenv_path, override=False)
                logger.debug(f"Loaded environment file: {dotenv_path}")
        self.init()

    def init(self):
        self.init_default_config()
        self.load_all_to_cache()

    def load_all_to_cache(self):
        """Pre-load all configurations into cache."""
        self._cache["default"] = self._load_config(self.default_config_path, "Error loading default config")
        self._cache["user"] = self._load_key_value_config(self.user_config_path)
        self._cache["env"] = self._load_env_config()

    def init_default_config(self):
        """Validate bundled default_settings exists; it is not user-mutable."""
        if not os.path.exists(self.default_config_path):
            logger.warning(f"Bundled default settings not found: {self.default_config_path}")

    @staticmethod
    def _load_config(config_path, error_message):
        """Load configuration from a JSON file with backup for corruption."""
        try:
            if not os.path.exists(config_path):
                return {}
            with open(config_path, encoding="utf-8") as file:
                return json.load(file)
        except json.JSONDecodeError:
            logger.error(f"Invalid JSON format in file: {config_path}")
            try:
                backup_path = config_path + ".bak"
                shutil.copy2(config_path, backup_path)
                logger.info(f"Corrupted config backed up to: {backup_path}")
            except Exception as e:
                logger.error(f"Failed to backup corrupted config: {e}")
            return {}
        except Exception as e:
            logger.error(f"{error_message}: {e}")
            return {}

    @staticmethod
    def _load_key_value_config(config_path) -> dict[str, str]:
        """Parse a plain ``key = value`` file; blank lines and ``#`` comments are skipped."""
        if config_path is None:
            return {}
        if not os.path.exists(config_path):
            raise ConfigError(f"config file not found: {config_path}")
        values = {}
        with open(config_path, encoding="utf-8") as file:
            for line_no, raw in enumerate(file, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, value = line.partition("=")
                if not sep or not key.strip():
                    raise ConfigError(f"{config_path}:{line_no}: expected key=value, got {raw.strip()!r}")
                values[normalize_key(key)] = value.strip()
        logger.info(f"Loaded {len(values)} settings from {config_path}")
        return values

    @staticmethod
    def _load_env_config() -> dict[str, str]:
        return {
            normalize_key(name[len(ENV_PREFIX):]): value
            for name, value in os.environ.items()
            if name.startswith(ENV_PREFIX) and name != f"{ENV_PREFIX}LOG_DIR"
        }

    def load_default_config(self):
        if "default" not in self._cache:
            self._cache["default"] = self._load_config(self.default_config_path, "An error occurred while loading default config")
        return self._cache["default"]

    def load_user_config(self):
        if "user" not in self._cache:
            self._cache["user"] = self._load_key_value_config(self.user_config_path)
        return self._cache["user"]

    def load_env_config(self):
        if "env" not in self._cache:
            self._cache["env"] = self._load_env_config()
        return self._cache["env"]

    def load_recipes_config(self):
        if "recipes" not in self._cache:
            self._cache["recipes"] = self._load_config(self.recipes_config_path, "An error occurred while loading recipes")
        return self._cache["recipes"]

    def load_about_config(self):
        return self._load_config(self.about_config_path, "An error occurred while loading about config")

    def get_version(self) -> str:
        updates = self.load_about_config().get("version_updates") or [{}]
        return updates[0].get("version", "0.0.0")

    def get_config_value(self, key: str, default: T = None) -> T:
        key = normalize_key(key)
        for layer in (self.load_user_config(), self.load_env_config(), self.load_default_config()):
            if key in layer:
                return layer[key]
        return default

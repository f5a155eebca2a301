# config.py
"""
Manages user-configurable settings for sharelogic.

Settings live in a JSON file under the platform's user config directory. Values
from the file override DEFAULT_CONFIG, and a few environment variables override
both.
"""

import json
import logging
import os
from platformdirs import user_config_dir

logger = logging.getLogger(__name__)

APP_NAME = "ShareLogic"
CONFIG_FILE = "config.json"

DEFAULT_CONFIG = {
    "strict_reads": False,       # error instead of warn on read-groups missing their reader
    "max_closure": 64,           # non-comparative members of the closure
    "max_basis": 16,             # independent truth values branched on per atom
    "max_agents": 4,
    "unravel_depth": 3,
    "reduce_max_steps": 200000,
    "log_level": "WARNING",
    "log_file": "",
}

# environment variable -> (config key, converter)
ENV_OVERRIDES = {
    "SHARELOGIC_STRICT_READS": ("strict_reads", lambda v: v.strip().lower() in ("1", "true", "yes")),
    "SHARELOGIC_MAX_CLOSURE": ("max_closure", int),
    "SHARELOGIC_LOG_LEVEL": ("log_level", str.upper),
}


def get_config_path():
    """
    Gets the cross-platform configuration file path.
    """
    return os.path.join(user_config_dir(APP_NAME, roaming=True), CONFIG_FILE)


def load_config(path: str | None = None) -> dict:
    """
    Loads the configuration, falling back to defaults for anything missing.

    Args:
        path: Optional explicit config file. Defaults to get_config_path().

    Returns:
        A dict holding every key of DEFAULT_CONFIG.
    """
    config_path = path or get_config_path()
    config_to_load = DEFAULT_CONFIG.copy()

    if os.path.exists(config_path):
        try:
            with open(config_path, 'r') as f:
                config_from_file = json.load(f)
            if isinstance(config_from_file, dict):
                config_to_load.update(config_from_file)
            else:
                logger.warning(f"Ignoring configuration at '{config_path}': not a JSON object.")
        except (json.JSONDecodeError, IOError) as e:
            logger.warning(f"Error loading configuration: {e}. Using default config.")

    for env_name, (key, convert) in ENV_OVERRIDES.items():
        raw = os.environ.get(env_name)
        if raw is None:
            continue
        try:
            config_to_load[key] = convert(raw)
        except ValueError:
            logger.warning(f"Ignoring {env_name}={raw!r}: cannot convert for '{key}'.")

    for key, value in DEFAULT_CONFIG.items():
        config_to_load.setdefault(key, value)

    return config_to_load


def save_config(config_data, path: str | None = None):
    """
    Saves the given configuration data to the config file.
    Returns True on success, False on failure.
    """
    config_path = path or get_config_path()
    try:
        config_dir = os.path.dirname(config_path)
        if config_dir and not os.path.exists(config_dir):
            os.makedirs(config_dir, exist_ok=True)

        if config_dir and not os.access(config_dir, os.W_OK):
            logger.error(f"Configuration directory is not writable: {config_dir}")
            return False

        with open(config_path, 'w') as f:
            json.dump(config_data, f, indent=4)
        return True
    except (IOError, OSError) as e:
        logger.error(f"Error saving configuration: {e}")
        return False


# Load the configuration at import so other modules can read it
config = load_config()

"""
SatakeForge - Configuration

Environment defaults come from a .env file (python-dotenv); job declarations
come from TOML files passed with --config.
"""

import os
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from errors import ConfigError

load_dotenv()

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_LEVEL = os.getenv('SATAKE_FORGE_LOG_LEVEL', 'INFO').upper()


def _int_env(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"Environment variable {name} must be an integer, got {raw!r}")


DEFAULT_SEED = _int_env('SATAKE_FORGE_SEED', 0)
DEFAULT_TRIALS = _int_env('SATAKE_FORGE_TRIALS', None)
MAX_WORKERS = max(1, _int_env('SATAKE_FORGE_THREADS', 1))


def setup_logging(level: Optional[str] = None):
    """Configure root logging the same way for every entry point"""
    logging.basicConfig(level=getattr(logging, level or LOG_LEVEL, logging.INFO), format=LOG_FORMAT)


# Keys each declaration table must carry
REQUIRED_KEYS = {
    'type': ('p', 'f', 'n', 'a_prime', 's_tau'),
    'weight': ('p', 'f', 'n', 'lambda'),
    'point': ('t',),
    'hecke': ('element',),
}


def load_job_config(path) -> Dict[str, Any]:
    """
    Load and validate a TOML job config.

    Args:
        path: Path to the TOML file

    Returns:
        Parsed config as a plain dict
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file does not exist: {path}")

    try:
        with open(path, 'rb') as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as e:
        # message already carries "(at line X, column Y)"
        raise ConfigError(f"{path}: TOML parse error: {e}")

    if not data:
        raise ConfigError(f"{path}: config is empty")

    for section, keys in REQUIRED_KEYS.items():
        if section not in data:
            continue
        table = data[section]
        if not isinstance(table, dict):
            raise ConfigError(f"{path}: [{section}] must be a table")
        missing = [k for k in keys if k not in table]
        if missing:
            raise ConfigError(f"{path}: [{section}] missing field(s): {', '.join(missing)}")

    logger.debug(f"Loaded config {path} with sections {sorted(data)}")
    return data

# gr2/config.py
import logging
import os
from pathlib import Path

import yaml

logger = logging.getLogger("gr2")

CONFIG_PATH = Path(__file__).resolve().parent.parent / "config" / "config.yaml"
THREADS_ENV = "GR2_THREADS"

try:
    with open(CONFIG_PATH, "r") as file:
        config = yaml.safe_load(file) or {}
    logger.debug("Configuration loaded successfully.")
except Exception as e:
    logger.error(f"Failed to load configuration: {e}")
    raise

_thread_override = None


def setting(section, key, default=None):
    """Read `section.key` from config.yaml, falling back to `default`."""
    return (config.get(section) or {}).get(key, default)


def default_genus():
    return int(setting("defaults", "genus", 3))


def default_trials():
    return int(setting("defaults", "trials", 1000))


def default_seed():
    return int(setting("defaults", "seed", 0))


def default_format():
    return setting("defaults", "format", "text")


def artifact_version():
    return str(setting("certificates", "artifact_version", "1.0.0"))


def schema_version():
    return int(setting("certificates", "schema_version", 1))


def log_level():
    return setting("logging", "level", "INFO")


def random_steps():
    return int(setting("random_symplectic", "steps", 24))


def coefficient_bound():
    return int(setting("sampling", "coefficient_bound", 2))


def set_threads(threads):
    """Pin the thread count (the --threads flag). None clears the pin."""
    global _thread_override
    if threads is not None and int(threads) < 1:
        raise ValueError(f"threads must be positive, got {threads}")
    _thread_override = None if threads is None else int(threads)


def thread_count():
    """Thread count: --threads, then GR2_THREADS, then defaults.threads."""
    if _thread_override is not None:
        return _thread_override
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            value = int(raw)
            if value >= 1:
                return value
        except ValueError:
            pass
        logger.warning(f"Ignoring invalid {THREADS_ENV}={raw!r}")
    return max(1, int(setting("defaults", "threads", 1)))

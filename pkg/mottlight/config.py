"""Tool configuration for mottlight runs.

Settings are looked up in order:
1. ~/.config/mottlight/config.ini (per user)
2. /etc/mottlight/config.ini (per machine)
3. the defaults written into the Config class

Only execution settings live here: log level, worker threads, output
directory and the default grid resolutions. Physics belongs in scenario
files (mottlight.scenario). Paths follow the XDG Base Directory layout.
"""
import configparser
import logging
import os
from typing import Callable, TypeVar

T = TypeVar("T")

SYSTEM_CONFIG_PATH = "/etc/mottlight/config.ini"
USER_CONFIG_PATH = os.path.expanduser("~/.config/mottlight/config.ini")

# Read once at import; tests swap _config and the paths
_config = configparser.ConfigParser()
_config.read([SYSTEM_CONFIG_PATH, USER_CONFIG_PATH])

_TRUE = ("true", "yes", "1", "on")
_FALSE = ("false", "no", "0", "off")


def get_ini_value(section: str, key: str, fallback: str) -> str:
    """Raw string for [section] key, or fallback when either is missing."""
    try:
        return _config.get(section, key, fallback=fallback)
    except (configparser.NoSectionError, configparser.NoOptionError):
        return fallback


def _get_converted(
    section: str, key: str, fallback: T, convert: Callable[[str], T], expected: str
) -> T:
    raw = get_ini_value(section, key, str(fallback))
    try:
        return convert(raw)
    except ValueError:
        logging.error(
            f"Invalid value [{section}] {key}='{raw}' - must be {expected}, "
            f"using fallback {fallback}"
        )
        return fallback


def _to_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ValueError(raw)


def get_ini_int(section: str, key: str, fallback: int) -> int:
    """
    Integer setting with fallback.

    Args:
        section: INI section (e.g. 'solver')
        key: key within the section (e.g. 'z_points')
        fallback: value used when the key is missing or not an integer

    Returns:
        int
    """
    return _get_converted(section, key, fallback, int, "integer")


def get_ini_bool(section: str, key: str, fallback: bool) -> bool:
    """Boolean setting; accepts true/false, yes/no, 1/0, on/off in any case."""
    return _get_converted(section, key, fallback, _to_bool, "boolean")


def get_ini_float(section: str, key: str, fallback: float) -> float:
    return _get_converted(section, key, fallback, float, "a number")


def validate_config() -> dict:
    """
    Range-check the INI settings.

    Each out-of-range value is logged and replaced by its default.

    Returns:
        Dictionary with validated configuration values
    """
    validated = {}

    threads = get_ini_int("runner", "threads", 1)
    if not 1 <= threads <= 256:
        logging.error(f"Thread count {threads} out of range (1-256), using fallback 1")
        threads = 1
    validated["threads"] = threads

    log_level = get_ini_value("runner", "log_level", "INFO").upper()
    if log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        logging.warning(f"Unknown log level '{log_level}', using INFO")
        log_level = "INFO"
    validated["log_level"] = log_level

    z_points = get_ini_int("solver", "z_points", 64)
    if z_points < 32:
        logging.error(f"z_points {z_points} below minimum 32, using fallback 64")
        z_points = 64
    validated["z_points"] = z_points

    time_step = get_ini_float("solver", "time_step", 0.005)
    if not 0 < time_step <= 0.1:
        logging.error(
            f"time_step {time_step} out of range (0-0.1], using fallback 0.005"
        )
        time_step = 0.005
    validated["time_step"] = time_step

    cells = get_ini_int("spectroscopy", "transverse_cells", 64)
    if cells < 8:
        logging.error(f"transverse_cells {cells} below minimum 8, using fallback 64")
        cells = 64
    validated["transverse_cells"] = cells

    slices = get_ini_int("spectroscopy", "propagation_slices", 32)
    if slices < 8:
        logging.error(f"propagation_slices {slices} below minimum 8, using fallback 32")
        slices = 32
    validated["propagation_slices"] = slices

    camera_points = get_ini_int("camera", "points", 256)
    if camera_points < 32 or camera_points & (camera_points - 1):
        logging.warning(
            f"Camera grid {camera_points} is not a power of two >= 32; FFTs will be slow"
        )
    validated["camera_points"] = camera_points

    return validated


class Config:
    """Settings read from the INI hierarchy at import time."""

    LOG_LEVEL = get_ini_value("runner", "log_level", "INFO").upper()
    DEBUG = False
    THREADS = get_ini_int("runner", "threads", 1)
    OUTPUT_DIR = get_ini_value("runner", "output_dir", os.path.join(os.getcwd(), "runs"))
    USE_JOURNAL = get_ini_bool("runner", "use_journal", True)

    # Maxwell-Bloch solver defaults (time step in units of 1/gamma_31)
    Z_POINTS = get_ini_int("solver", "z_points", 64)
    TIME_STEP = get_ini_float("solver", "time_step", 0.005)

    # Rate-equation model defaults
    TRANSVERSE_CELLS = get_ini_int("spectroscopy", "transverse_cells", 64)
    PROPAGATION_SLICES = get_ini_int("spectroscopy", "propagation_slices", 32)

    # Camera (angular spectrum) grid
    CAMERA_POINTS = get_ini_int("camera", "points", 256)
    CAMERA_SPAN = get_ini_float("camera", "span_um", 512.0) * 1e-6


class DevelopmentConfig(Config):
    """Debug logging to stderr."""

    DEBUG = True
    LOG_LEVEL = "DEBUG"
    USE_JOURNAL = False


class TestingConfig(Config):
    """Fixed settings for the test suite; never depends on INI files on the machine."""

    TESTING = True
    LOG_LEVEL = "WARNING"
    USE_JOURNAL = False
    THREADS = 1
    OUTPUT_DIR = "runs"
    Z_POINTS = 64
    TIME_STEP = 0.005
    TRANSVERSE_CELLS = 64
    PROPAGATION_SLICES = 32
    CAMERA_POINTS = 256
    CAMERA_SPAN = 512e-6


class ProductionConfig(Config):
    """Production configuration for unattended batch runs."""

    DEBUG = False
    LOG_LEVEL = "INFO"


def load_config(config_name: str = "development"):
    """
    Resolve a configuration class by name.

    Args:
        config_name: development, testing or production

    Returns:
        Config subclass

    Raises:
        ValueError: If no configuration of that name exists
    """
    class_name = f"{config_name.capitalize()}Config"
    config_class = globals().get(class_name)
    if not (isinstance(config_class, type) and issubclass(config_class, Config)):
        raise ValueError(f"Unknown configuration '{config_name}'")
    return config_class

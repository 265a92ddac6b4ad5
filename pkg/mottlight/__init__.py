"""mottlight: EIT, light storage and light-shift deflection in an atomic Mott insulator."""

from mottlight.config import load_config
from mottlight.core.logging import configure_logging
from mottlight.scenario.runner import ScenarioRunner

__version__ = "0.1.0"


def create_runner(config_name="development", threads=None):
    """
    Create a scenario runner.

    Args:
        config_name: Configuration name (development, testing, production)
        threads: Worker threads for scan points; None uses the configured THREADS

    Returns:
        ScenarioRunner with logging configured
    """
    config = load_config(config_name)
    configure_logging(config, use_journal=getattr(config, "USE_JOURNAL", None))
    return ScenarioRunner(config, threads)

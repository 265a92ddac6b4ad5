"""Root logger setup for mottlight runs.

Runs started from a systemd unit (long decay or deflection scans) log to
the journal under the identifier "mottlight"; interactive runs and tests
log to stderr. Library modules only create "mottlight.<module>" loggers and
never install handlers themselves.

Usage:
    from mottlight.core.logging import configure_logging

    configure_logging(load_config("development"))
"""

import logging

# systemd-python is optional
try:
    from systemd.journal import JournalHandler

    JOURNAL_AVAILABLE = True
except ImportError:
    JOURNAL_AVAILABLE = False
    JournalHandler = None

LOG_FORMAT = "%(asctime)s [%(name)s] %(levelname)s: %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# Third-party loggers that are chatty at INFO
NOISY_LOGGERS = ("matplotlib", "numba", "sympy")

logger = logging.getLogger("mottlight.core")


def _select_handler(use_journal) -> logging.Handler:
    wanted = JOURNAL_AVAILABLE if use_journal is None else bool(use_journal)
    if wanted and JOURNAL_AVAILABLE:
        return JournalHandler(SYSLOG_IDENTIFIER="mottlight")
    return logging.StreamHandler()


def configure_logging(config, use_journal=None):
    """Install one handler on the root logger.

    Replaces whatever handlers the root logger had, so calling this twice
    never duplicates output. Unless config.DEBUG is set, NOISY_LOGGERS are
    held at WARNING.

    Args:
        config: Config class or instance; LOG_LEVEL defaults to INFO.
        use_journal: True or False forces the choice (False always gives
            stderr); None uses the journal whenever systemd-python imports.

    Returns:
        logging.Handler: the installed handler
    """
    level_name = str(getattr(config, "LOG_LEVEL", "INFO")).upper()
    level = getattr(logging, level_name, logging.INFO)

    handler = _select_handler(use_journal)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATE_FORMAT))

    root = logging.getLogger()
    for old in list(root.handlers):
        root.removeHandler(old)
    root.addHandler(handler)
    root.setLevel(level)

    if not getattr(config, "DEBUG", False):
        for name in NOISY_LOGGERS:
            logging.getLogger(name).setLevel(logging.WARNING)

    logger.info("Logging to %s at %s", type(handler).__name__, level_name)
    return handler

"""Core utilities.

This package provides core utilities for mottlight:
- Logging configuration with systemd journal integration
- Physical constants of the Rb-87 D1 line
- Custom exception classes
"""

from mottlight.core.constants import RB87_D1, PhysicalConstants
from mottlight.core.logging import configure_logging

__all__ = ["configure_logging", "PhysicalConstants", "RB87_D1"]

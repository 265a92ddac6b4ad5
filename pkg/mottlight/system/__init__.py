"""Threading helpers for concurrent scans."""

from mottlight.system.workers import ScanPool

__all__ = ["ScanPool"]

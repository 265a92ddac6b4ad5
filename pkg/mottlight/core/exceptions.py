"""Custom exception hierarchy for mottlight.

Every error raised by the library derives from MottLightException so the
command line can map failures onto exit codes without catching builtins.
Parameter errors also subclass ValueError for callers that validate inputs
the usual Python way.
"""

from typing import Any, Optional


class MottLightException(Exception):
    """Base exception for all mottlight errors."""

    pass


class ParameterError(MottLightException, ValueError):
    """A physical or numerical parameter is outside its valid range."""

    pass


class DegenerateStateError(ParameterError):
    """Dark state undefined because both Rabi frequencies vanish."""

    pass


class ScenarioParseError(MottLightException):
    """Scenario text could not be turned into a valid configuration.

    Attributes:
        line: 1-based line number of the offending entry, or None
        section: INI section of the offending entry, or None
        key: key of the offending entry, or None
    """

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        section: Optional[str] = None,
        key: Optional[str] = None,
    ):
        self.line = line
        self.section = section
        self.key = key
        location = []
        if line is not None:
            location.append(f"line {line}")
        if section is not None:
            entry = f"[{section}]" if key is None else f"[{section}] {key}"
            location.append(entry)
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class ConfigurationError(MottLightException, ValueError):
    """Tool settings (INI files or runner arguments) are unusable."""

    pass


class NumericalError(MottLightException):
    """Base class for failures of a numerical method."""

    pass


class ConvergenceError(NumericalError):
    """Adaptive integration did not converge within the step-halving bound."""

    pass


class StabilityBoundError(NumericalError):
    """Requested time step exceeds the documented stability bound."""

    pass


class InstabilityError(NumericalError):
    """Integration produced energy growth or non-finite values."""

    pass


class FitConvergenceError(NumericalError):
    """Least-squares fit failed; carries the last parameter iterate."""

    def __init__(self, message: str, last_iterate: Any = None):
        self.last_iterate = last_iterate
        super().__init__(message)


class NoFeatureError(NumericalError):
    """Requested spectral feature is absent from the scan."""

    pass


class GridTooSmallError(NumericalError):
    """Propagated field reaches the edge of the transverse grid."""

    pass


class DomainError(NumericalError, ValueError):
    """Input data outside the mathematical domain of an operation."""

    pass


class ScenarioRunError(MottLightException):
    """A module error raised while running a scenario.

    Attributes:
        scenario: name of the scenario being run
        cause: the original exception
    """

    def __init__(self, scenario: str, cause: Exception):
        self.scenario = scenario
        self.cause = cause
        super().__init__(f"scenario '{scenario}' failed: {cause}")

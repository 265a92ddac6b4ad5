"""Scenario files: INI documents describing one experiment.

A scenario names its experiment kind and overrides any of the physical,
grid and analysis parameters. Every dimensioned value carries its unit
(see mottlight.scenario.units). Parameters that are not given take the
defaults of their experiment kind, which are the published parameter sets.

Example:
    [scenario]
    kind = eit-scan

    [lambda]
    omega_c = 2pi*27 kHz     # coupling Rabi frequency
    gamma_21 = 2pi*10 Hz
"""

import configparser
import logging
import re
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from mottlight.core.constants import TWO_PI
from mottlight.core.exceptions import ParameterError, ScenarioParseError
from mottlight.scenario.units import (
    Dimension,
    format_list,
    format_quantity,
    parse_list,
    parse_quantity,
)

logger = logging.getLogger("mottlight.scenario")

BUNDLED_DIR = Path(__file__).resolve().parent.parent / "scenarios"
SCENARIO_SUFFIX = ".scenario"


class ExperimentKind(str, Enum):
    EIT_SCAN = "eit-scan"
    STORE = "store"
    DECAY_SCAN = "decay-scan"
    RAMSEY = "ramsey"
    DEFLECT = "deflect"


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one experiment, in SI units with angular frequencies.

    Optional fields left as None fall back to the tool configuration
    (grids) or to derived values (gamma_31 = Gamma / 2, alpha from the
    cloud geometry, atom number from the radii).
    """

    kind: ExperimentKind
    name: str = "scenario"
    seed: Optional[int] = None

    # [lambda]
    omega_c: float = TWO_PI * 27e3
    omega_p: float = TWO_PI * 3.9e3
    pi_leak_fraction: float = 0.2
    gamma_21: float = TWO_PI * 10.0
    gamma_31: Optional[float] = None

    # [cloud]
    radii: Tuple[float, ...] = (8.6e-6, 13.1e-6, 13.1e-6)
    lattice_wavelengths: Tuple[float, ...] = (765e-9, 844e-9, 844e-9)
    filling: float = 1.0
    atom_number: Optional[float] = None
    peak_od: Optional[float] = None

    # [probe]
    probe_waist: float = 40e-6
    probe_duration: float = 0.2
    probe_fwhm: float = 2.8e-6
    probe_truncation: Optional[float] = 0.0

    # [scan]
    detuning_start: float = -TWO_PI * 300.0
    detuning_stop: float = TWO_PI * 300.0
    detuning_points: int = 61

    # [storage]
    storage_time: float = 3e-6
    storage_times: Tuple[float, ...] = ()
    read_duration: float = 5e-6
    coherence_time: float = 0.436
    od_sweep: Tuple[float, ...] = ()

    # [solver]
    z_points: Optional[int] = None
    time_step: Optional[float] = None
    integrator: str = "rk4"
    lossless: bool = False
    transverse_cells: Optional[int] = None
    propagation_slices: Optional[int] = None

    # [gradient]
    gradient_waist: float = 42e-6
    gradient_offset: float = 20e-6
    gradient_intensity: float = 2.3e4
    gradient_detuning: float = -TWO_PI * 20e9
    center_shift: float = TWO_PI * 7.7e3
    shift_model: str = "calibrated"
    slope_convention: str = "cloud_center"
    interaction_times: Tuple[float, ...] = ()

    # [camera]
    camera_points: Optional[int] = None
    camera_span: Optional[float] = None
    defocus: float = 1e-3

    # [analysis]
    noise_fraction: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ExperimentKind(self.kind))
        for name in ("radii", "lattice_wavelengths", "storage_times", "od_sweep",
                     "interaction_times"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.detuning_points > 1 and not self.detuning_stop > self.detuning_start:
            raise ParameterError("detuning_stop must exceed detuning_start")
        if self.kind in (ExperimentKind.DECAY_SCAN, ExperimentKind.RAMSEY):
            if len(self.storage_times) < 3:
                raise ParameterError(
                    f"{self.kind.value} needs at least 3 storage_times for the decay fit"
                )
        if self.kind is ExperimentKind.DEFLECT and not self.interaction_times:
            raise ParameterError("deflect needs at least one interaction time")

    def with_seed(self, seed: Optional[int]) -> "ScenarioConfig":
        return replace(self, seed=seed)

    @property
    def gamma_s(self) -> float:
        """Spin-wave amplitude decay rate 1 / coherence_time (1/s)."""
        return 1.0 / self.coherence_time


# Kind-specific defaults applied before the file's own values
KIND_DEFAULTS: Dict[ExperimentKind, dict] = {
    ExperimentKind.EIT_SCAN: {},
    ExperimentKind.STORE: {
        "omega_c": TWO_PI * 4.5e6,
        "omega_p": TWO_PI * 1.5e6,
        "pi_leak_fraction": 0.0,
        "gamma_21": 0.0,
    },
    ExperimentKind.DECAY_SCAN: {
        "omega_c": TWO_PI * 4.5e6,
        "omega_p": TWO_PI * 1.5e6,
        "pi_leak_fraction": 0.0,
        "gamma_21": 0.0,
        "storage_times": (3e-6, 1e-3, 50e-3, 100e-3, 200e-3, 300e-3, 400e-3),
    },
    ExperimentKind.RAMSEY: {
        "omega_c": TWO_PI * 4.5e6,
        "omega_p": TWO_PI * 1.5e6,
        "pi_leak_fraction": 0.0,
        "gamma_21": 0.0,
        "z_points": 32,
        "time_step": 0.02,
        "storage_times": (0.0, 50e-3, 100e-3, 200e-3, 300e-3, 400e-3),
    },
    ExperimentKind.DEFLECT: {
        "omega_c": TWO_PI * 4.3e6,
        "omega_p": TWO_PI * 3.8e6,
        "pi_leak_fraction": 0.0,
        "gamma_21": 0.0,
        "atom_number": 2.5e5,
        "storage_time": 10e-3,
        "interaction_times": (0.0, 10e-6, 20e-6, 30e-6, 40e-6, 50e-6),
    },
}

# Value kinds that are not physical quantities
TEXT = "text"
BOOLEAN = "boolean"


def _positive(value):
    return value > 0


def _nonnegative(value):
    return value >= 0


def _fraction(value):
    return 0 <= value <= 1


@dataclass(frozen=True)
class Entry:
    """One recognised key of a scenario file."""

    section: str
    key: str
    attr: str
    dimension: object
    check: Optional[Callable] = None
    length: Optional[int] = None
    many: bool = False
    optional: bool = False
    choices: Tuple[str, ...] = ()
    requirement: str = ""


SCHEMA: Tuple[Entry, ...] = (
    Entry("scenario", "kind", "kind", TEXT, choices=tuple(k.value for k in ExperimentKind)),
    Entry("scenario", "name", "name", TEXT),
    Entry("scenario", "seed", "seed", Dimension.INTEGER, _nonnegative, optional=True,
          requirement=">= 0"),
    Entry("lambda", "omega_c", "omega_c", Dimension.ANGULAR_FREQUENCY, _nonnegative,
          requirement=">= 0"),
    Entry("lambda", "omega_p", "omega_p", Dimension.ANGULAR_FREQUENCY, _nonnegative,
          requirement=">= 0"),
    Entry("lambda", "pi_leak_fraction", "pi_leak_fraction", Dimension.DIMENSIONLESS,
          _fraction, requirement="in [0, 1]"),
    Entry("lambda", "gamma_21", "gamma_21", Dimension.ANGULAR_FREQUENCY, _nonnegative,
          requirement=">= 0"),
    Entry("lambda", "gamma_31", "gamma_31", Dimension.ANGULAR_FREQUENCY, _positive,
          optional=True, requirement="> 0"),
    Entry("cloud", "radii", "radii", Dimension.LENGTH, _positive, length=3, many=True,
          requirement="> 0"),
    Entry("cloud", "lattice_wavelengths", "lattice_wavelengths", Dimension.LENGTH,
          _positive, length=3, many=True, requirement="> 0"),
    Entry("cloud", "filling", "filling", Dimension.DIMENSIONLESS, _nonnegative,
          requirement=">= 0"),
    Entry("cloud", "atom_number", "atom_number", Dimension.DIMENSIONLESS, _positive,
          optional=True, requirement="> 0"),
    Entry("cloud", "peak_od", "peak_od", Dimension.DIMENSIONLESS, _positive,
          optional=True, requirement="> 0"),
    Entry("probe", "waist", "probe_waist", Dimension.LENGTH, _positive, requirement="> 0"),
    Entry("probe", "duration", "probe_duration", Dimension.TIME, _positive,
          requirement="> 0"),
    Entry("probe", "fwhm", "probe_fwhm", Dimension.TIME, _positive, requirement="> 0"),
    Entry("probe", "truncation", "probe_truncation", Dimension.TIME, optional=True),
    Entry("scan", "detuning_start", "detuning_start", Dimension.ANGULAR_FREQUENCY),
    Entry("scan", "detuning_stop", "detuning_stop", Dimension.ANGULAR_FREQUENCY),
    Entry("scan", "detuning_points", "detuning_points", Dimension.INTEGER, _positive,
          requirement=">= 1"),
    Entry("storage", "storage_time", "storage_time", Dimension.TIME, _nonnegative,
          requirement=">= 0"),
    Entry("storage", "storage_times", "storage_times", Dimension.TIME, _nonnegative,
          many=True, optional=True, requirement=">= 0"),
    Entry("storage", "read_duration", "read_duration", Dimension.TIME, _positive,
          requirement="> 0"),
    Entry("storage", "coherence_time", "coherence_time", Dimension.TIME, _positive,
          requirement="> 0"),
    Entry("storage", "od_sweep", "od_sweep", Dimension.DIMENSIONLESS, _positive,
          many=True, optional=True, requirement="> 0"),
    Entry("solver", "z_points", "z_points", Dimension.INTEGER, lambda v: v >= 32,
          optional=True, requirement=">= 32"),
    Entry("solver", "time_step", "time_step", Dimension.DIMENSIONLESS, _positive,
          optional=True, requirement="> 0"),
    Entry("solver", "integrator", "integrator", TEXT, choices=("rk4", "adiabatic")),
    Entry("solver", "lossless", "lossless", BOOLEAN),
    Entry("solver", "transverse_cells", "transverse_cells", Dimension.INTEGER,
          lambda v: v >= 8, optional=True, requirement=">= 8"),
    Entry("solver", "propagation_slices", "propagation_slices", Dimension.INTEGER,
          lambda v: v >= 8, optional=True, requirement=">= 8"),
    Entry("gradient", "waist", "gradient_waist", Dimension.LENGTH, _positive,
          requirement="> 0"),
    Entry("gradient", "offset", "gradient_offset", Dimension.LENGTH),
    Entry("gradient", "peak_intensity", "gradient_intensity", Dimension.INTENSITY,
          _nonnegative, requirement=">= 0"),
    Entry("gradient", "detuning", "gradient_detuning", Dimension.ANGULAR_FREQUENCY,
          lambda v: v != 0, requirement="nonzero"),
    Entry("gradient", "center_shift", "center_shift", Dimension.ANGULAR_FREQUENCY),
    Entry("gradient", "shift_model", "shift_model", TEXT,
          choices=("calibrated", "ab-initio")),
    Entry("gradient", "slope_convention", "slope_convention", TEXT,
          choices=("cloud_center", "intensity_weighted")),
    Entry("gradient", "interaction_times", "interaction_times", Dimension.TIME,
          _nonnegative, many=True, optional=True, requirement=">= 0"),
    Entry("camera", "points", "camera_points", Dimension.INTEGER, lambda v: v >= 16,
          optional=True, requirement=">= 16"),
    Entry("camera", "span", "camera_span", Dimension.LENGTH, _positive, optional=True,
          requirement="> 0"),
    Entry("camera", "defocus", "defocus", Dimension.LENGTH, _positive,
          requirement="> 0"),
    Entry("analysis", "noise_fraction", "noise_fraction", Dimension.DIMENSIONLESS,
          _nonnegative, requirement=">= 0"),
)

_BY_KEY = {(entry.section, entry.key): entry for entry in SCHEMA}
SECTIONS = tuple(dict.fromkeys(entry.section for entry in SCHEMA))

_SECTION_LINE = re.compile(r"^\s*\[(?P<name>[^\]]+)\]")
_KEY_LINE = re.compile(r"^(?P<key>[^\s=:#;\[][^=:]*?)\s*[=:]")


def _line_index(text: str) -> Tuple[Dict[str, int], Dict[Tuple[str, str], int]]:
    """1-based line numbers of section headers and keys."""
    sections, keys = {}, {}
    current = None
    for number, line in enumerate(text.splitlines(), start=1):
        header = _SECTION_LINE.match(line)
        if header:
            current = header.group("name").strip()
            sections.setdefault(current, number)
            continue
        entry = _KEY_LINE.match(line)
        if entry and current is not None:
            keys.setdefault((current, entry.group("key").strip().lower()), number)
    return sections, keys


def _convert(entry: Entry, raw: str):
    """Text value of one key -> python value; ValueError on bad input."""
    raw = raw.strip()
    if entry.optional and raw.lower() == "none":
        return () if entry.many else None
    if entry.dimension == TEXT:
        if entry.choices and raw not in entry.choices:
            raise ValueError(f"'{raw}' is not one of: {', '.join(entry.choices)}")
        if not raw:
            raise ValueError("value is empty")
        return raw
    if entry.dimension == BOOLEAN:
        lowered = raw.lower()
        if lowered in ("true", "yes", "1", "on"):
            return True
        if lowered in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"'{raw}' is not a boolean")
    if entry.many:
        value = parse_list(raw, entry.dimension, entry.length)
        values = value
    else:
        value = parse_quantity(raw, entry.dimension)
        values = (value,)
    if entry.check is not None:
        for item in values:
            if not entry.check(item):
                raise ValueError(f"value {item!r} out of range (must be {entry.requirement})")
    return value


def _read_parser(text: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), strict=True
    )
    try:
        parser.read_string(text)
    except configparser.ParsingError as e:
        line = e.errors[0][0] if e.errors else None
        raise ScenarioParseError("malformed line", line=line) from e
    except configparser.Error as e:
        raise ScenarioParseError(e.message.split("\n")[0], line=getattr(e, "lineno", None)) from e
    return parser


def parse_scenario(text: str, name: Optional[str] = None) -> ScenarioConfig:
    """Parse and validate scenario text.

    Args:
        text: INI scenario document
        name: scenario name when the document has no [scenario] name

    Returns:
        ScenarioConfig with every value in SI base units

    Raises:
        ScenarioParseError: empty text, unknown section or key, bad unit or
            out-of-range value; the message names the line
    """
    if not text.strip():
        raise ScenarioParseError("scenario is empty")
    parser = _read_parser(text)
    section_lines, key_lines = _line_index(text)

    if parser.defaults():
        raise ScenarioParseError(
            "the DEFAULT section is not supported", line=section_lines.get("DEFAULT"),
            section="DEFAULT",
        )

    values = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ScenarioParseError(
                f"unknown section (expected one of: {', '.join(SECTIONS)})",
                line=section_lines.get(section), section=section,
            )
        for key, raw in parser.items(section):
            line = key_lines.get((section, key))
            entry = _BY_KEY.get((section, key))
            if entry is None:
                raise ScenarioParseError("unknown key", line=line, section=section, key=key)
            try:
                values[entry.attr] = _convert(entry, raw)
            except ValueError as e:
                raise ScenarioParseError(str(e), line=line, section=section, key=key) from e

    if "kind" not in values:
        raise ScenarioParseError("missing experiment kind", section="scenario", key="kind")
    kind = ExperimentKind(values["kind"])
    merged = dict(KIND_DEFAULTS[kind])
    merged.update(values)
    if name is not None and "name" not in values:
        merged["name"] = name
    try:
        config = ScenarioConfig(**merged)
    except ParameterError as e:
        raise ScenarioParseError(str(e)) from e
    logger.debug("Parsed scenario '%s' (%s)", config.name, config.kind.value)
    return config


def _format(entry: Entry, value) -> str:
    if value is None or (entry.many and not value):
        return "none"
    if entry.dimension == TEXT:
        return value.value if isinstance(value, Enum) else str(value)
    if entry.dimension == BOOLEAN:
        return "true" if value else "false"
    if entry.many:
        return format_list(value, entry.dimension)
    return format_quantity(value, entry.dimension)


def serialize_scenario(config: ScenarioConfig) -> str:
    """Scenario text that parses back to an equal config.

    Every field is written explicitly in base units with exact float reprs.
    """
    lines: List[str] = []
    for section in SECTIONS:
        if lines:
            lines.append("")
        lines.append(f"[{section}]")
        for entry in SCHEMA:
            if entry.section != section:
                continue
            value = getattr(config, entry.attr)
            if value is None and not entry.optional:
                continue
            lines.append(f"{entry.key} = {_format(entry, value)}")
    return "\n".join(lines) + "\n"


def list_scenarios() -> List[str]:
    """Names of the bundled scenarios."""
    return sorted(path.stem for path in BUNDLED_DIR.glob(f"*{SCENARIO_SUFFIX}"))


def load_scenario(path) -> ScenarioConfig:
    """Parse a scenario file; the file stem names the scenario."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioParseError(f"cannot read scenario file {path}: {e.strerror}") from e
    return parse_scenario(text, name=path.stem)


def load_bundled(name: str) -> ScenarioConfig:
    """Parse one of the bundled scenarios by name (e.g. 'fig2').

    Raises:
        ScenarioParseError: no bundled scenario of that name
    """
    path = BUNDLED_DIR / f"{name}{SCENARIO_SUFFIX}"
    if not path.is_file():
        raise ScenarioParseError(
            f"no bundled scenario '{name}' (available: {', '.join(list_scenarios())})"
        )
    return load_scenario(path)


def resolve_scenario(reference: str) -> ScenarioConfig:
    """Load a scenario from a file path, or a bundled scenario by name."""
    path = Path(reference)
    if path.suffix == SCENARIO_SUFFIX or path.exists():
        return load_scenario(path)
    return load_bundled(reference)

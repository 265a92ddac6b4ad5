"""Scenario files, experiment orchestration and run outputs."""

from mottlight.scenario.parser import (
    ExperimentKind,
    ScenarioConfig,
    list_scenarios,
    load_bundled,
    load_scenario,
    parse_scenario,
    resolve_scenario,
    serialize_scenario,
)
from mottlight.scenario.runner import RunReport, ScenarioRunner, run
from mottlight.scenario.units import Dimension, parse_quantity

__all__ = [
    "ExperimentKind",
    "ScenarioConfig",
    "list_scenarios",
    "load_bundled",
    "load_scenario",
    "parse_scenario",
    "resolve_scenario",
    "serialize_scenario",
    "RunReport",
    "ScenarioRunner",
    "run",
    "Dimension",
    "parse_quantity",
]

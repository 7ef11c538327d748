"""Discrete-event simulation oracle for the single-threaded dispatcher."""

from .engine import (
    CompiledModel,
    Execution,
    InstanceResult,
    SweepSummary,
    Trace,
    TraceRecord,
    adversarial_scenario,
    critical_scenario,
    parse_trace_lines,
    simulate,
    sweep,
)
from .kernel import BACKEND
from .scenario import Scenario, ScenarioError, SourcePolicy, default_duration, expand, random_scenario

__all__ = [
    "BACKEND", "CompiledModel", "Execution", "InstanceResult", "Scenario", "ScenarioError",
    "SourcePolicy", "SweepSummary", "Trace", "TraceRecord", "adversarial_scenario",
    "critical_scenario", "default_duration", "expand", "parse_trace_lines", "random_scenario",
    "simulate", "sweep",
]

"""Executable scenarios: registry, runner and canonical reports."""

from . import scenarios  # noqa: F401  (registers the zoo)
from .registry import (
    GLOBAL_DEFAULTS,
    HORIZON,
    MATCHES,
    REGISTRY,
    VERDICTS,
    VIOLATES,
    Expect,
    RunReport,
    Scenario,
    build_scenario,
    declared_params,
    list_scenarios,
    run_scenario,
)
from .report import report_payload, serialize_report, serialize_reports, timing_sidecar

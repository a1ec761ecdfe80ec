"""Canonical JSON for run reports: sorted keys, 17 significant digits, no timing."""

import json
import math

import numpy as np

from .registry import RunReport


def _scalar(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return _Float(x + 0.0)  # + 0.0 folds -0.0 into 0.0


class _Float(float):
    def __repr__(self):
        return format(self, ".17g")


def canonical(obj):
    """Plain JSON-ready structure; tuples become lists, numpy values become Python ones."""
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (bool, int, float, np.bool_, np.integer, np.floating)):
        return _scalar(obj)
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray, set, frozenset)):
        items = list(obj)
        if isinstance(obj, (set, frozenset)):
            items = sorted(items, key=repr)
        return [canonical(v) for v in items]
    return repr(obj)


def _dump(x):
    if isinstance(x, dict):
        return "{" + ",".join(json.dumps(k) + ":" + _dump(x[k]) for k in sorted(x)) + "}"
    if isinstance(x, list):
        return "[" + ",".join(_dump(v) for v in x) + "]"
    if isinstance(x, _Float):
        return repr(x)
    return json.dumps(x)


def report_payload(report: RunReport) -> dict:
    return canonical(
        {
            "scenario": report.scenario,
            "verdict": report.verdict,
            "measured": report.measured,
            "expected": report.expected,
            "witnesses": report.witnesses,
            "params": report.params,
            "diff": report.diff,
            "notes": report.notes,
        }
    )


def serialize_report(report: RunReport) -> str:
    return _dump(report_payload(report))


def serialize_reports(reports) -> str:
    """Several reports as one canonical document, ordered by scenario name."""
    body = ",".join(serialize_report(r) for r in sorted(reports, key=lambda r: r.scenario))
    return '{"reports":[' + body + "]}\n"


def timing_sidecar(reports) -> str:
    return json.dumps({r.scenario: round(r.wall_time, 6) for r in reports}, sort_keys=True, indent=1) + "\n"

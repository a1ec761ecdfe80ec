"""Scenario registry: parameter handling, expectations, and verdicts."""

import math
import time
from dataclasses import dataclass, field
from typing import Callable

from ..errors import HyperlatError, InputError, PreconditionError

MATCHES = "matches-paper"
VIOLATES = "violates-expectation"
HORIZON = "horizon-consistent"
VERDICTS = (MATCHES, VIOLATES, HORIZON)

# Shared parameter defaults; a scenario's own defaults take precedence, and a
# scenario only accepts the parameters it declares.
GLOBAL_DEFAULTS = {"window": 8.0, "grid_step": 1 / 16, "horizon": 64, "tol": 1e-9, "seed": 42}


@dataclass(frozen=True)
class Expect:
    """One declarative expectation on a measured value."""

    key: str
    op: str  # "eq", "approx", "le", "ge", "true", "false"
    value: object = None
    tol: float = 0.0
    note: str = ""  # where the expected value comes from

    def holds(self, measured) -> bool:
        if self.key not in measured:
            return False
        m = measured[self.key]
        if self.op == "true":
            return m is True
        if self.op == "false":
            return m is False
        if self.op == "eq":
            return m == self.value
        if self.op == "approx":
            return _approx(m, self.value, self.tol)
        if self.op == "le":
            return m <= self.value + self.tol
        if self.op == "ge":
            return m >= self.value - self.tol
        raise InputError(f"unknown expectation operator {self.op!r}")

    def describe(self) -> dict:
        return {"key": self.key, "op": self.op, "value": self.value, "tol": self.tol, "note": self.note}


def _approx(a, b, tol):
    if isinstance(a, (list, tuple)):
        return isinstance(b, (list, tuple)) and len(a) == len(b) and all(_approx(x, y, tol) for x, y in zip(a, b))
    try:
        return math.isclose(float(a), float(b), rel_tol=0.0, abs_tol=tol)
    except (TypeError, ValueError):
        return False


@dataclass
class Outcome:
    measured: dict
    witnesses: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ScenarioDef:
    name: str
    summary: str
    defaults: dict
    build: Callable  # params -> materials
    run: Callable  # (materials, params) -> Outcome
    expectations: Callable  # params -> list[Expect]
    claim_kind: str = "conclusive"  # or "horizon" for finite-horizon positive claims
    notes: tuple = ()


REGISTRY: dict = {}


def register(name, summary, defaults, expectations, claim_kind="conclusive", notes=()):
    def wrap(build_and_run):
        build, run = build_and_run()
        if name in REGISTRY:
            raise ValueError(f"duplicate scenario {name}")
        REGISTRY[name] = ScenarioDef(name, summary, dict(defaults), build, run, expectations, claim_kind, tuple(notes))
        return build_and_run

    return wrap


@dataclass(frozen=True)
class Scenario:
    name: str
    params: dict
    expectation: tuple
    materials: dict = field(repr=False, compare=False)
    definition: ScenarioDef = field(repr=False, compare=False)


@dataclass(frozen=True)
class RunReport:
    scenario: str
    verdict: str
    measured: dict
    expected: list
    witnesses: dict
    params: dict
    diff: list
    notes: list
    wall_time: float = 0.0  # excluded from the canonical payload


def list_scenarios(filter_text: str = "") -> list:
    return sorted(n for n in REGISTRY if filter_text in n)


def declared_params(name: str) -> dict:
    if name not in REGISTRY:
        raise InputError(f"unknown scenario {name!r}")
    return dict(REGISTRY[name].defaults)


def _coerce(name, key, default, value):
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, int):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif isinstance(default, float):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        value = float(value) if ok else value
    elif isinstance(default, str):
        ok = isinstance(value, str)
    else:
        ok = isinstance(value, type(default))
    if not ok:
        raise InputError(f"{name}: parameter {key!r} expects {type(default).__name__}, got {value!r}")
    return value


def build_scenario(name: str, overrides: dict | None = None) -> Scenario:
    if name not in REGISTRY:
        raise InputError(f"unknown scenario {name!r}")
    d = REGISTRY[name]
    params = dict(d.defaults)
    for key, value in (overrides or {}).items():
        if key not in params:
            raise InputError(f"{name}: unknown parameter {key!r}")
        params[key] = _coerce(name, key, params[key], value)
    return Scenario(name, params, tuple(d.expectations(params)), d.build(params), d)


def run_scenario(scenario: Scenario) -> RunReport:
    d = scenario.definition
    start = time.perf_counter()
    try:
        out = d.run(scenario.materials, scenario.params)
        measured, witnesses = out.measured, out.witnesses
    except PreconditionError as exc:
        measured = {"precondition_error": str(exc)}
        witnesses = {"precondition_witness": repr(exc.witness)}
    except HyperlatError as exc:
        measured = {"error": f"{type(exc).__name__}: {exc}"}
        witnesses = {}
    wall = time.perf_counter() - start
    diff = []
    for e in scenario.expectation:
        if not e.holds(measured):
            diff.append({"key": e.key, "expected": e.describe(), "measured": measured.get(e.key, "missing")})
    if diff:
        verdict = VIOLATES
    else:
        verdict = HORIZON if d.claim_kind == "horizon" else MATCHES
    return RunReport(
        scenario.name,
        verdict,
        measured,
        [e.describe() for e in scenario.expectation],
        witnesses,
        dict(scenario.params),
        diff,
        list(d.notes),
        wall,
    )

"""Command line: ``hyperlat list`` and ``hyperlat run``.

Exit codes: 0 when no scenario violates its expectations, 1 otherwise,
2 on usage or configuration errors.
"""

import argparse
import sys
from pathlib import Path

from . import __version__
from .errors import InputError
from .io import load_config
from .zoo import VIOLATES, build_scenario, declared_params, list_scenarios, run_scenario
from .zoo.registry import REGISTRY
from .zoo.report import serialize_reports, timing_sidecar

# CLI flag -> scenario parameter; a flag reaches only the scenarios that declare it.
GLOBAL_FLAGS = ("tol", "horizon", "window", "seed")


def _parser():
    p = argparse.ArgumentParser(prog="hyperlat", description="Run the order/hyperspace scenario zoo.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    ls = sub.add_parser("list", help="list registered scenarios")
    ls.add_argument("filter", nargs="?", default="", help="substring filter on scenario names")
    ls.add_argument("-v", "--verbose", action="store_true", help="show summaries and parameters")

    run = sub.add_parser("run", help="run scenarios and report verdicts")
    which = run.add_mutually_exclusive_group(required=True)
    which.add_argument("--scenario", action="append", metavar="NAME", help="scenario to run (repeatable)")
    which.add_argument("--all", action="store_true", help="run every registered scenario")
    run.add_argument("--json", metavar="PATH", help="write the canonical report document here")
    run.add_argument("--tol", type=float)
    run.add_argument("--horizon", type=int)
    run.add_argument("--window", type=float, help="window half-width")
    run.add_argument("--seed", type=int)
    run.add_argument(
        "--config",
        metavar="PATH",
        help="JSON parameter overrides: a flat object, or one object per scenario name",
    )
    return p


def _overrides(name, args, config):
    declared = declared_params(name)
    out = {}
    flat = {k: v for k, v in config.items() if not isinstance(v, dict)}
    for key, value in flat.items():
        if key in declared:
            out[key] = value
    out.update(config.get(name, {}) if isinstance(config.get(name), dict) else {})
    for flag in GLOBAL_FLAGS:
        value = getattr(args, flag)
        if value is not None and flag in declared:
            out[flag] = value
    return out


def _check_config(config, names):
    for key, value in config.items():
        if isinstance(value, dict):
            if key not in REGISTRY:
                raise InputError(f"config names unknown scenario {key!r}")
        elif not any(key in declared_params(n) for n in names):
            raise InputError(f"config parameter {key!r} is not declared by any selected scenario")


def _cmd_list(args):
    for name in list_scenarios(args.filter):
        if args.verbose:
            d = REGISTRY[name]
            params = ", ".join(f"{k}={v!r}" for k, v in sorted(d.defaults.items()))
            print(f"{name}\n    {d.summary}\n    [{d.claim_kind}] {params}")
        else:
            print(name)
    return 0


def _cmd_run(args):
    names = list_scenarios() if args.all else list(dict.fromkeys(args.scenario))
    config = load_config(args.config) if args.config else {}
    _check_config(config, names)
    scenarios = [build_scenario(n, _overrides(n, args, config)) for n in names]
    reports = []
    for sc in scenarios:
        r = run_scenario(sc)
        reports.append(r)
        print(f"{r.verdict:22s} {r.scenario}  ({r.wall_time:.2f}s)")
        for d in r.diff:
            print(f"    {d['key']}: expected {d['expected']['op']} {d['expected']['value']!r}, measured {d['measured']!r}")
    bad = sum(r.verdict == VIOLATES for r in reports)
    print(f"{len(reports)} scenario(s), {bad} violating expectations")
    if args.json:
        path = Path(args.json)
        path.write_text(serialize_reports(reports))
        path.with_name(path.name + ".timing.json").write_text(timing_sidecar(reports))
    return 1 if bad else 0


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _cmd_list(args) if args.command == "list" else _cmd_run(args)
    except InputError as exc:
        print(f"hyperlat: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

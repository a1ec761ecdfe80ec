"""JSON formats for posets, point clouds, regions, spaces, sequences and matrices.

Every loader accepts a path or an already-parsed dict and raises InputError
on malformed content.  Poset files may omit reflexive pairs; they are added
on load.
"""

import json
from pathlib import Path

import numpy as np

from .embedding import FLAGS, SampledMetricPoset
from .errors import InputError
from .hyperspace import FellNbhd, Region, SetSequence
from .metric import DEFAULT_TOL, MetricContext, SampledSet, make_set
from .order import FinitePoset, validate_partial_order, with_reflexive_pairs
from .pogroup import SymMatrix


def _read(source):
    if isinstance(source, dict):
        return source
    try:
        return json.loads(Path(source).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {source}: {exc}") from exc


def _need(doc, *keys):
    missing = [k for k in keys if k not in doc]
    if missing:
        raise InputError(f"missing field(s) {missing}")


def _id(e):
    # JSON arrays come back as lists; element ids must be hashable
    return tuple(e) if isinstance(e, list) else e


def load_poset(source) -> FinitePoset:
    doc = _read(source)
    _need(doc, "elements", "leq")
    elements = [_id(e) for e in doc["elements"]]
    pairs = with_reflexive_pairs(elements, [(_id(a), _id(b)) for a, b in doc["leq"]])
    report = validate_partial_order(elements, pairs)
    if not report.is_valid:
        raise InputError(f"not a partial order: {report.violations[:5]}")
    return report.poset


def poset_to_json(poset: FinitePoset) -> dict:
    return {"elements": list(poset.elements), "leq": sorted(map(list, poset.leq), key=repr)}


def context_from_json(doc) -> MetricContext:
    _need(doc, "dim", "window")
    rule = doc.get("distance_rule", "euclidean")
    tol = float(doc.get("tol", DEFAULT_TOL))
    if rule == "custom-table":
        _need(doc, "table")
        return MetricContext.from_table(doc["table"], tol)
    return MetricContext(int(doc["dim"]), doc["window"], rule, tol)


def context_to_json(ctx: MetricContext) -> dict:
    out = {"dim": ctx.dimension, "window": [list(w) for w in ctx.window], "distance_rule": ctx.distance_rule, "tol": ctx.tol}
    if ctx.table is not None:
        out["table"] = ctx.table.tolist()
    return out


def load_point_cloud(source, ctx: MetricContext | None = None):
    """Returns (context, SampledSet); the file's own dim/window are used unless ctx is given."""
    doc = _read(source)
    _need(doc, "points")
    if ctx is None:
        ctx = context_from_json(doc)
    return ctx, make_set(ctx, doc["points"], doc.get("label", ""))


def point_cloud_to_json(ctx: MetricContext, S: SampledSet) -> dict:
    return {**context_to_json(ctx), "points": S.points.tolist(), "label": S.label}


def region_from_json(doc) -> Region:
    _need(doc, "kind")
    kind = doc["kind"]
    if kind.endswith("ball"):
        _need(doc, "center", "radius")
        return Region(kind, center=tuple(doc["center"]), radius=float(doc["radius"]))
    if kind.endswith("box"):
        _need(doc, "lo", "hi")
        return Region(kind, lo=tuple(doc["lo"]), hi=tuple(doc["hi"]))
    if kind == "union":
        _need(doc, "parts")
        return Region("union", parts=tuple(region_from_json(p) for p in doc["parts"]))
    raise InputError(f"unknown region kind {kind!r}")


def region_to_json(region: Region) -> dict:
    if region.kind == "union":
        return {"kind": "union", "parts": [region_to_json(p) for p in region.parts]}
    if region.kind.endswith("ball"):
        return {"kind": region.kind, "center": list(region.center), "radius": region.radius}
    return {"kind": region.kind, "lo": list(region.lo), "hi": list(region.hi)}


def nbhd_from_json(doc) -> FellNbhd:
    miss = doc.get("miss")
    return FellNbhd(tuple(region_from_json(h) for h in doc.get("hits", [])), region_from_json(miss) if miss else None)


def nbhd_to_json(nbhd: FellNbhd) -> dict:
    return {"hits": [region_to_json(h) for h in nbhd.hits], "miss": region_to_json(nbhd.miss) if nbhd.miss else None}


def load_sequence(source) -> SetSequence:
    """{"context": ..., "template": "cloud_{n}.json", "horizon": N}; paths relative to the file."""
    doc = _read(source)
    _need(doc, "context", "template", "horizon")
    ctx = context_from_json(doc["context"])
    base = Path(source).parent if not isinstance(source, dict) else Path(".")
    terms = []
    for n in range(1, int(doc["horizon"]) + 1):
        _, S = load_point_cloud(base / doc["template"].format(n=n), ctx)
        terms.append(S)
    return SetSequence(ctx, terms)


def load_space(source) -> SampledMetricPoset:
    doc = _read(source)
    _need(doc, "context", "sample")
    ctx = context_from_json(doc["context"])
    flags = doc.get("flags", {})
    if isinstance(flags, dict):
        unknown = set(flags) - FLAGS
        if unknown:
            raise InputError(f"unknown flags {sorted(unknown)}")
        flags = {k for k, v in flags.items() if v}
    space = SampledMetricPoset(
        ctx,
        make_set(ctx, doc["sample"], doc.get("label", "")),
        leq_rule=doc.get("leq_rule", "coordinatewise"),
        pairs=frozenset((tuple(a), tuple(b)) for a, b in doc.get("pairs", [])),
        predicate_id=doc.get("predicate_id", ""),
        meet_rule=doc.get("meet_rule"),
        join_rule=doc.get("join_rule"),
        flags=frozenset(flags),
        justification=doc.get("justification", ""),
    )
    report = space.validate()
    if not report.is_valid:
        raise InputError(f"order rule is not a partial order on the sample: {report.violations[:5]}")
    return space


def space_to_json(space: SampledMetricPoset) -> dict:
    return {
        "context": context_to_json(space.ctx),
        "sample": space.sample.points.tolist(),
        "leq_rule": space.leq_rule,
        "pairs": [[list(a), list(b)] for a, b in sorted(space.pairs)],
        "predicate_id": space.predicate_id,
        "meet_rule": space.meet_rule,
        "join_rule": space.join_rule,
        "flags": {f: f in space.flags for f in sorted(FLAGS)},
        "justification": space.justification,
    }


def load_matrices(source) -> list:
    """{"matrices": [{"n": 2, "entries": [row-major...]}, ...]}"""
    doc = _read(source)
    _need(doc, "matrices")
    out = []
    for m in doc["matrices"]:
        _need(m, "n", "entries")
        if len(m["entries"]) != m["n"] ** 2:
            raise InputError("entry count does not match n*n")
        out.append(SymMatrix(np.array(m["entries"], dtype=np.float64).reshape(m["n"], m["n"])))
    return out


def matrices_to_json(mats) -> dict:
    return {"matrices": [{"n": M.n, "entries": M.entries.ravel().tolist()} for M in mats]}


def load_config(source) -> dict:
    """Scenario parameter overrides: {param: value}, or {scenario name: {param: value}}."""
    doc = _read(source)
    if not isinstance(doc, dict):
        raise InputError("config must be a JSON object")
    return doc

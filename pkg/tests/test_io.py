import json

import numpy as np
import pytest

from hyperlat.embedding import SampledMetricPoset
from hyperlat.errors import InputError
from hyperlat.hyperspace import FellNbhd, Region
from hyperlat.io import (
    context_from_json,
    context_to_json,
    load_config,
    load_matrices,
    load_point_cloud,
    load_poset,
    load_sequence,
    load_space,
    matrices_to_json,
    nbhd_from_json,
    nbhd_to_json,
    point_cloud_to_json,
    poset_to_json,
    region_from_json,
    space_to_json,
)
from hyperlat.metric import MetricContext, make_set
from hyperlat.pogroup import SymMatrix


def test_poset_round_trip_and_reflexive_fill(tmp_path):
    doc = {"elements": ["a", "b", "c"], "leq": [["a", "b"], ["b", "c"], ["a", "c"]]}
    path = tmp_path / "p.json"
    path.write_text(json.dumps(doc))
    P = load_poset(path)
    assert P.le("a", "a") and P.le("a", "c") and not P.le("c", "a")
    again = load_poset(json.loads(json.dumps(poset_to_json(P))))
    assert again.leq == P.leq


def test_poset_errors(tmp_path):
    with pytest.raises(InputError):
        load_poset({"elements": ["a"]})
    with pytest.raises(InputError):
        load_poset({"elements": ["a", "b"], "leq": [["a", "b"], ["b", "a"]]})
    with pytest.raises(InputError):
        load_poset(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputError):
        load_poset(bad)


def test_tuple_elements_survive_json():
    P = load_poset({"elements": [[0, 0], [0, 1]], "leq": [[[0, 0], [0, 1]]]})
    assert P.le((0, 0), (0, 1))


def test_context_and_cloud_round_trip():
    ctx = MetricContext(2, [(-1, 1), (0, 2)], tol=1e-7)
    again = context_from_json(json.loads(json.dumps(context_to_json(ctx))))
    assert again == ctx
    tab = MetricContext.from_table([[0, 1], [1, 0]])
    assert np.array_equal(context_from_json(context_to_json(tab)).table, tab.table)
    S = make_set(ctx, [[0, 0.5], [1, 2]], "pts")
    c2, S2 = load_point_cloud(json.loads(json.dumps(point_cloud_to_json(ctx, S))))
    assert c2 == ctx and S2.as_tuples() == S.as_tuples() and S2.label == "pts"


def test_regions_and_nbhd_round_trip():
    nb = FellNbhd(
        (Region.open_ball((0, 0), 0.5), Region.open_box((0, 0), (1, 1))),
        Region.union_of(Region.closed_ball((2, 2), 0.1), Region.closed_box((3, 3), (4, 4))),
    )
    assert nbhd_from_json(json.loads(json.dumps(nbhd_to_json(nb)))) == nb
    assert nbhd_from_json({"hits": []}) == FellNbhd()
    with pytest.raises(InputError):
        region_from_json({"kind": "blob"})
    with pytest.raises(InputError):
        region_from_json({"kind": "open-ball", "center": [0]})


def test_space_round_trip():
    ctx = MetricContext.box(0, 1, 2)
    sp = SampledMetricPoset(
        ctx, make_set(ctx, [[0, 0], [0, 1], [1, 1]]), meet_rule="coordinatewise-min", flags={"semilattice"}, justification="grid"
    )
    again = load_space(json.loads(json.dumps(space_to_json(sp))))
    assert again == sp
    with pytest.raises(InputError):
        load_space({**space_to_json(sp), "flags": {"glittery": True}})
    cyc = {**space_to_json(sp), "leq_rule": "custom-pairs", "pairs": [[[0, 0], [0, 1]], [[0, 1], [0, 0]]]}
    with pytest.raises(InputError):
        load_space(cyc)


def test_sequence_from_template(tmp_path):
    ctx = MetricContext.box(0, 1)
    for n in range(1, 4):
        (tmp_path / f"c{n}.json").write_text(json.dumps({"points": [[1 / n]]}))
    (tmp_path / "seq.json").write_text(
        json.dumps({"context": context_to_json(ctx), "template": "c{n}.json", "horizon": 3})
    )
    seq = load_sequence(tmp_path / "seq.json")
    assert seq.horizon == 3 and seq[2].as_tuples() == [(0.5,)]


def test_matrices_round_trip():
    mats = [SymMatrix(np.eye(2)), SymMatrix([[1, 2, 0], [2, 1, 0], [0, 0, 3]])]
    again = load_matrices(json.loads(json.dumps(matrices_to_json(mats))))
    assert all(np.array_equal(a.entries, b.entries) for a, b in zip(mats, again))
    with pytest.raises(InputError):
        load_matrices({"matrices": [{"n": 2, "entries": [1, 2, 3]}]})


def test_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"horizon": 32}')
    assert load_config(p) == {"horizon": 32}
    p.write_text("[1, 2]")
    with pytest.raises(InputError):
        load_config(p)

"""Acceptance suite: one PASS/FAIL line per criterion, each with its runtime budget.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed even
when output capture is on) or directly as ``python tests/test_acceptance.py``.
Numerical checks recompute the claimed quantities from the library's raw
outputs with independent numpy code wherever that is cheap; scenario
verdicts are used only on top of that.
"""

import json
import math
import shutil
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from hyperlat.embedding import canonical_ideal, radially_convex_metric
from hyperlat.fixedpoint import NAMED_MAPS, tk_iterate
from hyperlat.hyperspace import kp_check
from hyperlat.metric import wijsman_rho
from hyperlat.order import FinitePoset
from hyperlat.zoo import HORIZON, MATCHES, VIOLATES, build_scenario, list_scenarios, run_scenario
from hyperlat.zoo.generators import deflation_start, random_lattice, random_monotone_map

sys.path.insert(0, str(Path(__file__).parent))
from oracles import kp_instance, kp_library_inputs, kp_oracle  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]


def verdict_line(emit, number, title, ok, elapsed, limit, detail):
    passed = bool(ok) and elapsed < limit
    line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {title} | {detail} | {elapsed:.2f}s (limit {limit}s)"
    emit(line)
    assert passed, line


def run(name, **overrides):
    return run_scenario(build_scenario(name, overrides))


# 1 ----------------------------------------------------------------------------------------


def criterion_1_hausdorff_example(emit=print):
    t = time.perf_counter()
    r = run("ex-4.5-hausdorff-fails")
    H = r.measured["hausdorff"]  # n = 2..10, window k, m <= 20
    ok = len(H) == 9 and all(abs(h - 1) <= 1e-9 for h in H) and r.verdict == MATCHES
    verdict_line(emit, 1, "H((-1/n,-1)down, (0,-1)down) = 1 for n=2..10", ok, time.perf_counter() - t, 1, f"max |H-1| = {max(abs(h - 1) for h in H):.3g}")


# 2 ----------------------------------------------------------------------------------------


def criterion_2_l_space_embedding(emit=print):
    t = time.perf_counter()
    sc = build_scenario("ex-4.1-L-embedding-fails")
    r = run_scenario(sc)
    space = sc.materials["space"]
    # independent recomputation of d((0,-1), (-1/n,0)down) from the sampled ideal
    errs = []
    for n in range(1, 11):
        P = canonical_ideal(space, (-1 / n, 0.0)).points
        d = np.sqrt(((P - [0.0, -1.0]) ** 2).sum(axis=1)).min()
        errs.append(abs(d - math.sqrt(1 + 1 / n**2)))
    m = r.measured
    ok = (
        m["forward_passes"] is False
        and m["witness_center"] == [0.0, -1.0]
        and m["witness_radius"] == 0.5
        and max(errs) <= 1e-9
        and m["symmetric_forward_passes"]
        and m["symmetric_inverse_passes"]
    )
    detail = f"witness B({tuple(m['witness_center'])}, {m['witness_radius']}), max dist err {max(errs):.3g}, symmetric map passes both"
    verdict_line(emit, 2, "forward probe fails at the corner of L", ok, time.perf_counter() - t, 1, detail)


# 3 ----------------------------------------------------------------------------------------


def criterion_3_filtered_infima(emit=print):
    t = time.perf_counter()
    a, b = run("ex-5.3-gap-infimum").measured, run("ex-5.10-not-homomorphism").measured
    ok = (a["f_of_inf_S"], a["inf_fS"]) == (-1.0, 0.0) and (b["f_of_inf_S"], b["inf_fS"]) == (0.0, 1.0)
    detail = f"gap: {a['f_of_inf_S']} vs {a['inf_fS']}; sum map: {b['f_of_inf_S']} vs {b['inf_fS']}"
    verdict_line(emit, 3, "f(inf S) vs inf f(S), exact", ok, time.perf_counter() - t, 1, detail)


# 4 ----------------------------------------------------------------------------------------


def criterion_4_fixed_points(emit=print):
    t = time.perf_counter()
    chain = lambda n: FinitePoset.from_predicate(range(n + 1), lambda x, y: x <= y)
    ok = True
    cases = [(chain(10), NAMED_MAPS["shift-clamp"](2, 3), 10), (chain(8), NAMED_MAPS["halve"](), 8)]
    steps = []
    for P, f, x0 in cases:
        fixed = {x for x in P.elements if f(x) == x}
        tr = tk_iterate(P, f, x0)
        ok &= len(fixed) == 1 and tr.converged and tr.fixed_point in fixed and tr.steps <= 6
        steps.append(tr.steps)
    rng = np.random.default_rng(42)
    outside = unconverged = 0
    for _ in range(100):
        L = random_lattice(rng, 6)
        f = random_monotone_map(rng, L)
        tr = tk_iterate(L, f, deflation_start(rng, L, f))
        unconverged += not tr.converged
        outside += tr.converged and f[tr.fixed_point] != tr.fixed_point
    ok &= outside == 0 and unconverged == 0
    ok &= run("thm-5.11-fixed-point").verdict == MATCHES
    detail = f"chain steps {steps}; 100 random lattices: {outside} outside oracle, {unconverged} unconverged"
    verdict_line(emit, 4, "downward iteration reaches an oracle fixed point", ok, time.perf_counter() - t, 5, detail)


# 5 ----------------------------------------------------------------------------------------


def criterion_5_remetrization(emit=print):
    t = time.perf_counter()
    sc = build_scenario("thm-U-C-remetrization", {"grid_step": 1 / 16, "horizon": 64})
    space = sc.materials["space"]
    rm = radially_convex_metric(space, 64)
    D, P = rm.table, rm.points
    eps = 2.0**-64 + 1e-12
    n = len(P)
    off = ~np.eye(n, dtype=bool)
    sym = np.array_equal(D, D.T) and (np.diag(D) == 0).all()
    pos = (D[off] > 0).all()
    tri = 0
    for i in range(n):
        # D[i, k] <= D[i, j] + D[j, k] for all j, k
        tri += int((D[i][None, :] > D[i][:, None] + D + eps).sum())
    leq = (P[:, None, :] <= P[None, :, :]).all(axis=2)
    chains = bad = 0
    for y in range(n):
        xs, zs = np.flatnonzero(leq[:, y]), np.flatnonzero(leq[y])
        need = np.maximum(D[xs, y][:, None], D[y, zs][None, :])
        chains += need.size
        bad += int((D[np.ix_(xs, zs)] < need - eps).sum())
    spot = max(
        abs(D[i, j] - wijsman_rho(space.ctx, canonical_ideal(space, P[i]), canonical_ideal(space, P[j]), 64).value)
        for i, j in [(0, 1), (17, 200), (288, 5), (100, 144)]
    )
    r = run_scenario(sc)
    ok = n == 289 and sym and pos and tri == 0 and bad == 0 and spot <= 1e-15 and r.measured["sequence_agreements"] == 5
    detail = f"{n} points, triangle violations {tri}, {chains} chains x<=y<=z with {bad} radial violations, 5/5 sequences: {r.measured['sequence_agreements']}"
    verdict_line(emit, 5, "D = rho(x down, y down) is a radially convex metric", ok, time.perf_counter() - t, 30, detail)


# 6 ----------------------------------------------------------------------------------------


def criterion_6_kp_oracle(emit=print):
    t = time.perf_counter()
    rng = np.random.default_rng(20260)
    n_inst, mismatches, seen = 600, 0, set()
    for _ in range(n_inst):
        table, terms, cand, radii, tail, gap = kp_instance(rng)
        assert len(terms) <= 8 and all(len(s) <= 4 for s in terms) and len(cand) <= 4
        _, seq, C = kp_library_inputs(table, terms, cand)
        want = kp_oracle(table, terms, cand, radii, tail, gap)
        seen.add(want)
        gd = None if gap is None else (lambda b, g=gap: g[int(b[0])])
        for mode in ("auto", "greedy", "exhaustive"):
            v = kp_check(seq, C, radii, tail=tail, gap_distance=gd, mode=mode)
            mismatches += (v.lower_ok, v.upper_ok) != want
    ok = mismatches == 0 and len(seen) == 4
    detail = f"{n_inst} discrete instances x 3 search modes, {mismatches} disagreements, verdict kinds seen {len(seen)}/4"
    verdict_line(emit, 6, "K-P check equals the exhaustive selection oracle", ok, time.perf_counter() - t, 30, detail)


# 7 ----------------------------------------------------------------------------------------


def criterion_7_law_suites(emit=print):
    t = time.perf_counter()
    w = run("prop-whenposet-inclusion", trials=1000).measured
    a = run("prop-And-basis-convexity", trials=1000).measured
    ok = w["cases"] == 1000 and w["violations"] == 0 and a["cases"] == 1000 and a["violations"] == 0
    detail = f"inclusion {w['violations']}/{w['cases']} violations, convexity {a['violations']}/{a['cases']} violations"
    verdict_line(emit, 7, "inclusion preservation and basis convexity laws", ok, time.perf_counter() - t, 10, detail)


# 8 ----------------------------------------------------------------------------------------


def criterion_8_pogroups(emit=print):
    t = time.perf_counter()
    g = run("pogroup-Z2-ideals").measured
    lw = run("loewner-antilattice", trials=1000).measured
    ok = (
        g["z_valid"]
        and g["z2_valid"]
        and g["z_failures"] == 0
        and g["z_pairs"] > 0
        and g["z2_failures"] == 0
        and g["z2_pairs"] > 0
        and lw["translation_triples"] == 1000
        and lw["translation_violations"] == 0
        and lw["maximal_lower_bounds"] >= 2
        and lw["greatest_found"] is False
    )
    detail = (
        f"Z: {g['z_pairs']} pairs / {g['z_failures']} failures, Z2: {g['z2_pairs']} / {g['z2_failures']}; "
        f"Loewner translation {lw['translation_violations']}/1000; {lw['maximal_lower_bounds']} maximal lower bounds, no greatest"
    )
    verdict_line(emit, 8, "ideal products, Loewner invariance, antilattice", ok, time.perf_counter() - t, 10, detail)


# 9 ----------------------------------------------------------------------------------------


def criterion_9_l2(emit=print):
    t = time.perf_counter()
    a = run("ex-4.8-l2-intersection", dims=16)
    e = run("ex-6.6/6.7-l2-groups", dims=16)
    nd = a.measured["norm_diffs"]
    errs = [abs(v - math.sqrt(2) / n) for n, v in enumerate(nd, start=1)]
    m = e.measured
    ok = (
        len(nd) == 8
        and max(errs) <= 1e-9
        and e.verdict == HORIZON
        and all(abs(v - 1) <= 1e-12 for v in m["norms"])
        and m["inversion_ball_radius"] == 0.5
        and m["inversion_hits"] == 0
    )
    detail = f"max |norm - sqrt2/n| = {max(errs):.3g}; e_n verdict {e.verdict}, norms 1, inversion miss-ball radius {m['inversion_ball_radius']}"
    verdict_line(emit, 9, "truncated l2 scenarios", ok, time.perf_counter() - t, 5, detail)


# 10 ---------------------------------------------------------------------------------------


def _cli():
    exe = shutil.which("hyperlat")
    return [exe] if exe else [sys.executable, "-m", "hyperlat.cli"]


def criterion_10_full_zoo(tmp_path, emit=print):
    t = time.perf_counter()
    outs, codes, times = [], [], []
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        t0 = time.perf_counter()
        proc = subprocess.run(_cli() + ["run", "--all", "--json", str(path)], capture_output=True, text=True, cwd=ROOT)
        times.append(time.perf_counter() - t0)
        codes.append(proc.returncode)
        outs.append(path.read_bytes() if path.exists() else b"")
    reports = json.loads(outs[0])["reports"] if outs[0] else []
    violating = [r["scenario"] for r in reports if r["verdict"] == VIOLATES]
    ok = codes == [0, 0] and not violating and len(reports) == len(list_scenarios()) and outs[0] == outs[1] and max(times) < 120
    detail = f"exit codes {codes}, {len(reports)} scenarios, {len(violating)} violating, identical bytes: {outs[0] == outs[1]}, runs {times[0]:.1f}s/{times[1]:.1f}s"
    verdict_line(emit, 10, "hyperlat run --all", ok, time.perf_counter() - t, 2 * 120, detail)


# pytest entry points: the PASS/FAIL lines bypass output capture


@pytest.fixture
def emit(capsys):
    def _emit(line):
        with capsys.disabled():
            print("\n" + line)

    return _emit


def test_criterion_1(emit):
    criterion_1_hausdorff_example(emit)


def test_criterion_2(emit):
    criterion_2_l_space_embedding(emit)


def test_criterion_3(emit):
    criterion_3_filtered_infima(emit)


def test_criterion_4(emit):
    criterion_4_fixed_points(emit)


def test_criterion_5(emit):
    criterion_5_remetrization(emit)


def test_criterion_6(emit):
    criterion_6_kp_oracle(emit)


def test_criterion_7(emit):
    criterion_7_law_suites(emit)


def test_criterion_8(emit):
    criterion_8_pogroups(emit)


def test_criterion_9(emit):
    criterion_9_l2(emit)


def test_criterion_10(tmp_path, emit):
    criterion_10_full_zoo(tmp_path, emit)


if __name__ == "__main__":
    import tempfile

    checks = [v for k, v in globals().items() if k.startswith("criterion_")]
    failed = 0
    for fn in checks:
        try:
            if fn is criterion_10_full_zoo:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)

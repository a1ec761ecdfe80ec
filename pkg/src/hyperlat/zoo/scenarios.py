"""The scenario zoo: each entry rebuilds one example or result at desk scale.

Every scenario is a (build, run) pair registered with its defaults and its
declarative expectations.  Provenance notes name the example or result the
expected value comes from, or the oracle that produced it.
"""

import math

import numpy as np

from ..embedding import (
    SampledMetricPoset,
    canonical_ideal,
    converges_by_ratio,
    forward_continuity_probe,
    inverse_continuity_probe,
    order_connectedness_probe,
    radially_convex_metric,
    remetrized_distance,
    whole_window,
)
from ..errors import InputError
from ..fixedpoint import NAMED_MAPS, brute_force_fixed_points, filtered_inf_check, tk_iterate
from ..hyperspace import FellNbhd, Region, SetSequence, fell_basic_convexity, fell_membership, inclusion_preservation_check, kp_check
from ..metric import MetricContext, dist_point_set, hausdorff, intersection, make_set, union
from ..order import FinitePoset, meet_table
from ..pogroup import PoGroup, SymMatrix, antilattice_probe, ideal_product_check, loewner_leq, sym_grid, validate_pogroup
from . import generators
from .registry import Expect, Outcome, register


def fitted_radii(horizon: int, top: float = 0.5) -> list:
    """Halving radii from ``top`` down to the finest scale the tail can resolve.

    Terms from the tail start on sit within about 1/tail_start of their
    limit in the 1/n-type sequences of the zoo, so radii below that would
    test the truncation rather than the example.
    """
    start = horizon - max(2, horizon // 4) + 1
    radii = [top]
    while radii[-1] / 2 >= 1.5 / start:
        radii.append(radii[-1] / 2)
    return radii


def _grid(lo, hi, step):
    n = int(round((hi - lo) / step))
    return lo + step * np.arange(n + 1)


def _pt(p):
    return [float(c) + 0.0 for c in np.ravel(p)]


def _poset_from_points(space: SampledMetricPoset) -> FinitePoset:
    P = space.sample.points
    m = space.leq_matrix(P, P)
    elements = [tuple(float(c) for c in p) for p in P]
    return FinitePoset(elements, frozenset((elements[i], elements[j]) for i, j in zip(*np.nonzero(m))))


# -- ex-4.1 -----------------------------------------------------------------------------


def _exp_41(p):
    note = "Example 'start': the open ball of radius 1/2 around (0,-1)"
    return [
        Expect("forward_passes", "false", note=note),
        Expect("witness_center", "approx", [0.0, -1.0], 1e-12, note),
        Expect("witness_radius", "approx", 0.5, 1e-12, note),
        Expect("max_distance_error", "le", p["tol"], note="closed form sqrt(1 + 1/n^2), n = 1..10"),
        Expect("symmetric_forward_passes", "true", note="footnote embedding (a,b) -> (a,b)down U (b,a)down"),
        Expect("symmetric_inverse_passes", "true", note="footnote embedding (a,b) -> (a,b)down U (b,a)down"),
    ]


@register(
    "ex-4.1-L-embedding-fails",
    "the L-shaped continuum: x -> x(down) is not continuous at the corner",
    {"grid_step": 1 / 16, "horizon": 64, "tol": 1e-9, "hit_radius": 0.5},
    _exp_41,
    notes=("L = [-1,0]x{0} U {0}x[-1,0], sampled on a grid; x_n = (-1/n, 0) approaches the corner (0,0)",),
)
def _ex41():
    def build(p):
        ctx = MetricContext(2, [(-1.0, 0.0), (-1.0, 0.0)], tol=p["tol"])
        g = _grid(-1.0, 0.0, p["grid_step"])
        pts = np.vstack([np.c_[g, np.zeros_like(g)], np.c_[np.zeros_like(g), g]])
        on_l = lambda q: bool(ctx.contains(q)[0]) and (abs(q[0]) <= ctx.tol or abs(q[1]) <= ctx.tol)
        space = SampledMetricPoset(ctx, make_set(ctx, pts, "L"), carrier=on_l, flags={"lattice"})
        n = np.arange(1, p["horizon"] + 1)
        xs = np.c_[-1.0 / n, np.zeros_like(n, dtype=float)]
        return {"space": space, "xs": xs, "x": np.zeros(2)}

    def run(m, p):
        space, xs, x = m["space"], m["xs"], m["x"]
        ctx = space.ctx
        fwd = forward_continuity_probe(space, xs, x, hit_radius=p["hit_radius"])
        errs = [
            abs(dist_point_set(ctx, (0.0, -1.0), canonical_ideal(space, (-1.0 / n, 0.0))) - math.sqrt(1 + 1 / n**2))
            for n in range(1, 11)
        ]

        def sym(q):
            return union(ctx, [canonical_ideal(space, q), canonical_ideal(space, q[::-1])], "sym")

        radii = fitted_radii(len(xs))
        sfwd = forward_continuity_probe(space, xs, x, hit_radius=p["hit_radius"], embedding=sym)
        sinv = inverse_continuity_probe(space, xs, x, embedding=sym, ball_radii=radii)
        w = fwd.witness or {}
        return Outcome(
            {
                "forward_passes": fwd.passed,
                "forward_stage": fwd.stage,
                "witness_center": _pt(w.get("center", ())),
                "witness_radius": w.get("radius", float("nan")),
                "max_distance_error": max(errs),
                "symmetric_forward_passes": sfwd.passed,
                "symmetric_inverse_passes": sinv.passed,
            },
            {"forward": w, "kp_radii": radii},
        )

    return build, run


# -- ex-4.4 -----------------------------------------------------------------------------


def _exp_44(p):
    note = "F = {beta <= ln alpha}; (0,0)down misses F while every (1/n,0)down meets it"
    return [
        Expect("origin_ideal_misses_K", "true", note=note),
        Expect(
            "terms_meeting_K",
            "eq",
            min(p["horizon"], math.floor(math.exp(p["window"]))),
            note=note + "; inside the window only n <= e^w have (1/n, ln 1/n) in view",
        ),
        Expect("fell_forward_passes", "true", note="continuity of x -> x(down) for a topological semilattice"),
    ]


@register(
    "ex-4.4-vietoris-fails",
    "the plane: (1/n,0)(down) does not converge to (0,0)(down) in the upper Vietoris sense",
    {"window": 5.0, "grid_step": 1 / 4, "beta_step": 1 / 16, "horizon": 64, "boxes": 400},
    _exp_44,
    notes=(
        "F is windowed to a compact union K of closed boxes [a_i, a_i+1] x [-w, ln a_i] inside F",
        "the Fell probe uses the default battery: hit balls at ideal points, compact miss balls off the ideal",
    ),
)
def _ex44():
    def build(p):
        w = p["window"]
        ctx = MetricContext(2, [(-w, w), (-w, w)])
        alphas = np.geomspace(math.exp(-w), w, p["boxes"] + 1)
        boxes = [
            Region.closed_box((a, -w), (b, math.log(a))) for a, b in zip(alphas, alphas[1:]) if math.log(a) >= -w
        ]
        K = Region.union_of(*boxes)
        grids = (_grid(-w, w, p["grid_step"]), _grid(-w, w, p["beta_step"]))
        fine = SampledMetricPoset(
            ctx, make_set(ctx, [[0.0, 0.0]]), axis_grids=grids, carrier=whole_window(ctx), flags={"lattice"}
        )
        g = _grid(-w, w, p["grid_step"])
        mesh = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
        coarse = SampledMetricPoset(ctx, make_set(ctx, mesh, "grid"), carrier=whole_window(ctx), flags={"lattice"})
        n = np.arange(1, p["horizon"] + 1)
        xs = np.c_[1.0 / n, np.zeros(len(n))]
        return {"K": K, "fine": fine, "coarse": coarse, "xs": xs}

    def run(m, p):
        ctx = m["fine"].ctx
        miss = FellNbhd((), m["K"])
        origin = fell_membership(ctx, canonical_ideal(m["fine"], (0.0, 0.0)), miss)
        meeting, first_hit = 0, None
        for q in m["xs"]:
            r = fell_membership(ctx, canonical_ideal(m["fine"], q), miss)
            if not r.miss_ok:
                meeting += 1
                first_hit = first_hit or r.miss_point
        fwd = forward_continuity_probe(m["coarse"], m["xs"], (0.0, 0.0))
        return Outcome(
            {
                "origin_ideal_misses_K": origin.miss_ok,
                "terms_meeting_K": meeting,
                "fell_forward_passes": fwd.passed,
                "fell_neighborhoods_checked": fwd.details.get("neighborhoods_checked", 0),
            },
            {"first_point_in_K": first_hit, "boxes": len(m["K"].parts)},
        )

    return build, run


# -- ex-4.5 -----------------------------------------------------------------------------


def _five_case(x, k):
    """x meet (0,-k) in X, by the example's case table."""
    a, b = x
    if a == -1.0:
        return x if b <= -k else (-1.0, float(-k))
    if a < -1.0 / k:
        return (-1.0, float(-k))
    return (a, float(-k)) if b >= -k else x


def _exp_45(p):
    note = "H((-1/n,-1)down, (0,-1)down) = 1 for every n >= 2"
    return [
        Expect("hausdorff", "approx", [1.0] * (p["n"] - 1), p["tol"], note),
        Expect("five_case_mismatches", "eq", 0, note="the example's five-case meet table vs brute-force meets"),
        Expect("meet_table_complete", "true", note="brute-force oracle: the truncated carrier is a meet-semilattice"),
    ]


@register(
    "ex-4.5-hausdorff-fails",
    "a locally compact semilattice where x -> x(down) is Hausdorff-discontinuous",
    {"n": 10, "k_max": 20, "tol": 1e-9},
    _exp_45,
    notes=("X = A U B U C_2 U ... U C_kmax with k <= k_max; measured for n = 2..n",),
)
def _ex45():
    def build(p):
        K = p["k_max"]
        if not 2 <= p["n"] < K:
            raise InputError("need 2 <= n < k_max")
        pts = [(-1.0, -k) for k in range(1, K + 1)] + [(0.0, -k) for k in range(1, K + 1)]
        pts += [(-1.0 / m, -k) for m in range(2, K + 1) for k in range(1, m + 1)]
        ctx = MetricContext(2, [(-1.0, 0.0), (-float(K), -1.0)], tol=p["tol"])
        space = SampledMetricPoset(ctx, make_set(ctx, pts, "X"), flags={"lattice", "locally_compact"})
        return {"space": space}

    def run(m, p):
        space = m["space"]
        ctx = space.ctx
        top = canonical_ideal(space, (0.0, -1.0))
        H = [hausdorff(ctx, canonical_ideal(space, (-1.0 / n, -1.0)), top) for n in range(2, p["n"] + 1)]
        poset = _poset_from_points(space)
        table = meet_table(poset)
        E = poset.elements
        mismatches, first = 0, None
        for i, x in enumerate(E):
            if x[0] == 0.0:
                continue
            for k in range(1, p["k_max"] + 1):
                got = E[table[i, poset.index((0.0, float(-k)))]]
                if got != _five_case(x, k):
                    mismatches += 1
                    first = first or (x, k, got)
        return Outcome(
            {
                "hausdorff": H,
                "carrier_size": len(E),
                "five_case_mismatches": mismatches,
                "meet_table_complete": bool((table >= 0).all()),
            },
            {"first_mismatch": first},
        )

    return build, run


# -- ex-4.6 -----------------------------------------------------------------------------


def _exp_46(p):
    note = "(1/n,1)down K-P converges to 0(down) but (1/n,1) does not converge to 0"
    return [
        Expect("kp_converges", "true", note=note),
        Expect("inverse_passes", "false", note=note),
        Expect("inf_tail_distance", "ge", 1.0, 1e-12, note="|(1/n,1) - 0| >= 1"),
    ]


@register(
    "ex-4.6-not-locally-compact",
    "open quadrants plus the origin: the inverse map fails without local compactness",
    {"window": 2.0, "grid_step": 1 / 16, "horizon": 64},
    _exp_46,
    notes=(
        "the quadrant grid is offset by half a step so no sample point sits on an axis",
        "gap_distance(p) = min(|p_x|, |p_y|): the distance to the removed axes",
    ),
)
def _ex46():
    def build(p):
        w, s = p["window"], p["grid_step"]
        half = s / 2 + s * np.arange(int(round(w / s)))
        pos = np.stack(np.meshgrid(half, half, indexing="ij"), axis=-1).reshape(-1, 2)
        pts = np.vstack([pos, -pos, [[0.0, 0.0]]])
        ctx = MetricContext(2, [(-w, w), (-w, w)])

        def carrier(q):
            q = np.ravel(q)
            inside = bool(ctx.contains(q)[0])
            return inside and (bool((q > 0).all()) or bool((q < 0).all()) or bool((q == 0).all()))

        def gap(q):
            q = np.ravel(q)
            return 0.0 if (q == 0).all() else float(np.abs(q).min())

        space = SampledMetricPoset(ctx, make_set(ctx, pts, "X"), carrier=carrier, gap_distance=gap, flags={"lattice"})
        n = np.arange(1, p["horizon"] + 1)
        return {"space": space, "xs": np.c_[1.0 / n, np.ones(len(n))]}

    def run(m, p):
        space, xs = m["space"], m["xs"]
        radii = fitted_radii(len(xs))
        seq = SetSequence(space.ctx, [canonical_ideal(space, q) for q in xs])
        kp = kp_check(seq, canonical_ideal(space, (0.0, 0.0)), radii, gap_distance=space.gap_distance)
        inv = inverse_continuity_probe(space, xs, (0.0, 0.0), ball_radii=radii)
        return Outcome(
            {
                "kp_converges": kp.converges,
                "inverse_passes": inv.passed,
                "inverse_stage": inv.stage,
                "inf_tail_distance": inv.details["inf_tail_distance"],
            },
            {"kp_radii": radii, "tail_start": kp.tail_start},
        )

    return build, run


# -- ex-4.7 -----------------------------------------------------------------------------


def _exp_47(p):
    note = "x_n(down) = {0, x_n} K-P converges to {0} while x_n runs off"
    return [
        Expect("kp_converges", "true", note=note),
        Expect("inverse_passes", "false", note=note),
        Expect("disconnected_intervals", "eq", p["horizon"], note="[0, x_n] = {0, x_n} is not connected"),
    ]


@register(
    "ex-4.7-disconnected-intervals",
    "a discrete semilattice {0, x_1, x_2, ...}: the inverse map fails without connected intervals",
    {"horizon": 64, "eps": 0.5},
    _exp_47,
    notes=("x_n = (1/n, n); the carrier is discrete, so gap_distance is 0 everywhere",),
)
def _ex47():
    def build(p):
        N = p["horizon"]
        n = np.arange(1, N + 1)
        xs = np.c_[1.0 / n, n.astype(float)]
        ctx = MetricContext(2, [(0.0, 1.0), (0.0, float(N))])
        space = SampledMetricPoset(
            ctx, make_set(ctx, np.vstack([[[0.0, 0.0]], xs]), "X"), gap_distance=lambda q: 0.0, flags={"semilattice", "locally_compact"}
        )
        return {"space": space, "xs": xs}

    def run(m, p):
        space, xs = m["space"], m["xs"]
        radii = fitted_radii(len(xs))
        zero = canonical_ideal(space, (0.0, 0.0))
        seq = SetSequence(space.ctx, [canonical_ideal(space, q) for q in xs])
        kp = kp_check(seq, zero, radii, gap_distance=space.gap_distance)
        inv = inverse_continuity_probe(space, xs, (0.0, 0.0), ball_radii=radii)
        probes = [order_connectedness_probe(space, (0.0, 0.0), q, p["eps"]) for q in xs]
        return Outcome(
            {
                "kp_converges": kp.converges,
                "inverse_passes": inv.passed,
                "ideal_sizes": sorted({len(A) for A in seq.terms}),
                "disconnected_intervals": sum(not r.passed for r in probes),
            },
            {"first_interval_components": probes[0].witness},
        )

    return build, run


# -- ex-4.8 -----------------------------------------------------------------------------


def _a_vectors(M):
    half = M // 2
    a0 = np.zeros(M)
    a0[1::2] = 1.0 / np.arange(1, half + 1)  # coordinate 2k holds 1/k
    rows = [a0]
    for n in range(1, half + 1):
        a = a0.copy()
        a[2 * n - 2], a[2 * n - 1] = 1.0 / n, 0.0
        rows.append(a)
    return np.array(rows)


def _exp_48(p):
    half = p["dims"] // 2
    note = "||a_n - a_0|| = sqrt(2)/n and a_n(down) meet a_0(down) = {0}"
    diam = math.sqrt(sum(1 / k**2 for k in range(1, half + 1)))
    return [
        Expect("norm_diffs", "approx", [math.sqrt(2) / n for n in range(1, half + 1)], p["tol"], note),
        Expect("intersection_is_origin", "true", note=note),
        Expect("self_intersection_diameter", "approx", diam, p["tol"], "a_0(down) is the segment [0, a_0]"),
        Expect("hausdorff_within_norm", "true", note="H(a_n(down), a_0(down)) <= ||a_n - a_0||"),
    ]


@register(
    "ex-4.8-l2-intersection",
    "l2 segments through a_n: intersection of ideals is not continuous",
    {"dims": 16, "grid_step": 1 / 16, "tol": 1e-9},
    _exp_48,
    notes=(
        "l2 is truncated to the first `dims` coordinates; a_n - a_0 touches two of them, so sqrt(2)/n is exact",
        "the truncation drops sum_{k > dims/2} 1/k^2 from |a_0|^2; see truncation_tail",
    ),
)
def _ex48():
    def build(p):
        M = p["dims"]
        if M < 2 or M % 2:
            raise InputError("dims must be a positive even number")
        A = _a_vectors(M)
        alphas = _grid(0.0, 1.0, p["grid_step"])
        pts = (alphas[None, :, None] * A[:, None, :]).reshape(-1, M)
        ctx = MetricContext(M, [(0.0, 1.0)] * M, tol=p["tol"])
        space = SampledMetricPoset(ctx, make_set(ctx, pts, "X"), flags={"semilattice", "order_connected"})
        return {"space": space, "A": A}

    def run(m, p):
        space, A = m["space"], m["A"]
        ctx = space.ctx
        ideals = [canonical_ideal(space, a) for a in A]
        cuts = [intersection(ctx, [I, ideals[0]]) for I in ideals[1:]]
        only_origin = all(len(c) == 1 and np.allclose(c.points[0], 0.0) for c in cuts)
        self_cut = intersection(ctx, [ideals[0], ideals[0]])
        diam = float(ctx.pairwise(self_cut.points, self_cut.points).max())
        norms = [float(np.linalg.norm(a - A[0])) for a in A[1:]]
        H = [hausdorff(ctx, I, ideals[0]) for I in ideals[1:]]
        half = p["dims"] // 2
        tail = math.pi**2 / 6 - sum(1 / k**2 for k in range(1, half + 1))
        return Outcome(
            {
                "norm_diffs": norms,
                "intersection_is_origin": only_origin,
                "self_intersection_diameter": diam,
                "hausdorff": H,
                "hausdorff_within_norm": all(h <= d + ctx.tol for h, d in zip(H, norms)),
                "truncation_tail": math.sqrt(tail),
            },
            {"intersection_sizes": [len(c) for c in cuts]},
        )

    return build, run


# -- ex-5.3 -----------------------------------------------------------------------------


def _exp_53(p):
    note = "f(1 meet 1/2 meet 1/3 ...) = -1 while f(1) meet f(1/2) meet ... = 0"
    return [
        Expect("f_of_inf_S", "eq", -1.0, note=note),
        Expect("inf_fS", "eq", 0.0, note=note),
        Expect("preserved", "false", note=note),
        Expect("inverse_passes", "false", note="{-1} U (0,1] is not locally compact at the gap"),
    ]


@register(
    "ex-5.3-gap-infimum",
    "the identity {-1} U (0,1] -> {-1} U [0,1] does not preserve a filtered infimum",
    {"horizon": 64, "grid_step": 1 / 16},
    _exp_53,
    notes=(
        "the infima of {1/k} are declared: -1 in the domain, 0 in the codomain; no finite sample reaches them",
        "inverse probe on x_n = 1/n in {-1} U (0,1] with gap_distance(p) = p",
    ),
)
def _ex53():
    def build(p):
        N = p["horizon"]
        S = [1.0 / k for k in range(1, N + 1)]
        A_el = [-1.0] + S
        grid = list(_grid(0.0, 1.0, p["grid_step"]))
        B_el = list(dict.fromkeys([-1.0] + S + grid))
        A = FinitePoset.from_predicate(A_el, lambda a, b: a <= b)
        B = FinitePoset.from_predicate(B_el, lambda a, b: a <= b)
        ctx = MetricContext(1, [(-1.0, 1.0)])
        pos = _grid(0.0, 1.0, p["grid_step"])[1:]
        space = SampledMetricPoset(
            ctx,
            make_set(ctx, np.r_[-1.0, pos][:, None], "X"),
            carrier=lambda q: float(np.ravel(q)[0]) == -1.0 or 0.0 < float(np.ravel(q)[0]) <= 1.0,
            gap_distance=lambda q: max(float(np.ravel(q)[0]), 0.0),
            flags={"lattice"},
        )
        return {"A": A, "B": B, "S": S, "space": space}

    def run(m, p):
        v = filtered_inf_check(m["A"], m["B"], lambda x: x, m["S"], declared_inf_S=-1.0, declared_inf_fS=0.0)
        xs = np.array([[1.0 / n] for n in range(1, p["horizon"] + 1)])
        radii = fitted_radii(len(xs))
        inv = inverse_continuity_probe(m["space"], xs, (-1.0,), ball_radii=radii)
        return Outcome(
            {
                "filtered": v.filtered.ok,
                "f_of_inf_S": v.f_of_inf_S,
                "inf_fS": v.inf_fS,
                "preserved": v.preserved,
                "declared": v.declared,
                "inverse_passes": inv.passed,
            },
            {"inverse": inv.witness, "kp_radii": radii},
        )

    return build, run


# -- ex-5.10 ----------------------------------------------------------------------------


def _exp_510(p):
    note = "f(x,y) = x + y, f((0,1) meet (1,0)) = 0 while f(0,1) meet f(1,0) = 1"
    return [
        Expect("f_of_inf_S", "eq", 0.0, note=note),
        Expect("inf_fS", "eq", 1.0, note=note),
        Expect("filtered", "false", note="{(0,1), (1,0)} has no lower bound inside itself"),
        Expect("homomorphism_ok", "false", note=note),
    ]


@register(
    "ex-5.10-not-homomorphism",
    "x + y on [-1,1]^2 preserves order but not meets",
    {"grid_step": 1 / 8},
    _exp_510,
    notes=("both lattices are sampled on the same dyadic step, so every sum lands on the codomain grid",),
)
def _ex510():
    def build(p):
        g = _grid(-1.0, 1.0, p["grid_step"])
        dom = [(float(a), float(b)) for a in g for b in g]
        cod = [float(c) for c in _grid(-2.0, 2.0, p["grid_step"])]
        D = np.array(dom)
        m = (D[:, None, :] <= D[None, :, :]).all(axis=2)
        A = FinitePoset(dom, frozenset((dom[i], dom[j]) for i, j in zip(*np.nonzero(m))))
        B = FinitePoset.from_predicate(cod, lambda a, b: a <= b)
        return {"A": A, "B": B}

    def run(m, p):
        v = filtered_inf_check(m["A"], m["B"], lambda q: q[0] + q[1], [(0.0, 1.0), (1.0, 0.0)])
        return Outcome(
            {
                "inf_S": list(v.inf_S),
                "f_of_inf_S": v.f_of_inf_S,
                "inf_fS": v.inf_fS,
                "filtered": v.filtered.ok,
                "homomorphism_ok": v.homomorphism_ok,
            },
            {"homomorphism_witness": v.homomorphism_witness},
        )

    return build, run


# -- thm-5.11 ---------------------------------------------------------------------------


def _exp_511(p):
    oracle = "brute-force fixed-point oracle"
    return [
        Expect("chain_fixed_points", "eq", [3, 0], note=oracle + " on the registered chains"),
        Expect("chain_max_steps", "le", 6, note="downward iteration on a chain of length <= 10"),
        Expect("random_outside_oracle", "eq", 0, note=oracle),
        Expect("random_unconverged", "eq", 0, note="a decreasing chain in a finite lattice stalls"),
    ]


@register(
    "thm-5.11-fixed-point",
    "downward iteration from a deflationary point reaches a fixed point",
    {"seed": 42, "trials": 100, "size": 6},
    _exp_511,
    notes=("chains: max(x-2, 3) on 0..10 from 10, and x // 2 on 0..8 from 8",),
)
def _thm511():
    def build(p):
        chain10 = FinitePoset.from_predicate(range(11), lambda a, b: a <= b)
        chain8 = FinitePoset.from_predicate(range(9), lambda a, b: a <= b)
        chains = [
            (chain10, NAMED_MAPS["shift-clamp"](2, 3), 10),
            (chain8, NAMED_MAPS["halve"](), 8),
        ]
        rng = np.random.default_rng(p["seed"])
        cases = []
        for _ in range(p["trials"]):
            L = generators.random_lattice(rng, p["size"])
            f = generators.random_monotone_map(rng, L)
            cases.append((L, f, generators.deflation_start(rng, L, f)))
        return {"chains": chains, "cases": cases}

    def run(m, p):
        fixed, steps, traces = [], [], []
        for poset, f, x0 in m["chains"]:
            t = tk_iterate(poset, f, x0)
            oracle = brute_force_fixed_points(poset, f)
            fixed.append(t.fixed_point if len(oracle) == 1 and t.fixed_point in oracle else None)
            steps.append(t.steps)
            traces.append(t.states)
        outside = unconverged = 0
        for L, f, x0 in m["cases"]:
            t = tk_iterate(L, f, x0)
            if not t.converged:
                unconverged += 1
            elif t.fixed_point not in brute_force_fixed_points(L, f):
                outside += 1
        return Outcome(
            {
                "chain_fixed_points": fixed,
                "chain_steps": steps,
                "chain_max_steps": max(steps),
                "random_trials": len(m["cases"]),
                "random_outside_oracle": outside,
                "random_unconverged": unconverged,
            },
            {"chain_traces": traces},
        )

    return build, run


# -- thm-U-C ----------------------------------------------------------------------------


def _uc_sequences(length):
    n = np.arange(1, length + 1, dtype=float)[:, None]
    x = np.array([0.5, 0.5])
    return {
        "from-above": (x + np.c_[1 / n, 1 / n] / 4, x, True),
        "from-below": (x - np.c_[1 / n, 1 / n] / 4, x, True),
        "toward-origin": (np.c_[1 / n, 1 / n] / 2, np.zeros(2), True),
        "constant-offset": (np.tile(x + [0.25, 0.0], (length, 1)), x, False),
        "alternating": (x + np.c_[(np.arange(length) % 2) * 0.25, np.zeros(length)], x, False),
    }


def _exp_uc(p):
    note = "every point of a locally compact order-connected semilattice gets a radially convex remetrization"
    return [
        Expect("is_metric", "true", note=note),
        Expect("radial_violations", "eq", 0, note=note),
        Expect("sequence_agreements", "eq", 5, note="D-convergence matches Euclidean convergence on 5 sequences"),
    ]


@register(
    "thm-U-C-remetrization",
    "D(x, y) = rho(x(down), y(down)) on a grid of the unit square is a radially convex metric",
    {"grid_step": 1 / 16, "horizon": 64, "seq_len": 32},
    _exp_uc,
    notes=("the Wijsman sum is truncated at the horizon; metric checks allow 2^-horizon + 1e-12",),
)
def _thm_uc():
    def build(p):
        ctx = MetricContext(2, [(0.0, 1.0), (0.0, 1.0)])
        g = _grid(0.0, 1.0, p["grid_step"])
        mesh = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
        space = SampledMetricPoset(
            ctx, make_set(ctx, mesh, "grid"), axis_grids=(g, g), carrier=whole_window(ctx), flags={"lattice", "locally_compact", "order_connected"}
        )
        return {"space": space, "sequences": _uc_sequences(p["seq_len"])}

    def run(m, p):
        space = m["space"]
        rm = radially_convex_metric(space, p["horizon"])
        cert = rm.certificate
        agree, detail = 0, {}
        for name, (xs, x, converges) in m["sequences"].items():
            D = [remetrized_distance(space, q, x, p["horizon"]) for q in xs]
            E = np.linalg.norm(xs - x, axis=1)
            d_conv, e_conv = converges_by_ratio(D), converges_by_ratio(E)
            agree += d_conv == e_conv and e_conv == converges
            detail[name] = {"D_converges": d_conv, "euclid_converges": e_conv, "last_D": D[-1]}
        return Outcome(
            {
                "is_metric": cert.is_metric,
                "triangle_violations": cert.triangle_violations,
                "radial_triples": cert.radial.n_triples,
                "radial_violations": cert.radial.n_violations,
                "truncation_bound": cert.truncation_bound,
                "sequence_agreements": agree,
            },
            {"sequences": detail, "radial_witness": cert.radial.witness},
        )

    return build, run


# -- prop-And ---------------------------------------------------------------------------


def _exp_and(p):
    return [
        Expect("violations", "eq", 0, note="basic Fell sets are convex under inclusion"),
        Expect("cases", "eq", p["trials"], note="randomized law suite"),
    ]


@register(
    "prop-And-basis-convexity",
    "basic Fell neighborhoods are convex for inclusion: A in C in B",
    {"seed": 42, "trials": 1000},
    _exp_and,
    notes=("hit balls are centred in A and the miss ball avoids B, so most cases are non-vacuous",),
)
def _prop_and():
    def build(p):
        ctx = MetricContext(2, [(0.0, 1.0), (0.0, 1.0)])
        rng = np.random.default_rng(p["seed"])
        cases = []
        for _ in range(p["trials"]):
            hits, miss, A, B, C = generators.convexity_case(rng, ctx)
            nb = FellNbhd(
                tuple(Region.open_ball(c, r) for c, r in hits), Region.closed_ball(*miss) if miss else None
            )
            cases.append((nb, A, B, C))
        return {"ctx": ctx, "cases": cases}

    def run(m, p):
        bad = vacuous = 0
        first = None
        for nb, A, B, C in m["cases"]:
            v = fell_basic_convexity(m["ctx"], nb, A, B, C)
            vacuous += v.vacuous
            if not v.ok:
                bad += 1
                first = first or v.violated_clause
        return Outcome(
            {"cases": len(m["cases"]), "violations": bad, "non_vacuous": len(m["cases"]) - vacuous},
            {"first_violation": first},
        )

    return build, run


# -- pogroup ----------------------------------------------------------------------------


def _int_group(dim, half):
    g = np.arange(-half, half + 1, dtype=float)
    mesh = np.stack(np.meshgrid(*([g] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    ctx = MetricContext(dim, [(-float(half), float(half))] * dim)
    space = SampledMetricPoset(ctx, make_set(ctx, mesh, f"Z^{dim}"), flags={"lattice", "locally_compact"})
    return PoGroup(space)


def _safe_pairs(lo, hi, dim):
    g = np.arange(lo, hi + 1, dtype=float)
    pts = np.stack(np.meshgrid(*([g] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    return [(x, y) for x in pts for y in pts if ((x + y >= lo) & (x + y <= hi)).all()]


def _exp_pg(p):
    note = "ideals of a po-group multiply: x(down) y(down) = (xy)(down)"
    return [
        Expect("z_failures", "eq", 0, note=note),
        Expect("z2_failures", "eq", 0, note=note),
        Expect("z_valid", "true", note="Z with the usual order is a po-group"),
        Expect("z2_valid", "true", note="Z^2 with the coordinatewise order is a po-group"),
        Expect("doubling_valid", "false", note="negative control: x <= y <= 2x is not translation invariant"),
        Expect("r2_forward_passes", "true", note="po-group embedding is continuous on R^2"),
        Expect("r2_inverse_passes", "true", note="R^2 is locally compact and order-connected"),
    ]


@register(
    "pogroup-Z2-ideals",
    "ideal products in Z and Z^2, po-group validation, and a vector-space embedding check",
    {"grid_step": 1 / 16, "horizon": 64},
    _exp_pg,
    notes=(
        "Z: carrier [-20,20], safe window [-8,5]; Z^2: carrier [-8,8]^2, safe window [-3,2]^2",
        "the doubling order is sampled on {0.5, 1, ..., 4} inside [-4,4] so negative shifts exist",
    ),
)
def _pogroup():
    def build(p):
        Z, Z2 = _int_group(1, 20), _int_group(2, 8)
        dctx = MetricContext(1, [(-4.0, 4.0)])
        dspace = SampledMetricPoset(
            dctx, make_set(dctx, _grid(0.5, 4.0, 0.5)[:, None]), leq_rule="custom-predicate", predicate_id="doubling"
        )
        rctx = MetricContext(2, [(-1.0, 1.0), (-1.0, 1.0)])
        g = _grid(-1.0, 1.0, p["grid_step"])
        mesh = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
        r2 = SampledMetricPoset(
            rctx, make_set(rctx, mesh, "R^2"), axis_grids=(g, g), carrier=whole_window(rctx), flags={"lattice", "locally_compact", "order_connected"}
        )
        n = np.arange(1, p["horizon"] + 1)
        return {
            "Z": Z,
            "Z2": Z2,
            "doubling": PoGroup(dspace),
            "r2": r2,
            "xs": np.c_[1.0 / n, -1.0 / n],
            "z_pairs": _safe_pairs(-8, 5, 1),
            "z2_pairs": _safe_pairs(-3, 2, 2),
        }

    def run(m, p):
        out, wit = {}, {}
        for key, grp, pairs, box in (("z", m["Z"], m["z_pairs"], [(-8, 5)]), ("z2", m["Z2"], m["z2_pairs"], [(-3, 2)] * 2)):
            fails = [(_pt(x), _pt(y)) for x, y in pairs if not ideal_product_check(grp, x, y, box).ok]
            out[f"{key}_pairs"] = len(pairs)
            out[f"{key}_failures"] = len(fails)
            wit[f"{key}_first_failure"] = fails[0] if fails else None
            rep = validate_pogroup(grp)
            out[f"{key}_valid"] = rep.valid
        drep = validate_pogroup(m["doubling"])
        out["doubling_valid"] = drep.valid
        wit["doubling_violation"] = drep.violations[0] if drep.violations else None
        radii = fitted_radii(len(m["xs"]))
        out["r2_forward_passes"] = forward_continuity_probe(m["r2"], m["xs"], (0.0, 0.0)).passed
        out["r2_inverse_passes"] = inverse_continuity_probe(m["r2"], m["xs"], (0.0, 0.0), ball_radii=radii).passed
        return Outcome(out, wit)

    return build, run


# -- loewner ----------------------------------------------------------------------------


def _random_sym(rng, n):
    M = rng.normal(size=(n, n))
    return SymMatrix((M + M.T) / 2)


def _exp_lw(p):
    note = "symmetric matrices under the Loewner order form an antilattice"
    return [
        Expect("maximal_lower_bounds", "ge", 2, note=note),
        Expect("greatest_found", "false", note=note),
        Expect("translation_violations", "eq", 0, note="A <= B iff A + C <= B + C"),
        Expect("comparable_meet_is_lower", "true", note="for A <= B the meet is A"),
        Expect("identity_below_double", "true", note="I <= 2I in Sym(3)"),
    ]


@register(
    "loewner-antilattice",
    "the Loewner order has no meet for diag(1,0) and diag(0,1)",
    {"seed": 42, "trials": 1000, "grid_step": 0.25, "tol": 1e-9},
    _exp_lw,
    notes=("lower bounds are searched on the grid of symmetric 2x2 matrices with entries in [-1,1]",),
)
def _loewner():
    def build(p):
        rng = np.random.default_rng(p["seed"])
        triples = []
        for k in range(p["trials"]):
            n = 2 + k % 2
            A, C = _random_sym(rng, n), _random_sym(rng, n)
            R = rng.normal(size=(n, n))
            # half the pairs comparable by construction, half arbitrary
            B = A + SymMatrix(R @ R.T) if k % 4 < 2 else _random_sym(rng, n)
            triples.append((A, B, C))
        return {"grid": sym_grid(2, -1.0, 1.0, p["grid_step"]), "triples": triples}

    def run(m, p):
        tol = p["tol"]
        rep = antilattice_probe(SymMatrix(np.diag([1.0, 0.0])), SymMatrix(np.diag([0.0, 1.0])), m["grid"], tol)
        bad = comparable = 0
        for A, B, C in m["triples"]:
            before = loewner_leq(A, B, tol)
            comparable += before
            bad += before != loewner_leq(A + C, B + C, tol)
        zero, eye = SymMatrix(np.zeros((2, 2))), SymMatrix(np.eye(2))
        crep = antilattice_probe(zero, eye, m["grid"], tol)
        meet_ok = crep.greatest is not None and np.array_equal(m["grid"][crep.greatest].entries, zero.entries)
        return Outcome(
            {
                "lower_bounds": len(rep.lower_bounds),
                "maximal_lower_bounds": len(rep.maximal),
                "greatest_found": rep.greatest is not None,
                "translation_triples": len(m["triples"]),
                "comparable_triples": int(comparable),
                "translation_violations": int(bad),
                "comparable_meet_is_lower": bool(meet_ok),
                "identity_below_double": loewner_leq(SymMatrix(np.eye(3)), SymMatrix(2 * np.eye(3)), tol),
            },
            {"maximal": [m["grid"][i].entries.ravel().tolist() for i in rep.maximal], "message": rep.message},
        )

    return build, run


# -- ex-6.6 / 6.7 ----------------------------------------------------------------------


def _zero_ideal(M, ts):
    E = np.eye(M)
    return np.vstack([np.zeros((1, M))] + [-t * E for t in ts])


def _exp_l2g(p):
    note = "e_n(down) K-P converges to 0(down) while ||e_n|| = 1"
    return [
        Expect("real_kp_converges", "true", note=note),
        Expect("integer_kp_converges", "true", note="the same for square-summable integer sequences"),
        Expect("norms", "approx", [1.0] * p["dims"], 1e-12, note),
        Expect("inversion_ball_radius", "approx", 0.5, 0.0, "the open ball of radius 1/2 around 0 misses (-e_n)(down)"),
        Expect("inversion_hits", "eq", 0, note="no (-e_n)(down) meets that ball"),
        Expect("inversion_min_distance", "approx", 1.0, 1e-12, "d(0, (-e_n)(down)) = 1"),
    ]


@register(
    "ex-6.6/6.7-l2-groups",
    "l2 and its integer points: e_n(down) -> 0(down) in K-P, yet e_n does not converge",
    {"dims": 16},
    _exp_l2g,
    claim_kind="horizon",
    notes=(
        "l2 is truncated to `dims` coordinates and the sequence runs n = 1..dims",
        "0(down) is sampled along the negative axes: -t e_i for t in {1/4, 1/2, 3/4, 1} (reals) or {1, 2} (integers)",
        "the convergence half of the claim holds up to the horizon only",
    ),
)
def _l2_groups():
    def build(p):
        M = p["dims"]
        out = {}
        for key, ts, lo in (("real", (0.25, 0.5, 0.75, 1.0), -1.0), ("integer", (1.0, 2.0), -2.0)):
            ctx = MetricContext(M, [(lo, 1.0)] * M)
            S0 = _zero_ideal(M, ts)
            terms = [make_set(ctx, np.vstack([S0, np.eye(M)[n] + S0])) for n in range(M)]
            out[key] = (SetSequence(ctx, terms), make_set(ctx, S0, "zero-ideal"))
        ctx = MetricContext(M, [(-2.0, 1.0)] * M)
        S0 = _zero_ideal(M, (0.25, 0.5, 0.75, 1.0))
        out["inverted"] = (ctx, [make_set(ctx, -np.eye(M)[n] + S0) for n in range(M)])
        return out

    def run(m, p):
        radii = [0.5, 0.25, 0.125]
        out = {}
        for key in ("real", "integer"):
            seq, S0 = m[key]
            out[f"{key}_kp_converges"] = kp_check(seq, S0, radii).converges
        ctx, inv = m["inverted"]
        M = p["dims"]
        ball = FellNbhd((Region.open_ball(np.zeros(M), 0.5),))
        out["norms"] = [float(np.linalg.norm(e)) for e in np.eye(M)]
        out["inversion_ball_radius"] = 0.5
        out["inversion_hits"] = sum(fell_membership(ctx, A, ball).ok for A in inv)
        out["inversion_min_distance"] = min(dist_point_set(ctx, np.zeros(M), A) for A in inv)
        return Outcome(out, {"kp_radii": radii})

    return build, run


# -- extras -----------------------------------------------------------------------------


def _exp_wp(p):
    return [
        Expect("violations", "eq", 0, note="K-P limits preserve inclusion"),
        Expect("cases", "eq", p["trials"], note="randomized law suite"),
    ]


@register(
    "prop-whenposet-inclusion",
    "A_n inside B_n forces lim A_n inside lim B_n",
    {"seed": 42, "trials": 1000, "horizon": 16},
    _exp_wp,
    notes=("A_n = A + v/n and B_n = B U A_n with |v| <= 1; radii 1/2, 1/4, 1/8",),
)
def _whenposet():
    def build(p):
        ctx = MetricContext(2, [(-1.0, 2.0), (-1.0, 2.0)])
        rng = np.random.default_rng(p["seed"])
        cases = []
        for _ in range(p["trials"]):
            A = generators.random_cloud(rng, int(rng.integers(1, 5)))
            B = generators.random_cloud(rng, int(rng.integers(1, 5)))
            v = rng.uniform(-1, 1, 2)
            v /= max(1.0, float(np.linalg.norm(v)))
            An = [make_set(ctx, A + v / n) for n in range(1, p["horizon"] + 1)]
            Bn = [union(ctx, [make_set(ctx, B), a]) for a in An]
            cases.append((SetSequence(ctx, An), SetSequence(ctx, Bn), make_set(ctx, A), union(ctx, [make_set(ctx, A), make_set(ctx, B)])))
        return {"cases": cases}

    def run(m, p):
        bad, first = 0, None
        for sa, sb, la, lb in m["cases"]:
            v = inclusion_preservation_check(sa, sb, la, lb, ball_radii=[0.5, 0.25, 0.125])
            if not v.ok:
                bad += 1
                first = first or v.escaping_point
        return Outcome({"cases": len(m["cases"]), "violations": bad}, {"first_escape": first})

    return build, run


def _exp_lines(p):
    return [Expect("kp_converges", "true", note="the lines y = n x converge to the vertical axis in K-P")]


@register(
    "intro-lines-vertical-axis",
    "the lines y = n x K-P converge to the vertical axis (no Hausdorff convergence needed)",
    {"grid_step": 1 / 16, "horizon": 64},
    _exp_lines,
    claim_kind="horizon",
    notes=("lines and axis are sampled at the same heights in [-1,1]^2; radii 1/4 down to 1/32",),
)
def _lines():
    def build(p):
        ctx = MetricContext(2, [(-1.0, 1.0), (-1.0, 1.0)])
        ys = _grid(-1.0, 1.0, p["grid_step"])
        terms = [make_set(ctx, np.c_[ys / n, ys]) for n in range(1, p["horizon"] + 1)]
        axis = make_set(ctx, np.c_[np.zeros_like(ys), ys])
        return {"seq": SetSequence(ctx, terms), "axis": axis}

    def run(m, p):
        radii = [r for r in fitted_radii(p["horizon"]) if r <= 0.25]
        v = kp_check(m["seq"], m["axis"], radii)
        return Outcome({"kp_converges": v.converges, "tail_start": v.tail_start}, {"kp_radii": radii})

    return build, run

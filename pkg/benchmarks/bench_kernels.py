"""Compare the compiled and pure-Python kernel backends on representative inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--size small|medium|large]

Each row reports the best-of-N wall time per backend and the speedup.  The
outputs of both backends are also compared, so a row marked ``DIFF`` means the
backends disagree on that input.
"""

import argparse
import time

import numpy as np

from hyperlat.kernels import available_backends

SIZES = {"small": 0.5, "medium": 1.0, "large": 2.0}


def grid_metric(n_side):
    """Euclidean distances and the coordinatewise order on an n_side x n_side grid."""
    g = np.linspace(0, 1, n_side)
    P = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
    D = np.sqrt(((P[:, None] - P[None]) ** 2).sum(-1))
    leq = (P[:, None, :] <= P[None, :, :]).all(-1)
    return D, leq


def cases(scale, rng):
    n = int(2000 * scale)
    P, Q = rng.random((n, 3)), rng.random((n, 3))
    F = rng.random((int(400 * scale), 64))
    F[:, -8:] = np.inf  # empty sets in the tail of each profile
    w = 2.0 ** -np.arange(1, 65)
    D, leq = grid_metric(int(12 * scale**0.5) + 1)
    return [
        ("min_dists", lambda k: k.min_dists(P, Q)),
        ("profile_distance", lambda k: k.profile_distance(F, w)),
        ("radial_scan", lambda k: k.radial_scan(D, leq, 1e-12)),
        ("transitivity_scan", lambda k: k.transitivity_scan(leq)),
        ("triangle_scan", lambda k: k.triangle_scan(D, 1e-12)),
    ]


def best_of(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.allclose(a, b, rtol=0, atol=1e-12, equal_nan=True)
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", choices=sorted(SIZES), default="medium")
    args = ap.parse_args(argv)
    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; timing the python backend only")
    names = list(backends)
    print(f"{'kernel':<18}" + "".join(f"{b:>12}" for b in names) + f"{'speedup':>10}  check")
    for name, run in cases(SIZES[args.size], np.random.default_rng(0)):
        results = {b: best_of(lambda: run(backends[b]), args.repeat) for b in names}
        row = f"{name:<18}" + "".join(f"{results[b][0] * 1e3:>10.2f}ms" for b in names)
        if "cython" in results:
            speed = results["python"][0] / max(results["cython"][0], 1e-9)
            ok = same(results["python"][1], results["cython"][1])
            row += f"{speed:>9.1f}x  {'ok' if ok else 'DIFF'}"
        print(row)


if __name__ == "__main__":
    main()

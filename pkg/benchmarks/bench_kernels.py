"""Compiled vs pure-Python kernels: wall time per call and output equality.

    python benchmarks/bench_kernels.py [--repeat 3] [--scale 1.0]

Each case runs the same kernel with the same start state on both backends;
the outputs must agree exactly, otherwise the run exits nonzero.
"""

import argparse
import math
import sys
import time

import numpy as np

from grouprand import _pykernels
from grouprand._backend import ckernels
from grouprand.hyperbolic import cosh_minus_one
from grouprand.lattice import norm_sq_bound, padded_radius
from grouprand.rng import RandomStream
from grouprand.sl2z import radius_schedule, step_cap_for_bound


def cases(scale):
    s = lambda n: max(1, int(n * scale))  # noqa: E731
    X = 5.0
    R = radius_schedule(X, 0.01)
    return [
        ("fancy_fill X=5 eps=0.01", "fancy_fill",
         (norm_sq_bound(X), cosh_minus_one(R), step_cap_for_bound(X), s(200), 0)),
        ("ball_fill n=4", "ball_fill", (4, 3.0, s(20000))),
        ("lattice_fill n=4 X=3", "lattice_fill", (4, norm_sq_bound(3.0), padded_radius(4, 3.0), s(5000), False)),
        ("lattice_fill SL2Z X=10", "lattice_fill", (4, 100, padded_radius(4, 10.0), s(500), True)),
        ("walk_fill SL(2,3) L=50", "walk_fill", (2, 3, 50, s(5000))),
        ("rand_sl_fill SL(3,5)", "rand_sl_fill", (3, 5, s(5000))),
        ("rand_sp_fill Sp(4,2)", "rand_sp_fill", (2, 2, s(5000))),
        ("perm_fill n=20", "perm_fill", (20, s(5000))),
    ]


def same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    if isinstance(a, float) and math.isnan(a):
        return isinstance(b, float) and math.isnan(b)
    return a == b


def timed(fn, args, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        state = RandomStream(12345).getstate()
        t0 = time.perf_counter()
        out = fn(state, *args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0, help="multiply every batch size")
    args = ap.parse_args(argv)

    ck = ckernels()
    if ck is None:
        print("compiled kernels not built; nothing to compare", file=sys.stderr)
        return 1
    bad = 0
    print(f"{'kernel':28s} {'cython s':>10s} {'python s':>10s} {'speedup':>8s}  equal")
    for label, name, kargs in cases(args.scale):
        tc, oc = timed(getattr(ck, name), kargs, args.repeat)
        tp, op = timed(getattr(_pykernels, name), kargs, 1)
        eq = same(oc, op)
        bad += not eq
        print(f"{label:28s} {tc:10.4f} {tp:10.4f} {tp / tc:8.1f}  {'yes' if eq else 'NO'}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())

"""Command line: ``grouprand <sample|count|reduce|stats> <target> [flags]``.

Exit codes: 0 ok, 1 domain error (bad parameters for the chosen group),
2 usage error.
"""

from __future__ import annotations

import argparse
import itertools
import math
import sys

import numpy as np

from . import finite, lattice, orthogonal, records, sl2z, stats
from .fuchsian import GreedyReductionError, greedy_reduce, load_generator_file
from .hyperbolic import HPoint
from .rng import MASK64, RandomStream, entropy_seed

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2
SNAP_RTOL = 1e-6


class UsageError(Exception):
    pass


def resolve_norm_bound(X: float | None, K: int | None) -> tuple[float, int]:
    """Norm bound from the command line as (X, floor(X^2)).

    ``--norm-sq-bound K`` is exact. A decimal ``--norm-bound X`` whose square
    is within 1e-6 (relative) of an integer is read as the square root of
    that integer, so ``1.4142135`` means sqrt(2).
    """
    if K is not None:
        if K < 0:
            raise ValueError("norm bound must be non-negative")
        x = math.sqrt(K)
        while lattice.norm_sq_bound(x) < K:
            x = math.nextafter(x, math.inf)
        while lattice.norm_sq_bound(x) > K:
            x = math.nextafter(x, -math.inf)
        return x, K
    if X is None:
        X = 5.0
    if X < 0:
        raise ValueError("norm bound must be non-negative")
    k = round(X * X)
    if k > 0 and abs(X * X - k) <= SNAP_RTOL * k:
        return resolve_norm_bound(None, k)
    return X, lattice.norm_sq_bound(X)


def _point(text: str) -> HPoint:
    try:
        re, im = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}") from None
    try:
        return HPoint(re, im)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v <= MASK64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global")
    g.add_argument("--seed", type=_u64, help="u64 seed (random if omitted; echoed to stderr)")
    g.add_argument("--count", type=int, help="number of draws")
    g.add_argument("--format", choices=records.FORMATS, default="jsonl")
    g.add_argument("--out", help="write to this path instead of stdout")

    parser = argparse.ArgumentParser(prog="grouprand", description="Random elements of groups.")
    verbs = parser.add_subparsers(dest="verb", required=True, metavar="{sample,count,reduce,stats}")

    def norm_flags(p):
        p.add_argument("--norm-bound", type=float, help="Frobenius norm bound X (default 5)")
        p.add_argument("--norm-sq-bound", type=int, help="exact bound on the squared norm")

    def targets(verb, help_):
        vp = verbs.add_parser(verb, help=help_)
        return vp.add_subparsers(dest="target", required=True)

    sample = targets("sample", "draw group elements")
    p = sample.add_parser("sl2z", parents=[common], help="SL(2,Z) with bounded norm")
    norm_flags(p)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--naive", action="store_true", help="exact rejection sampler instead of disk reduction")
    p = sample.add_parser("lattice", parents=[common], help="integer points of a ball")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--radius", type=float, required=True)
    for name, help_ in (("slnp", "SL(n,p)"), ("sp", "Sp(2n,p)")):
        p = sample.add_parser(name, parents=[common], help=help_)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--p", type=int, required=True)
    p = sample.add_parser("walk", parents=[common], help="lazy transvection walk on SL(n,p)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p = sample.add_parser("perm", parents=[common], help="permutations of 1..n")
    p.add_argument("--n", type=int, required=True)
    p = sample.add_parser("orthogonal", parents=[common], help="Haar O(n)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--signed-permutation", action="store_true", help="sample O(n,Z) instead")
    p = sample.add_parser("so2-rational", parents=[common], help="rational rotations")
    p.add_argument("--max-denominator", type=int, required=True)

    count = targets("count", "exact counts")
    p = count.add_parser("sl2z", parents=[common], help="#SL(2,Z) elements of norm <= X")
    norm_flags(p)
    p = count.add_parser("visible", parents=[common], help="visible lattice points in a disk")
    p.add_argument("--max-radius", type=int, required=True)
    p = count.add_parser("rotations", parents=[common], help="rational rotations by denominator")
    p.add_argument("--max-denominator", type=int, required=True)

    reduce_ = targets("reduce", "reduce points to a fundamental domain")
    p = reduce_.add_parser("sl2z", parents=[common], help="Gauss reduction (write negative parts as --point=-x,y)")
    p.add_argument("--point", type=_point, required=True, metavar="RE,IM")
    p = reduce_.add_parser("fuchsian", parents=[common], help="greedy Dirichlet reduction")
    p.add_argument("--gens", required=True, help="JSON file of generators (and basepoint)")
    p.add_argument("--point", type=_point, required=True, metavar="RE,IM")
    p.add_argument("--basepoint", type=_point, metavar="RE,IM")
    p.add_argument("--max-steps", type=int, default=10**6)

    st = targets("stats", "uniformity report against the enumerated group")
    p = st.add_parser("sl2z", parents=[common])
    norm_flags(p)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--naive", action="store_true")
    for name in ("slnp", "sp"):
        p = st.add_parser(name, parents=[common])
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--p", type=int, required=True)
    p = st.add_parser("walk", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p = st.add_parser("perm", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p = st.add_parser("lattice", parents=[common])
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--radius", type=float, required=True)
    return parser


def _square(flat, n):
    return [list(map(int, flat[i * n:(i + 1) * n])) for i in range(n)]


def _sample(args, stream) -> list[records.MatrixRecord]:
    n = args.count if args.count is not None else 1
    if n < 0:
        raise UsageError("--count must be non-negative")
    t = args.target
    R = records.MatrixRecord
    if t == "sl2z":
        X, K = resolve_norm_bound(args.norm_bound, args.norm_sq_bound)
        if args.naive:
            batch = sl2z.pick_sl_naive_batch(X, n, stream)
            return [R("SL2Z", _square(m, 2), norm_sq=int(np.dot(m, m))) for m in batch.matrices]
        batch = sl2z.pick_fancy_batch(X, args.epsilon, n, stream)
        return [
            R("SL2Z", _square(m, 2), {"attempts": int(a)}, int(np.dot(m, m)))
            for m, a in zip(batch.matrices, batch.attempts)
        ]
    if t == "lattice":
        vecs = lattice.pick_lattice_vectors(args.dim, args.radius, n, stream)
        return [R(f"Z^{args.dim}", [list(map(int, v))], norm_sq=int(np.dot(v, v))) for v in vecs]
    if t == "slnp":
        out = finite.gen_rand_sl_batch(args.n, args.p, n, stream)
        return [R(f"SL({args.n},{args.p})", _square(m, args.n)) for m in out]
    if t == "sp":
        out = finite.gen_rand_sp_batch(args.n, args.p, n, stream)
        return [R(f"Sp({2 * args.n},{args.p})", _square(m, 2 * args.n)) for m in out]
    if t == "walk":
        out = finite.expander_walk_batch(args.n, args.p, args.length, n, stream)
        return [R(f"SL({args.n},{args.p})", _square(m, args.n), {"length": args.length}) for m in out]
    if t == "perm":
        out = finite.gen_perm_batch(args.n, n, stream)
        return [R(f"S{args.n}", [list(map(int, v))]) for v in out]
    if t == "orthogonal":
        if args.signed_permutation:
            return [R(f"O({args.n},Z)", orthogonal.random_signed_permutation(args.n, stream)) for _ in range(n)]
        return [R(f"O({args.n})", orthogonal.random_orthogonal(args.n, stream)) for _ in range(n)]
    if t == "so2-rational":
        out = []
        for _ in range(n):
            r = orthogonal.sample_rational_rotation(args.max_denominator, stream)
            out.append(R("SO(2,Q)", r.numerators(), {"denominator": r.q}))
        return out
    raise UsageError(f"unknown target {t}")


def _count(args) -> list[dict]:
    t = args.target
    if t == "sl2z":
        X, K = resolve_norm_bound(args.norm_bound, args.norm_sq_bound)
        N = sl2z.count_sl2z(X)
        return [{"norm_sq_bound": K, "X": X, "N": N, "N_over_X2": N / K if K else None}]
    if t == "visible":
        Q = args.max_radius
        c = orthogonal.visible_point_count(Q)
        return [{"Q": Q, "visible": c, "ratio_to_6Q2_over_pi": c / (6 / math.pi * Q * Q) if Q else None}]
    if t == "rotations":
        by_q: dict[int, int] = {}
        for r in orthogonal.enumerate_rational_rotations(args.max_denominator):
            by_q[r.q] = by_q.get(r.q, 0) + 1
        return [{"q": q, "rotations": c} for q, c in sorted(by_q.items())]
    raise UsageError(f"unknown target {t}")


def _reduce(args) -> list[dict]:
    z = args.point
    if args.target == "sl2z":
        red = sl2z.reduce2(z)
        return [{"matrix": red.A.rows(), "z0": [float(red.z0.re), float(red.z0.im)], "steps": red.steps}]
    gset = load_generator_file(args.gens, args.basepoint)
    trace = greedy_reduce(z, gset, args.max_steps)
    return [{
        "word": trace.word,
        "final_point": [trace.final_point.re, trace.final_point.im],
        "matrix": [[float(v) for v in row] for row in trace.M.rows()],
        "steps": trace.steps,
    }]


def _stats(args, stream) -> list[dict]:
    t = args.target
    if t == "sl2z":
        X, K = resolve_norm_bound(args.norm_bound, args.norm_sq_bound)
        support = [A.flat() for A in sl2z.enumerate_sl2z(X)]
        n = args.count or 20 * len(support)
        if args.naive:
            draws = sl2z.pick_sl_naive_batch(X, n, stream).matrices
        else:
            draws = sl2z.pick_fancy_batch(X, args.epsilon, n, stream).matrices
        gid = f"SL2Z(norm^2<={K})"
    elif t in ("slnp", "walk"):
        support = [tuple(r) for r in finite.enumerate_sl(args.n, args.p)]
        n = args.count or 20 * len(support)
        if t == "slnp":
            draws = finite.gen_rand_sl_batch(args.n, args.p, n, stream)
        else:
            draws = finite.expander_walk_batch(args.n, args.p, args.length, n, stream)
        gid = f"SL({args.n},{args.p})"
    elif t == "sp":
        support = [tuple(r) for r in finite.enumerate_sp(args.n, args.p)]
        n = args.count or 20 * len(support)
        draws = finite.gen_rand_sp_batch(args.n, args.p, n, stream)
        gid = f"Sp({2 * args.n},{args.p})"
    elif t == "perm":
        if args.n > 8:
            raise ValueError("support enumeration limited to n <= 8")
        support = list(itertools.permutations(range(1, args.n + 1)))
        n = args.count or 20 * len(support)
        draws = finite.gen_perm_batch(args.n, n, stream)
        gid = f"S{args.n}"
    elif t == "lattice":
        support = lattice.enumerate_lattice_ball(args.dim, args.radius)
        n = args.count or 20 * len(support)
        draws = lattice.pick_lattice_vectors(args.dim, args.radius, n, stream)
        gid = f"Z^{args.dim}(r={args.radius})"
    else:
        raise UsageError(f"unknown target {t}")
    report = stats.chi_square_uniform(stats.tally(draws), support, gid)
    return [report.to_dict()]


def run(args) -> str:
    needs_stream = args.verb in ("sample", "stats")
    stream = None
    if needs_stream:
        seed = args.seed
        if seed is None:
            seed = entropy_seed()
            print(f"seed={seed}", file=sys.stderr)
        stream = RandomStream(seed)
    if args.verb == "sample":
        return records.serialize(_sample(args, stream), args.format)
    if args.verb == "count":
        return records.table(_count(args), args.format)
    if args.verb == "reduce":
        return records.table(_reduce(args), args.format)
    return records.table(_stats(args, stream), args.format)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        text = run(args)
    except UsageError as e:
        print(f"grouprand: {e}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (ValueError, ZeroDivisionError, sl2z.ReductionError, GreedyReductionError, OSError) as e:
        print(f"grouprand: error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

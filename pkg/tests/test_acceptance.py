"""Acceptance suite: one PASS/FAIL line per criterion, printed in the terminal summary.

Run alone with ``pytest tests/test_acceptance.py -v`` (add ``-s`` to see the
lines as they are produced). Criterion 2 draws a million samples and takes a
few minutes.
"""

import math

import numpy as np
import pytest

from grouprand import finite, lattice, orthogonal, sl2z
from grouprand.fuchsian import GreedyReductionError, greedy_reduce, modular_generators, satisfies_dirichlet
from grouprand.hyperbolic import I, hdist, mobius_apply, moving_i_to, pick_halfplane, working_precision
from grouprand.rng import RandomStream
from grouprand.stats import chi_square_two_sample, chi_square_uniform, ks_pvalue, ks_statistic, tally, tv_distance


def flats(mats):
    return [A.flat() for A in mats]


def same_orbit_rep(z, w, tol=1e-9):
    # the two vertical sides and the two halves of the arc are identified
    a, b = complex(sl2z.reduce2(z).z0), complex(sl2z.reduce2(w).z0)
    return min(abs(a - v) for v in (b, b + 1, b - 1, -1 / b)) <= tol


def test_c1_count_law(criterion):
    with criterion("1 SL(2,Z) count law") as c:
        n_root2 = sl2z.count_sl2z(math.sqrt(2))
        c.check("N(sqrt 2) = 4", n_root2 == 4, f"got {n_root2}")
        n2 = sl2z.count_sl2z(2.0)
        brute = len(sl2z.enumerate_sl2z_bruteforce(2.0))
        c.check("N(2) matches exhaustive search", n2 == brute == 20, f"got {n2}, brute force {brute}; stated 12 is xfail 1-literal")
        ratio = sl2z.count_sl2z(200.0) / 200.0**2
        c.check("N(200)/200^2 in [5.5, 6.5]", 5.5 <= ratio <= 6.5, f"{ratio:.4f}")


@pytest.mark.xfail(strict=True, reason="stated N(2) = 12 omits the eight norm^2 = 3 matrices; exhaustive count is 20")
def test_c1_literal_n2_is_12(criterion):
    with criterion("1-literal N(2) = 12 as stated") as c:
        n2 = sl2z.count_sl2z(2.0)
        c.check("N(2) = 12", n2 == 12, f"got {n2}")


def test_c2_fancy_near_uniform(criterion):
    with criterion("2 pick_fancy near-uniform") as c:
        support = flats(sl2z.enumerate_sl2z(5.0))
        draws = sl2z.pick_fancy_batch(5.0, 0.01, 10**6, RandomStream(2002)).matrices
        rep = chi_square_uniform(tally(draws), support, "X=5")
        c.check("TV <= 0.02 at X=5, 1e6 draws", rep.tv_estimate <= 0.02, f"tv={rep.tv_estimate:.4f}")
        c.check("chi-square p > 0.001", rep.p_value > 0.001, f"p={rep.p_value:.4g}, k={rep.support_size}")
        n = 10**5
        counts = tally(sl2z.pick_fancy_batch(math.sqrt(2), 0.01, n, RandomStream(2003)).matrices)
        freqs = [counts.get(A, 0) / n for A in flats(sl2z.enumerate_sl2z(math.sqrt(2)))]
        c.check(
            "X=sqrt 2 frequencies within 0.25 +- 0.01",
            len(counts) == 4 and all(abs(f - 0.25) <= 0.01 for f in freqs),
            " ".join(f"{f:.4f}" for f in freqs),
        )


def test_c3_naive_vs_fancy(criterion):
    with criterion("3 naive vs fancy agreement") as c:
        n = 10**5
        naive = tally(sl2z.pick_sl_naive_batch(3.0, n, RandomStream(3001)).matrices)
        fancy = tally(sl2z.pick_fancy_batch(3.0, 0.01, n, RandomStream(3002)).matrices)
        stat, dof, p = chi_square_two_sample(naive, fancy)
        c.check("two-sample chi-square p > 0.01", p > 0.01, f"stat={stat:.1f} dof={dof} p={p:.4g}")


def test_c4_cost_law(criterion):
    with criterion("4 cost linear in 1/eps") as c:
        scaled = {}
        for eps in (0.1, 0.03, 0.01):
            attempts = sl2z.pick_fancy_batch(5.0, eps, 5000, RandomStream(4000)).attempts
            scaled[eps] = attempts.mean() * eps
        spread = max(scaled.values()) / min(scaled.values())
        c.check(
            "mean iterations * eps constant within factor 3",
            spread <= 3.0,
            ", ".join(f"eps={e}: {v:.2f}" for e, v in scaled.items()) + f", spread {spread:.3f}",
        )


def test_c5_translation_distance(criterion):
    with criterion("5 translation distance identity") as c:
        mats = sl2z.enumerate_sl2z(100.0)
        worst = max(abs(sl2z.translation_distance(A) - hdist(I, mobius_apply(A.mobius(), I))) for A in mats)
        c.check(f"|acosh(|A|^2/2) - d(i, Ai)| <= 1e-9 over {len(mats)} matrices", worst <= 1e-9, f"max {worst:.2e}")


def test_c6_reduction(criterion):
    with criterion("6 reduce2 correctness") as c:
        s = RandomStream(6006)
        # points of a radius-20 disk come within ~1e-9 of the real axis; they are
        # drawn at the precision the sampler uses for the matching norm bound
        bits = working_precision(math.sqrt(2 * math.cosh(20.0)))
        outside, worst, caps = 0, 0.0, 0
        for _ in range(10**4):
            z = pick_halfplane(20.0, s, bits)
            try:
                red = sl2z.reduce2(z)
            except sl2z.ReductionError:
                caps += 1
                continue
            outside += not sl2z.in_fundamental_domain(red.z0, 1e-12)
            worst = max(worst, sl2z.reduction_residual(z, red))
        c.check("z0 in the fundamental domain", outside == 0, f"{outside} outside")
        c.check("|A z - z0| <= 1e-9", worst <= 1e-9, f"max {worst:.2e}")
        c.check("no step-cap hits", caps == 0, f"{caps} hits")


@pytest.mark.parametrize("n,X,draws", [(2, 1.0, 10**5), (4, 3.0, 10**6)])
def test_c7_lattice_ball(criterion, n, X, draws):
    with criterion(f"7 lattice ball (n={n}, X={X:g})") as c:
        support = lattice.enumerate_lattice_ball(n, X)
        out = lattice.pick_lattice_vectors(n, X, draws, RandomStream(7000 + n))
        rep = chi_square_uniform(tally(out), support)
        c.check("chi-square p > 0.01", rep.p_value > 0.01, f"p={rep.p_value:.4g}, k={rep.support_size}")
        # boundary shell: points within distance 1 of the sphere
        inner = (X - 1.0) ** 2
        p_shell = sum(1 for v in support if sum(t * t for t in v) > inner) / len(support)
        f_shell = float(np.mean((out.astype(np.int64) ** 2).sum(axis=1) > inner))
        sigma = math.sqrt(p_shell * (1 - p_shell) / draws)
        c.check(
            "boundary-shell frequency within 3 sigma",
            abs(f_shell - p_shell) <= 3 * sigma,
            f"observed {f_shell:.5f}, expected {p_shell:.5f}, sigma {sigma:.1e}",
        )


def _symplectic_exact(flat, n, p):
    m = 2 * n
    M = flat.reshape(-1, m, m).astype(np.int64)
    J = finite.symplectic_form(n).astype(np.int64)
    lhs = np.einsum("kji,jl,klm->kim", M, J, M) % p
    return bool(np.all(lhs == J % p))


def test_c8_finite_groups(criterion):
    with criterion("8 finite groups uniform") as c:
        for p in (2, 3):
            support = [tuple(r) for r in finite.enumerate_sl(2, p)]
            out = finite.gen_rand_sl_batch(2, p, 10**5, RandomStream(8000 + p))
            rep = chi_square_uniform(tally(out), support)
            c.check(f"SL(2,{p}) |G|={len(support)} p > 0.01", rep.p_value > 0.01, f"p={rep.p_value:.4g}")
        for n, p, draws in ((1, 3, 10**5), (2, 2, 10**6)):
            support = [tuple(r) for r in finite.enumerate_sp(n, p)]
            out = finite.gen_rand_sp_batch(n, p, draws, RandomStream(8100 + n))
            rep = chi_square_uniform(tally(out), support)
            c.check(f"Sp({2 * n},{p}) |G|={len(support)} p > 0.01", rep.p_value > 0.01, f"p={rep.p_value:.4g}")
            c.check(f"Sp({2 * n},{p}) every M^T J M = J", _symplectic_exact(out, n, p))


def test_c9_expander_walk(criterion):
    with criterion("9 expander walk mixing") as c:
        support = [tuple(r) for r in finite.enumerate_sl(2, 3)]
        walks = 10**6
        tv = {}
        for L in (5, 15, 50):
            out = finite.expander_walk_batch(2, 3, L, walks, RandomStream(9000 + L))
            tv[L] = tv_distance(tally(out), support)
        # sampling floor of the TV estimate for a uniform law on 24 points
        noise = 0.5 * math.sqrt(2 * len(support) / (math.pi * walks))
        c.check("TV <= 0.05 at L=50", tv[50] <= 0.05, f"{tv[50]:.4f}")
        c.check(
            "TV decreasing over L = 5, 15, 50",
            tv[15] < tv[5] + 3 * noise and tv[50] < tv[15] + 3 * noise,
            ", ".join(f"L={L}: {v:.4f}" for L, v in tv.items()),
        )


def test_c10_orthogonal(criterion):
    with criterion("10 orthogonal group and rational points") as c:
        s = RandomStream(10010)
        err = max(np.abs(Q.T @ Q - np.eye(4)).max() for Q in (orthogonal.random_orthogonal(4, s) for _ in range(1000)))
        c.check("Q^T Q = I within 1e-12, n=4", err <= 1e-12, f"max {err:.1e}")
        Q = orthogonal.random_orthogonal_batch(2, 10**5, RandomStream(10011))
        angles = np.arctan2(Q[:, 1, 0], Q[:, 0, 0]) % (2 * math.pi)
        d = ks_statistic(angles, lambda t: t / (2 * math.pi))
        c.check("first-column angle KS < 0.01, n=2", d < 0.01, f"D={d:.4f}, p={ks_pvalue(d, len(angles)):.3g}")
        bad = [q for q in range(1, 10**4 + 1) if orthogonal.two_squares_count(q) != orthogonal.two_squares_bruteforce(q)]
        c.check("two_squares_count = brute force, q <= 1e4", not bad, f"{len(bad)} mismatches")
        ratio = orthogonal.visible_point_count(1000) / (6 / math.pi * 10**6)
        c.check("visible(1000) / (6/pi 1e6) in [0.98, 1.02]", 0.98 <= ratio <= 1.02, f"{ratio:.5f}")


def test_c11_greedy_reduction(criterion):
    with criterion("11 greedy Dirichlet reduction") as c:
        g = modular_generators()
        to_b = moving_i_to(g.basepoint)
        s = RandomStream(11011)
        capped, not_dirichlet, mismatched = 0, 0, 0
        for _ in range(1000):
            x = mobius_apply(to_b, pick_halfplane(10.0, s))
            try:
                tr = greedy_reduce(x, g)
            except GreedyReductionError:
                capped += 1
                continue
            not_dirichlet += not satisfies_dirichlet(tr.final_point, g)
            mismatched += not same_orbit_rep(tr.final_point, x)
        c.check("all terminate under the cap", capped == 0, f"{capped} capped")
        c.check("local Dirichlet condition", not_dirichlet == 0, f"{not_dirichlet} violations")
        c.check("same reduce2 representative within 1e-9", mismatched == 0, f"{mismatched} mismatches")

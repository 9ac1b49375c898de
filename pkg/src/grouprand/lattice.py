"""Uniform lattice points in Euclidean balls, and integer matrices of bounded Frobenius norm."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from . import _backend
from .rng import RandomStream


def norm_sq_bound(X: float) -> int:
    """Largest integer k with k <= X**2, computed exactly from the binary value of X."""
    if X < 0:
        raise ValueError("norm bound must be non-negative")
    return math.floor(Fraction(X) ** 2)


def padded_radius(n: int, X: float) -> float:
    return X + math.sqrt(n)


def ball_point(n: int, R: float, stream: RandomStream) -> np.ndarray:
    """Uniform point of the n-ball of radius R.

    Direction from normalized i.i.d. gaussians, radius ``R * u**(1/n)``.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return ball_points(n, R, 1, stream)[0]


def ball_points(n: int, R: float, count: int, stream: RandomStream) -> np.ndarray:
    state, out = _backend.kernels.ball_fill(stream.getstate(), n, float(R), count)
    stream.setstate(state)
    return out


def pick_lattice_vectors(n: int, X: float, count: int, stream: RandomStream, *, return_stats=False):
    """``count`` independent uniform draws from {v in Z^n : |v| <= X}, one per row.

    A continuous point of the ball of radius ``X + sqrt(n)`` is rounded to
    the nearest lattice point and kept only if it lies in the radius-X
    ball; the padding makes every kept point's unit cube lie inside the
    sampling ball, so all kept points are equally likely.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    bound = norm_sq_bound(X)
    state, out, ball_draws, _ = _backend.kernels.lattice_fill(
        stream.getstate(), n, bound, padded_radius(n, X), count, False
    )
    stream.setstate(state)
    if return_stats:
        return out, ball_draws
    return out


def pick_lattice_vector(n: int, X: float, stream: RandomStream) -> tuple[int, ...]:
    return tuple(int(v) for v in pick_lattice_vectors(n, X, 1, stream)[0])


def pick_matrix(n: int, X: float, stream: RandomStream) -> list[list[int]]:
    """Uniform n x n integer matrix with Frobenius norm at most X (row-major reshape)."""
    v = pick_lattice_vector(n * n, X, stream)
    return [list(v[i * n:(i + 1) * n]) for i in range(n)]


def enumerate_lattice_ball(n: int, X: float) -> list[tuple[int, ...]]:
    """All integer vectors of Euclidean norm at most X, lexicographically sorted."""
    bound = norm_sq_bound(X)
    k = math.isqrt(bound)
    out = []

    def rec(prefix, remaining):
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        m = math.isqrt(remaining)
        for v in range(-m, m + 1):
            rec(prefix + [v], remaining - v * v)

    if n > 0 and k >= 0:
        rec([], bound)
    return out


def lattice_ball_count_bruteforce(n: int, X: float) -> int:
    """Count by scanning the full cube [-X, X]^n; independent of :func:`enumerate_lattice_ball`."""
    bound = norm_sq_bound(X)
    k = math.isqrt(bound)
    return sum(1 for v in itertools.product(range(-k, k + 1), repeat=n) if sum(e * e for e in v) <= bound)

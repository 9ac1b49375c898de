"""Haar-random orthogonal matrices, signed permutations, and rational points of SO(2)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .finite import gen_perm
from .rng import RandomStream

MAX_FACTOR_INPUT = 10**9
MAX_ROTATION_DENOMINATOR = 10**4


def householder_qr(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """QR factorization by successive Householder reflections.

    Works on a single matrix or a stack of them (leading axes are batch axes).
    """
    A = np.array(X, dtype=np.float64)
    n, m = A.shape[-2:]
    Q = np.broadcast_to(np.eye(n), A.shape[:-2] + (n, n)).copy()
    for k in range(min(n - 1, m)):
        x = A[..., k:, k]
        normx = np.sqrt((x * x).sum(axis=-1))
        v = x.copy()
        v[..., 0] += np.copysign(normx, x[..., 0])
        vn = np.sqrt((v * v).sum(axis=-1))
        # a zero column needs no reflection
        v = np.where((vn > 0)[..., None], v / np.where(vn > 0, vn, 1.0)[..., None], 0.0)
        A[..., k:, :] -= 2.0 * v[..., :, None] * np.einsum("...i,...ij->...j", v, A[..., k:, :])[..., None, :]
        Q[..., :, k:] -= 2.0 * np.einsum("...ij,...j->...i", Q[..., :, k:], v)[..., :, None] * v[..., None, :]
    return Q, np.triu(A)


def _full_rank(R: np.ndarray) -> np.ndarray:
    d = np.abs(np.diagonal(R, axis1=-2, axis2=-1))
    return d.min(axis=-1) > 1e-12 * np.maximum(1.0, d.max(axis=-1))


def random_orthogonal_batch(n: int, count: int, stream: RandomStream) -> np.ndarray:
    """``count`` independent Haar elements of O(n), shape (count, n, n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    X = np.array([stream.gaussians(n * n) for _ in range(count)], dtype=np.float64).reshape(count, n, n)
    Q, R = householder_qr(X)
    bad = ~_full_rank(R)
    # rank-deficient draws (probability zero) are replaced by fresh ones
    for i in np.flatnonzero(bad):
        while True:
            Qi, Ri = householder_qr(np.array(stream.gaussians(n * n)).reshape(1, n, n))
            if _full_rank(Ri)[0]:
                Q[i], R[i] = Qi[0], Ri[0]
                break
    signs = np.sign(np.diagonal(R, axis1=-2, axis2=-1))
    return Q * signs[:, None, :]


def random_orthogonal(n: int, stream: RandomStream) -> np.ndarray:
    """Haar-distributed element of O(n).

    Q from the QR factorization of an n x n standard normal matrix, with
    column signs chosen so that R has a positive diagonal.
    """
    return random_orthogonal_batch(n, 1, stream)[0]


def random_signed_permutation(n: int, stream: RandomStream) -> np.ndarray:
    """Uniform element of O(n, Z): a permutation matrix with independent random signs."""
    perm = gen_perm(n, stream)
    P = np.zeros((n, n), dtype=np.int64)
    for i, j in enumerate(perm.images):
        P[i, j - 1] = stream.random_sign()
    return P


def factorize(q: int) -> dict[int, int]:
    if q < 1:
        raise ValueError("q must be positive")
    if q > MAX_FACTOR_INPUT:
        raise ValueError(f"trial-division factoring limited to q <= {MAX_FACTOR_INPUT}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= q:
        while q % d == 0:
            out[d] = out.get(d, 0) + 1
            q //= d
        d += 1 if d == 2 else 2
    if q > 1:
        out[q] = out.get(q, 0) + 1
    return out


def two_squares_count(q: int) -> int:
    """prod (b_j + 1) over primes q_j = 1 mod 4 with q_j^b_j || q; 0 if a prime = 3 mod 4 has odd exponent.

    This is r_2(q) / 4, the number of representations q = x^2 + y^2 with
    x > 0 and y >= 0.
    """
    out = 1
    for prime, e in factorize(q).items():
        if prime % 4 == 3 and e % 2:
            return 0
        if prime % 4 == 1:
            out *= e + 1
    return out


def two_squares_bruteforce(q: int) -> int:
    """Representations q = x^2 + y^2 with x > 0, y >= 0 (one per orbit of the quarter-turn)."""
    count = 0
    for x in range(1, math.isqrt(q) + 1):
        r = q - x * x
        y = math.isqrt(r)
        if y * y == r:
            count += 1
    return count


@dataclass(frozen=True)
class RationalRotation:
    """The rotation [[a/q, b/q], [-b/q, a/q]] with a^2 + b^2 = q^2, gcd(a, b) = 1."""

    a: int
    b: int
    q: int

    def __post_init__(self):
        if self.q <= 0 or self.a * self.a + self.b * self.b != self.q * self.q or math.gcd(self.a, self.b) != 1:
            raise ValueError(f"not a primitive rational rotation: {self}")

    def matrix(self) -> list[list[Fraction]]:
        a, b, q = self.a, self.b, self.q
        return [[Fraction(a, q), Fraction(b, q)], [Fraction(-b, q), Fraction(a, q)]]

    def numerators(self) -> list[list[int]]:
        return [[self.a, self.b], [-self.b, self.a]]

    @property
    def angle(self) -> float:
        """Angle of the first column (a/q, -b/q), in [0, 2 pi)."""
        return math.atan2(-self.b, self.a) % (2 * math.pi)


def enumerate_rational_rotations(Q: int) -> list[RationalRotation]:
    """All primitive rational rotations with denominator at most Q, sorted by (q, a, b).

    Primitive triples come from coprime m > k > 0 of opposite parity via
    (m^2 - k^2, 2 m k, m^2 + k^2); the four axis rotations have q = 1.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    if Q > MAX_ROTATION_DENOMINATOR:
        raise ValueError(f"enumeration limited to Q <= {MAX_ROTATION_DENOMINATOR}")
    out = [RationalRotation(1, 0, 1), RationalRotation(-1, 0, 1), RationalRotation(0, 1, 1), RationalRotation(0, -1, 1)]
    m = 2
    while m * m + 1 <= Q:
        for k in range(1, m):
            q = m * m + k * k
            if q > Q:
                break
            if (m - k) % 2 == 0 or math.gcd(m, k) != 1:
                continue
            a, b = m * m - k * k, 2 * m * k
            for x, y in ((a, b), (b, a)):
                for sx in (1, -1):
                    for sy in (1, -1):
                        out.append(RationalRotation(sx * x, sy * y, q))
        m += 1
    out.sort(key=lambda r: (r.q, r.a, r.b))
    return out


def rational_rotations_bruteforce(Q: int) -> list[tuple[int, int, int]]:
    out = []
    for q in range(1, Q + 1):
        for a in range(-q, q + 1):
            r = q * q - a * a
            b = math.isqrt(r)
            if b * b != r:
                continue
            for bb in {b, -b}:
                if math.gcd(a, bb) == 1:
                    out.append((q, a, bb))
    return sorted(out)


def sample_rational_rotation(Q: int, stream: RandomStream, _cache: dict = {}) -> RationalRotation:  # noqa: B006
    """Uniform element of :func:`enumerate_rational_rotations` (Q)."""
    rots = _cache.get(Q)
    if rots is None:
        rots = _cache[Q] = enumerate_rational_rotations(Q)
    return rots[stream.randbelow(len(rots))]


def _lattice_points_in_disk(K: int) -> int:
    """#{(a, b) in Z^2 : a^2 + b^2 <= K}."""
    m = math.isqrt(K)
    return sum(2 * math.isqrt(K - a * a) + 1 for a in range(-m, m + 1))


def _mobius_table(n: int) -> list[int]:
    mu = [1] * (n + 1)
    is_comp = [False] * (n + 1)
    primes: list[int] = []
    mu[0] = 0
    for i in range(2, n + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            if i * p > n:
                break
            is_comp[i * p] = True
            if i % p == 0:
                mu[i * p] = 0
                break
            mu[i * p] = -mu[i]
    return mu


def visible_point_count(Q: int) -> int:
    """#{(a, b) : 0 < a^2 + b^2 <= Q^2, gcd(a, b) = 1}, by Möbius inversion over common divisors."""
    if Q < 0:
        raise ValueError("Q must be non-negative")
    if Q > MAX_ROTATION_DENOMINATOR:
        raise ValueError(f"limited to Q <= {MAX_ROTATION_DENOMINATOR}")
    mu = _mobius_table(Q)
    K = Q * Q
    return sum(mu[d] * (_lattice_points_in_disk(K // (d * d)) - 1) for d in range(1, Q + 1) if mu[d])


def visible_point_bruteforce(Q: int) -> int:
    r = np.arange(-Q, Q + 1)
    a, b = np.meshgrid(r, r)
    n2 = a * a + b * b
    mask = (n2 > 0) & (n2 <= Q * Q)
    return int(np.count_nonzero(np.gcd(a[mask], b[mask]) == 1))

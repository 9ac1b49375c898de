"""Random elements of SL(2, Z) with bounded Frobenius norm.

Two samplers are provided. :func:`pick_sl_naive` draws integer matrices
from the norm ball and keeps those of determinant one; it is exactly
uniform but needs on the order of X**2 attempts. :func:`pick_fancy` draws
a uniform point from a hyperbolic disk about i, reduces it to the standard
fundamental domain, and returns the reducing matrix when it satisfies the
norm bound; the disk radius controls how close to uniform the output is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import _backend, _pykernels
from .hyperbolic import DOUBLE_BITS, HPoint, Mobius, cosh_minus_one, hdist, mobius_apply, working_precision
from .lattice import norm_sq_bound, padded_radius
from .rng import RandomStream

MAX_ENUMERATION_BOUND = 2000.0
# compiled fast path keeps integer entries well inside int64 below this radius
MAX_KERNEL_RADIUS = 40.0
ELLIPTIC_TOL = 1e-15


class ReductionError(RuntimeError):
    pass


@dataclass(frozen=True)
class Mat2Z:
    a: int
    b: int
    c: int
    d: int

    @classmethod
    def from_rows(cls, rows) -> "Mat2Z":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    @classmethod
    def from_flat(cls, v) -> "Mat2Z":
        a, b, c, d = (int(e) for e in v)
        return cls(a, b, c, d)

    def rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    def flat(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def norm_sq(self) -> int:
        return frobenius_norm_sq(self)

    def __matmul__(self, o: "Mat2Z") -> "Mat2Z":
        return Mat2Z(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __neg__(self) -> "Mat2Z":
        return Mat2Z(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "Mat2Z":
        if self.det != 1:
            raise ValueError("not in SL(2, Z)")
        return Mat2Z(self.d, -self.b, -self.c, self.a)

    def mobius(self) -> Mobius:
        return Mobius(self.a, self.b, self.c, self.d)

    def __call__(self, z: HPoint) -> HPoint:
        return mobius_apply(self.mobius(), z)


IDENTITY = Mat2Z(1, 0, 0, 1)
S = Mat2Z(0, -1, 1, 0)
T = Mat2Z(1, 1, 0, 1)


@dataclass(frozen=True)
class ReducedPair:
    """``z0 = A z`` with z0 the canonical representative in the fundamental domain."""

    A: Mat2Z
    z0: HPoint
    steps: int = 0


@dataclass(frozen=True)
class SingularProfile:
    """Large singular value ``x >= 1`` of a unit-determinant 2x2 matrix."""

    x: float

    @classmethod
    def of(cls, A: Mat2Z) -> "SingularProfile":
        n = frobenius_norm_sq(A)
        # x^2 + x^-2 = n
        return cls(math.sqrt((n + math.sqrt(n * n - 4.0)) / 2.0))

    @property
    def norm_sq(self) -> float:
        return self.x ** 2 + self.x ** -2

    @property
    def translation_distance(self) -> float:
        return 2.0 * math.log(self.x)


def frobenius_norm_sq(A: Mat2Z) -> int:
    return A.a * A.a + A.b * A.b + A.c * A.c + A.d * A.d


def translation_distance(A: Mat2Z) -> float:
    """Hyperbolic distance from i to A i, ``acosh(|A|^2 / 2)``."""
    if A.det != 1:
        raise ValueError("translation_distance needs det A = 1")
    return math.acosh(frobenius_norm_sq(A) / 2)


def in_fundamental_domain(z: HPoint, tol: float = 0.0) -> bool:
    """Closed domain |Re z| <= 1/2, |z| >= 1, widened by ``tol``."""
    return abs(float(z.re)) <= 0.5 + tol and float(z.abs2) >= 1.0 - tol


def is_canonical(z: HPoint) -> bool:
    """Re z in [-1/2, 1/2), |z| >= 1, and Re z <= 0 when |z| = 1."""
    if not (-0.5 <= z.re < 0.5):
        return False
    r2 = z.abs2
    if r2 < 1:
        return False
    return not (r2 == 1 and z.re > 0)


def default_step_cap(z: HPoint) -> int:
    # (1 + |z|^2) / Im z = 2 cosh d(i, z), the squared norm of a matrix moving i to z
    scale = float((1 + z.abs2) / z.im)
    return 64 + 8 * math.ceil(math.log2(max(2.0, math.sqrt(scale))))


def step_cap_for_bound(X: float) -> int:
    return 64 + 8 * math.ceil(math.log2(max(2.0, X)))


def _reduce_mp(z: HPoint, max_steps: int):
    with mpmath.workprec(z.precision_bits):
        x, y = z.re, z.im
        a, b, c, d = 1, 0, 0, 1
        steps = 0
        half = mpmath.mpf(0.5)
        r2 = mpmath.mpf(0)
        while True:
            if steps >= max_steps:
                return None
            steps += 1
            q = int(mpmath.floor(x + half))
            x -= q
            if x >= half:
                x -= 1
                q += 1
            elif x < -half:
                x += 1
                q -= 1
            a -= q * c
            b -= q * d
            r2 = x * x + y * y
            if r2 < 1:
                x, y = -x / r2, y / r2
                a, b, c, d = -c, -d, a, b
            else:
                break
        if r2 == 1 and x > 0:
            x = -x
            a, b, c, d = -c, -d, a, b
        return Mat2Z(a, b, c, d), HPoint(x, y, z.precision_bits), steps


def _reduce_once(z: HPoint, max_steps: int):
    if z.precision_bits == DOUBLE_BITS:
        a, b, c, d, x, y, steps, capped = _pykernels.reduce_double(z.re, z.im, max_steps)
        if capped:
            return None
        return Mat2Z(a, b, c, d), HPoint(x, y), steps
    return _reduce_mp(z, max_steps)


def reduce2(z: HPoint, max_steps: int | None = None) -> ReducedPair:
    """Gauss reduction of ``z`` into the fundamental domain, with the reducing matrix.

    Each round translates by the nearest integer (ties go up, so the real
    part lands in [-1/2, 1/2)) and then inverts by z -> -1/z if |z| < 1.
    If the step cap is hit the point is redone at higher precision.
    """
    if max_steps is None:
        max_steps = default_step_cap(z)
    bits = z.precision_bits
    for _ in range(4):
        out = _reduce_once(z if bits == z.precision_bits else z.with_precision(bits), max_steps)
        if out is not None:
            A, z0, steps = out
            return ReducedPair(A, z0, steps)
        bits = max(2 * bits, bits + 64)
    raise ReductionError(f"reduction of {z} did not finish in {max_steps} steps")


RHO = complex(-0.5, math.sqrt(3) / 2)


def near_elliptic(z0: HPoint, tol: float = ELLIPTIC_TOL) -> bool:
    """True if a reduced point sits on i or rho = e^{2 pi i / 3} (non-trivial stabilizers)."""
    zc = complex(z0)
    return abs(zc - 1j) < tol or abs(zc - RHO) < tol or abs(zc - (RHO + 1)) < tol


def enumerate_sl2z(X: float) -> list[Mat2Z]:
    """All of {A in SL(2,Z) : |A|_F <= X}, sorted lexicographically by (a, b, c, d).

    For each primitive top row (a, b), the bottom rows with ad - bc = 1 form
    the line (c0 + k a, d0 + k b); the norm bound cuts out an interval of k.
    """
    if X > MAX_ENUMERATION_BOUND:
        raise ValueError(f"enumeration limited to X <= {MAX_ENUMERATION_BOUND:g}")
    K = norm_sq_bound(X)
    out = []
    m = math.isqrt(max(K - 1, 0))
    for a in range(-m, m + 1):
        rest = K - 1 - a * a
        if rest < 0:
            continue
        mb = math.isqrt(rest)
        for b in range(-mb, mb + 1):
            if math.gcd(a, b) != 1:
                continue
            top = a * a + b * b
            budget = K - top
            d0, negc0 = _bezout(a, b)
            c0 = -negc0
            # c^2 + d^2 = |v0 + k w|^2, w = (a, b), v0 = (c0, d0)
            dot = c0 * a + d0 * b
            k_star = -dot // top
            for start, step in ((k_star, -1), (k_star + 1, 1)):
                k = start
                while True:
                    c = c0 + k * a
                    d = d0 + k * b
                    if c * c + d * d > budget:
                        break
                    out.append(Mat2Z(a, b, c, d))
                    k += step
    out.sort(key=Mat2Z.flat)
    return out


def _bezout(a: int, b: int) -> tuple[int, int]:
    """(s, t) with a s + b t = gcd(a, b) = 1."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t


def count_sl2z(X: float) -> int:
    return len(enumerate_sl2z(X))


def enumerate_sl2z_bruteforce(X: float) -> list[Mat2Z]:
    """Scan of the cube [-X, X]^4; only for small X."""
    K = norm_sq_bound(X)
    k = math.isqrt(K)
    rng = range(-k, k + 1)
    return [
        Mat2Z(a, b, c, d)
        for a in rng
        for b in rng
        for c in rng
        for d in rng
        if a * d - b * c == 1 and a * a + b * b + c * c + d * d <= K
    ]


@dataclass
class SampleBatch:
    """Matrices (rows of a, b, c, d) plus the number of attempts behind each batch."""

    matrices: np.ndarray
    attempts: np.ndarray

    def __len__(self):
        return len(self.matrices)

    def as_mat2z(self) -> list[Mat2Z]:
        return [Mat2Z.from_flat(r) for r in self.matrices]


def _check_bound(X: float):
    if norm_sq_bound(X) < 2:
        raise ValueError("norm bound must be at least sqrt(2)")


def pick_sl_naive_batch(X: float, count: int, stream: RandomStream) -> SampleBatch:
    """Exactly uniform draws by rejection from the integer norm ball.

    ``attempts`` has a single entry: the total number of integer matrices
    drawn from the ball for the whole batch.
    """
    _check_bound(X)
    state, out, _, lattice_draws = _backend.kernels.lattice_fill(
        stream.getstate(), 4, norm_sq_bound(X), padded_radius(4, X), count, True
    )
    stream.setstate(state)
    return SampleBatch(out, np.array([lattice_draws], dtype=np.int64))


def pick_sl_naive(X: float, stream: RandomStream) -> Mat2Z:
    return Mat2Z.from_flat(pick_sl_naive_batch(X, 1, stream).matrices[0])


def radius_schedule(X: float, eps: float) -> float:
    """Disk radius for norm bound X and accuracy eps: acosh(X^2/2) + ln(1/eps) + 2."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if X * X < 2.0 - 1e-12:
        raise ValueError("X must be at least sqrt(2)")
    return math.acosh(max(X * X / 2.0, 1.0)) + math.log(1.0 / eps) + 2.0


def pick_fancy_batch(
    X: float, eps: float, count: int, stream: RandomStream, *, force_high_precision: bool = False
) -> SampleBatch:
    """Near-uniform draws via disk sampling and reduction.

    ``attempts[k]`` is the number of disk points drawn for the k-th matrix.
    Points the double-precision reduction cannot classify reliably (too
    close to the domain boundary) are re-reduced at
    :func:`working_precision` bits; points reducing onto an elliptic fixed
    point are discarded.
    """
    _check_bound(X)
    R = radius_schedule(X, eps)
    bound = norm_sq_bound(X)
    cap = step_cap_for_bound(X)
    x_max = cosh_minus_one(R)
    bits = working_precision(X)
    if force_high_precision or R > MAX_KERNEL_RADIUS:
        return _fancy_high_precision(bound, x_max, cap, bits, count, stream)
    k = _backend.kernels
    mats, iters = [], []
    carry = 0
    filled = 0
    while filled < count:
        state, m, it, event, px, py, pit = k.fancy_fill(stream.getstate(), bound, x_max, cap, count - filled, carry)
        stream.setstate(state)
        mats.append(m)
        iters.append(it)
        filled += len(m)
        carry = 0
        if event == k.EVENT_DONE:
            break
        A = _resolve(px, py, bits, cap, bound)
        if A is None:
            carry = pit
            continue
        sign = stream.random_sign()
        mats.append(np.array([A.flat() if sign > 0 else (-A).flat()], dtype=np.int64))
        iters.append(np.array([pit], dtype=np.int64))
        filled += 1
    return SampleBatch(np.concatenate(mats).reshape(-1, 4), np.concatenate(iters))


def _resolve(x: float, y: float, bits: int, cap: int, bound: int) -> Mat2Z | None:
    """High-precision reduction of one drawn point; the matrix if it is accepted."""
    red = reduce2(HPoint(x, y, bits), cap)
    if near_elliptic(red.z0):
        return None
    if frobenius_norm_sq(red.A) <= bound:
        return red.A
    return None


def _fancy_high_precision(bound, x_max, cap, bits, count, stream) -> SampleBatch:
    mats, iters = [], []
    it = 0
    while len(mats) < count:
        it += 1
        u1 = stream.uniform()
        u2 = stream.uniform()
        zx, zy = _pykernels.halfplane_point(x_max * u1, 2.0 * math.pi * u2)
        A = _resolve(zx, zy, bits, cap, bound)
        if A is None:
            continue
        mats.append(A.flat() if stream.random_sign() > 0 else (-A).flat())
        iters.append(it)
        it = 0
    return SampleBatch(np.array(mats, dtype=np.int64).reshape(-1, 4), np.array(iters, dtype=np.int64))


def pick_fancy(X: float, eps: float, stream: RandomStream) -> Mat2Z:
    return Mat2Z.from_flat(pick_fancy_batch(X, eps, 1, stream).matrices[0])


def reduction_residual(z: HPoint, red: ReducedPair) -> float:
    """|A z - z0| evaluated in the precision of z."""
    w = red.A(z)
    return abs(complex(w) - complex(red.z0))


def orbit_distance(z: HPoint, w: HPoint) -> float:
    """Hyperbolic distance between the canonical representatives of two orbits."""
    return hdist(reduce2(z).z0, reduce2(w).z0)

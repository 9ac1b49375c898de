"""Seedable randomness shared by every sampler in the package.

The generator is xoshiro256** (Blackman & Vigna) seeded through SplitMix64.
Both are defined by 64-bit integer arithmetic only, so a given seed yields
the same stream on every platform, and the compiled kernels reproduce it
bit for bit.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Optional

MASK64 = (1 << 64) - 1

# SplitMix64 constants
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_TWO_NEG_53 = 1.0 / (1 << 53)
TWO_PI = 2.0 * math.pi


def splitmix64(x: int) -> tuple[int, int]:
    """One SplitMix64 step; returns ``(new_state, output)``."""
    x = (x + _GOLDEN) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return x, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def entropy_seed() -> int:
    return int.from_bytes(os.urandom(8), "little")


class RandomStream:
    """Deterministic xoshiro256** stream.

    A stream is single-owner. For parallel work derive independent
    streams with :meth:`spawn`.
    """

    def __init__(self, seed: Optional[int] = None):
        if seed is None:
            seed = entropy_seed()
        if not 0 <= seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.seed = seed
        x = seed
        s = []
        for _ in range(4):
            x, out = splitmix64(x)
            s.append(out)
        self._s = s

    def __repr__(self):
        return f"RandomStream(seed={self.seed})"

    def getstate(self) -> tuple[int, int, int, int]:
        return tuple(self._s)

    def setstate(self, state) -> None:
        s = [int(v) & MASK64 for v in state]
        if len(s) != 4 or not any(s):
            raise ValueError("state must be four 64-bit words, not all zero")
        self._s = s

    def spawn(self, key: int) -> "RandomStream":
        """Independent child stream derived from this stream's seed and ``key``."""
        _, out = splitmix64(self.seed ^ ((key + 1) * _GOLDEN & MASK64))
        return RandomStream(out)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _TWO_NEG_53

    def randbelow(self, n: int) -> int:
        """Unbiased integer in ``[0, n)`` (Lemire's multiply-shift with rejection)."""
        if n <= 0:
            raise ValueError("n must be positive")
        m = self.next_u64() * n
        low = m & MASK64
        if low < n:
            threshold = ((1 << 64) - n) % n
            while low < threshold:
                m = self.next_u64() * n
                low = m & MASK64
        return m >> 64

    def random_sign(self) -> int:
        return 1 if self.next_u64() >> 63 else -1

    def gaussian_pair(self) -> tuple[float, float]:
        """Two independent N(0, 1) variates by the Box-Muller transform."""
        u1 = self.uniform()
        while u1 == 0.0:
            u1 = self.uniform()
        u2 = self.uniform()
        rad = math.sqrt(-2.0 * math.log(u1))
        ang = TWO_PI * u2
        return rad * math.cos(ang), rad * math.sin(ang)

    def gaussians(self, n: int) -> list[float]:
        """``n`` standard normals; the spare of the last pair is dropped when n is odd."""
        out: list[float] = []
        while len(out) < n:
            out.extend(self.gaussian_pair())
        del out[n:]
        return out


def uniform(stream: RandomStream) -> float:
    return stream.uniform()


def gaussian_pair(stream: RandomStream) -> tuple[float, float]:
    return stream.gaussian_pair()


@dataclass(frozen=True)
class DensitySpec:
    """A positive density ``f`` on (0, R] with antiderivative ``F`` (F(0) = 0).

    ``F_inv`` is optional; without it :func:`gen_random` inverts ``F`` by
    bisection. ``F`` itself may be omitted, in which case it is obtained
    by numerical quadrature of ``f``.
    """

    f: Callable[[float], float]
    R: float
    F: Optional[Callable[[float], float]] = None
    F_inv: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("R must be positive")
        if self.F is None:
            from scipy.integrate import quad

            f = self.f
            object.__setattr__(self, "F", lambda t: quad(f, 0.0, t, epsabs=1e-14, epsrel=1e-12)[0])
        grid = [self.R * k / 256 for k in range(257)]
        vals = [self.F(t) for t in grid]
        if abs(vals[0]) > 1e-12 * max(1.0, abs(vals[-1])):
            raise ValueError("F(0) must be 0")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("F must be strictly increasing on [0, R]")

    @property
    def total(self) -> float:
        return self.F(self.R)

    def invert(self, x: float) -> float:
        if self.F_inv is not None:
            return self.F_inv(x)
        lo, hi = 0.0, self.R
        while hi - lo > 1e-12 * max(hi, 1e-300):
            mid = 0.5 * (lo + hi)
            if self.F(mid) < x:
                lo = mid
            else:
                hi = mid
        return hi


def gen_random(spec: DensitySpec, stream: RandomStream) -> float:
    """Draw from the density proportional to ``spec.f`` on (0, R] by inverting its CDF."""
    u = 1.0 - stream.uniform()  # (0, 1]
    t = spec.invert(spec.total * u)
    return min(max(t, 0.0), spec.R)

"""Upper half-plane model of the hyperbolic plane.

Points carry a working precision. At 53 bits everything is plain ``float``
arithmetic; above that the coordinates are :class:`mpmath.mpf` values and
the operations run under ``mpmath.workprec``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import mpmath

from .rng import TWO_PI, RandomStream

Real = Union[float, int, mpmath.mpf]

DOUBLE_BITS = 53


def working_precision(X: float) -> int:
    """Bits used when reducing points drawn for the norm bound ``X``."""
    return 64 + 4 * math.ceil(math.log2(max(2.0, X)))


@dataclass(frozen=True)
class HPoint:
    re: Real
    im: Real
    precision_bits: int = DOUBLE_BITS

    def __post_init__(self):
        if self.precision_bits < DOUBLE_BITS:
            raise ValueError("precision_bits must be at least 53")
        if self.precision_bits > DOUBLE_BITS:
            with mpmath.workprec(self.precision_bits):
                object.__setattr__(self, "re", mpmath.mpf(self.re))
                object.__setattr__(self, "im", mpmath.mpf(self.im))
        else:
            object.__setattr__(self, "re", float(self.re))
            object.__setattr__(self, "im", float(self.im))
        if not self.im > 0:
            raise ValueError(f"point not in the upper half-plane: im = {self.im}")

    @classmethod
    def from_complex(cls, z: complex, precision_bits: int = DOUBLE_BITS) -> "HPoint":
        return cls(z.real, z.imag, precision_bits)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def with_precision(self, bits: int) -> "HPoint":
        return HPoint(self.re, self.im, bits)

    @property
    def abs2(self):
        return self.re * self.re + self.im * self.im


I = HPoint(0.0, 1.0)


@dataclass(frozen=True)
class PolarHPoint:
    """Geodesic polar coordinates about a center: distance ``r`` and angle ``theta``."""

    r: float
    theta: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r must be non-negative")
        if not 0 <= self.theta < TWO_PI:
            raise ValueError("theta must lie in [0, 2*pi)")


@dataclass(frozen=True)
class Mobius:
    """The fractional linear map z -> (a z + b) / (c z + d)."""

    a: Real
    b: Real
    c: Real
    d: Real

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @classmethod
    def from_rows(cls, rows) -> "Mobius":
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    def __matmul__(self, other: "Mobius") -> "Mobius":
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Mobius":
        det = self.det
        if det == 1:
            return Mobius(self.d, -self.b, -self.c, self.a)
        return Mobius(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def __call__(self, z: HPoint) -> HPoint:
        return mobius_apply(self, z)


IDENTITY = Mobius(1, 0, 0, 1)


def rotation(phi: float) -> Mobius:
    """Elliptic element fixing i: [[cos phi, sin phi], [-sin phi, cos phi]]."""
    c, s = math.cos(phi), math.sin(phi)
    return Mobius(c, s, -s, c)


def _hdist_float(x1, y1, x2, y2) -> float:
    # d = acosh(1 + |z-w|^2 / (2 y1 y2)) rewritten as 2 asinh(|z-w| / (2 sqrt(y1 y2)))
    # to keep full relative accuracy for nearby points.
    chord = math.hypot(x1 - x2, y1 - y2)
    return 2.0 * math.asinh(chord / (2.0 * math.sqrt(y1 * y2)))


def hdist(z: HPoint, w: HPoint) -> float:
    """Hyperbolic distance between two points of the upper half-plane."""
    bits = max(z.precision_bits, w.precision_bits)
    if bits == DOUBLE_BITS:
        return _hdist_float(z.re, z.im, w.re, w.im)
    with mpmath.workprec(bits):
        zr, zi, wr, wi = (mpmath.mpf(v) for v in (z.re, z.im, w.re, w.im))
        chord = mpmath.sqrt((zr - wr) ** 2 + (zi - wi) ** 2)
        return 2 * mpmath.asinh(chord / (2 * mpmath.sqrt(zi * wi)))


def hdist_acosh(z: HPoint, w: HPoint) -> float:
    """Textbook form ``acosh(1 + |z-w|^2 / (2 Im z Im w))``, argument clamped to >= 1."""
    x1, y1, x2, y2 = (float(v) for v in (z.re, z.im, w.re, w.im))
    arg = 1.0 + ((x1 - x2) ** 2 + (y1 - y2) ** 2) / (2.0 * y1 * y2)
    return math.acosh(max(arg, 1.0))


def mobius_apply(m: Mobius, z: HPoint) -> HPoint:
    """Apply a positive-determinant Möbius map to a point of H."""
    bits = z.precision_bits
    if bits == DOUBLE_BITS:
        a, b, c, d = float(m.a), float(m.b), float(m.c), float(m.d)
        x, y = z.re, z.im
        det = a * d - b * c
        if det <= 0:
            raise ValueError("Möbius map must have positive determinant")
        cx_d = c * x + d
        den = cx_d * cx_d + (c * y) ** 2
        re = ((a * x + b) * cx_d + a * c * y * y) / den
        im = det * y / den
        return HPoint(re, im)
    with mpmath.workprec(bits):
        a, b, c, d = (mpmath.mpf(v) for v in (m.a, m.b, m.c, m.d))
        x, y = z.re, z.im
        det = a * d - b * c
        if det <= 0:
            raise ValueError("Möbius map must have positive determinant")
        cx_d = c * x + d
        den = cx_d * cx_d + (c * y) ** 2
        return HPoint(((a * x + b) * cx_d + a * c * y * y) / den, det * y / den, bits)


def moving_i_to(b: HPoint) -> Mobius:
    """An element of SL(2,R) sending i to ``b`` (translation after dilation)."""
    s = math.sqrt(float(b.im))
    return Mobius(s, float(b.re) / s, 0.0, 1.0 / s)


def _draw_radial(R: float, stream: RandomStream) -> tuple[float, float]:
    """Return ``(cosh(r) - 1, theta)`` for a uniform point of the disk of radius R."""
    return cosh_minus_one(R) * stream.uniform(), TWO_PI * stream.uniform()


def cosh_minus_one(R: float) -> float:
    return 2.0 * math.sinh(0.5 * R) ** 2


def pick_hyperbolic(R: float, stream: RandomStream) -> PolarHPoint:
    """Uniform point (w.r.t. hyperbolic area) of the disk of radius ``R``, in polar form.

    The area inside radius t is ``2 pi (cosh t - 1)``, so the radius is the
    inverse image of a uniform draw under ``cosh t - 1``.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    x, theta = _draw_radial(R, stream)
    # acosh(1 + x) without cancellation for small x
    return PolarHPoint(2.0 * math.asinh(math.sqrt(0.5 * x)), theta)


def halfplane_from_polar(p: PolarHPoint, precision_bits: int = DOUBLE_BITS) -> HPoint:
    """The point at distance ``p.r`` from i, in direction ``p.theta``.

    Realized as ``K(theta/2) (i e^r)`` with K the rotation about i. The
    half angle is needed because K(phi) turns tangent directions at i by 2 phi.
    """
    if precision_bits == DOUBLE_BITS:
        re, im = _rotated_vertical(math.exp(p.r), 0.5 * p.theta)
        return HPoint(re, im)
    with mpmath.workprec(precision_bits):
        t = mpmath.exp(mpmath.mpf(p.r))
        phi = mpmath.mpf(p.theta) / 2
        c, s = mpmath.cos(phi), mpmath.sin(phi)
        den = c * c + t * t * s * s
        return HPoint((1 - t * t) * s * c / den, t / den, precision_bits)


def _rotated_vertical(t: float, phi: float) -> tuple[float, float]:
    # K(phi) applied to i t, expanded: ((1 - t^2) s c + i t) / (c^2 + t^2 s^2)
    c = math.cos(phi)
    s = math.sin(phi)
    den = c * c + t * t * s * s
    return (1.0 - t * t) * s * c / den, t / den


def pick_halfplane(R: float, stream: RandomStream, precision_bits: int = DOUBLE_BITS) -> HPoint:
    """Uniform point of the hyperbolic disk of radius ``R`` about i."""
    return halfplane_from_polar(pick_hyperbolic(R, stream), precision_bits)

"""Goodness-of-fit statistics used to check the samplers.

The chi-square tail comes from an internal regularized incomplete gamma
function, so the acceptance checks do not depend on a statistics package.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

_EPS = 1e-16
_TINY = 1e-300


def _gamma_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by its power series (x < a + 1)."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(100000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_contfrac(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by Lentz's continued fraction (x >= a + 1)."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 100000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gammaincc(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a)."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x <= 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_contfrac(a, x)


def chi2_sf(stat: float, dof: int) -> float:
    """Upper tail probability of the chi-square distribution."""
    if dof < 1:
        raise ValueError("dof must be >= 1")
    return gammaincc(dof / 2.0, stat / 2.0)


@dataclass(frozen=True)
class SampleReport:
    group_id: str
    support_size: int
    draws: int
    chi_square: float
    dof: int
    p_value: float
    tv_estimate: float

    def to_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        return (
            f"{self.group_id}: support={self.support_size} draws={self.draws} "
            f"chi2={self.chi_square:.3f} dof={self.dof} p={self.p_value:.4g} tv={self.tv_estimate:.4f}"
        )


def tally(rows: Iterable) -> Counter:
    """Counts of each sample, rows converted to tuples of ints."""
    if isinstance(rows, np.ndarray) and rows.dtype.kind in "iu" and len(rows):
        arr = rows.reshape(len(rows), -1).astype(np.int64)
        lo = int(arr.min())
        span = int(arr.max()) - lo + 1
        m = arr.shape[1]
        if span**m < 2**62:
            # pack each row into one integer, mixed radix
            weights = np.array([span ** (m - 1 - j) for j in range(m)], dtype=np.int64)
            keys, cnt = np.unique((arr - lo) @ weights, return_counts=True)
            digits = (keys[:, None] // weights) % span + lo
            return Counter({tuple(u): int(c) for u, c in zip(digits.tolist(), cnt.tolist())})
        uniq, cnt = np.unique(arr, axis=0, return_counts=True)
        return Counter({tuple(u): int(c) for u, c in zip(uniq.tolist(), cnt.tolist())})
    return Counter(tuple(int(v) for v in np.ravel(r)) for r in rows)


def _normalize(counts: Mapping[Hashable, int], support: Sequence[Hashable] | int | None):
    if support is None:
        support_size = len(counts)
    elif isinstance(support, int):
        support_size = support
        if len(counts) > support_size:
            raise ValueError("more distinct outcomes than the stated support size")
    else:
        allowed = set(support)
        stray = [k for k in counts if k not in allowed]
        if stray:
            raise ValueError(f"{len(stray)} outcomes outside the support, e.g. {stray[0]!r}")
        support_size = len(allowed)
    draws = int(sum(counts.values()))
    return support_size, draws


def tv_distance(counts: Mapping[Hashable, int], support: Sequence[Hashable] | int | None = None) -> float:
    """Total variation between the empirical law and the uniform law on the support."""
    k, n = _normalize(counts, support)
    if n <= 0:
        raise ValueError("no draws")
    seen = sum(abs(c / n - 1.0 / k) for c in counts.values())
    unseen = (k - len(counts)) / k
    return 0.5 * (seen + unseen)


def chi_square_uniform(
    counts: Mapping[Hashable, int], support: Sequence[Hashable] | int | None = None, group_id: str = ""
) -> SampleReport:
    """Pearson goodness of fit against the uniform law on the support.

    Elements of the support that never occurred count as zeros. Requires at
    least five expected draws per element.
    """
    k, n = _normalize(counts, support)
    if k < 2:
        raise ValueError("support must have at least two elements")
    if n < 5 * k:
        raise ValueError(f"under-sampled: {n} draws for support {k} (need >= {5 * k})")
    expected = n / k
    stat = sum((c - expected) ** 2 for c in counts.values()) + (k - len(counts)) * expected**2
    stat /= expected
    return SampleReport(group_id, k, n, stat, k - 1, chi2_sf(stat, k - 1), tv_distance(counts, k))


def chi_square_two_sample(a: Mapping[Hashable, int], b: Mapping[Hashable, int]) -> tuple[float, int, float]:
    """Chi-square test of homogeneity for two samples; returns (statistic, dof, p-value)."""
    keys = sorted(set(a) | set(b), key=repr)
    na, nb = sum(a.values()), sum(b.values())
    n = na + nb
    stat = 0.0
    for key in keys:
        oa, ob = a.get(key, 0), b.get(key, 0)
        tot = oa + ob
        ea, eb = tot * na / n, tot * nb / n
        stat += (oa - ea) ** 2 / ea + (ob - eb) ** 2 / eb
    dof = len(keys) - 1
    return stat, dof, chi2_sf(stat, dof)


def kolmogorov_sf(lam: float) -> float:
    """P(K > lam) for the Kolmogorov distribution."""
    if lam <= 0:
        return 1.0
    if lam < 0.2:
        return 1.0
    total = 0.0
    for k in range(1, 200):
        term = (-1) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam)
        total += term
        if abs(term) < 1e-17:
            break
    return min(1.0, max(0.0, 2.0 * total))


def ks_statistic(samples, cdf) -> float:
    """One-sample Kolmogorov-Smirnov distance sup |F_n - F| for a vectorized CDF."""
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(x)
    F = np.asarray(cdf(x), dtype=np.float64)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_pvalue(d: float, n: float) -> float:
    sn = math.sqrt(n)
    return kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)


def ks_two_sample(a, b) -> tuple[float, float]:
    """Two-sample KS distance and its asymptotic p-value."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    allv = np.concatenate([a, b])
    fa = np.searchsorted(a, allv, side="right") / len(a)
    fb = np.searchsorted(b, allv, side="right") / len(b)
    d = float(np.max(np.abs(fa - fb)))
    ne = len(a) * len(b) / (len(a) + len(b))
    return d, ks_pvalue(d, ne)

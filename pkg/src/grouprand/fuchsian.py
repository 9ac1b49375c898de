"""Greedy reduction to a Dirichlet domain for a Fuchsian group given by side pairings."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hyperbolic import IDENTITY, HPoint, Mobius, hdist, mobius_apply, moving_i_to, pick_halfplane
from .rng import RandomStream

DEFAULT_STEP_CAP = 10**6
DECREASE_TOL = 1e-12


class GreedyReductionError(RuntimeError):
    pass


def _close(m: Mobius, n: Mobius, tol: float) -> bool:
    """Equal as maps of H, i.e. up to an overall sign."""
    a = (m.a, m.b, m.c, m.d)
    b = (n.a, n.b, n.c, n.d)
    return all(abs(u - v) <= tol for u, v in zip(a, b)) or all(abs(u + v) <= tol for u, v in zip(a, b))


@dataclass(frozen=True)
class GeneratorSet:
    """Side pairings of a Dirichlet domain centered at ``basepoint``.

    The identity is implicit (index 0 in traces) and must not be listed.
    """

    gens: tuple[Mobius, ...]
    basepoint: HPoint
    tol: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "gens", tuple(self.gens))
        if not self.gens:
            raise ValueError("generator set is empty")
        for g in self.gens:
            if abs(float(g.det) - 1.0) > self.tol:
                raise ValueError(f"generator {g} does not have determinant 1")
            if _close(g, IDENTITY, self.tol):
                raise ValueError("the identity must not be listed among the generators")
        for g in self.gens:
            inv = g.inverse()
            if not any(_close(inv, h, self.tol) for h in self.gens):
                raise ValueError(f"inverse of {g} missing from the generator set")

    def __len__(self):
        return len(self.gens)

    @classmethod
    def from_json(cls, data, basepoint: HPoint | None = None) -> "GeneratorSet":
        """Accepts ``{"generators": [[[a,b],[c,d]], ...], "basepoint": [re, im]}`` or a bare list."""
        if isinstance(data, dict):
            mats = data["generators"]
            if basepoint is None and "basepoint" in data:
                re, im = data["basepoint"]
                basepoint = HPoint(re, im)
        else:
            mats = data
        if basepoint is None:
            raise ValueError("a basepoint is required")
        gens = [Mobius.from_rows([[float(v) for v in row] for row in m]) for m in mats]
        return cls(tuple(gens), basepoint)

    def to_json(self) -> dict:
        return {
            "generators": [[[float(v) for v in row] for row in g.rows()] for g in self.gens],
            "basepoint": [float(self.basepoint.re), float(self.basepoint.im)],
        }


def load_generator_file(path, basepoint: HPoint | None = None) -> GeneratorSet:
    return GeneratorSet.from_json(json.loads(Path(path).read_text()), basepoint)


def modular_generators(basepoint: HPoint = HPoint(0.0, 2.0)) -> GeneratorSet:
    """S, T, T^-1 for SL(2, Z); with basepoint 2i their Dirichlet domain is the standard one."""
    return GeneratorSet(
        (Mobius(0.0, -1.0, 1.0, 0.0), Mobius(1.0, 1.0, 0.0, 1.0), Mobius(1.0, -1.0, 0.0, 1.0)),
        basepoint,
    )


@dataclass
class ReductionTrace:
    word: list[int]
    final_point: HPoint
    M: Mobius
    distances: list[float] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.word)


def greedy_reduce(
    x: HPoint, gset: GeneratorSet, max_steps: int = DEFAULT_STEP_CAP, tol: float = DECREASE_TOL
) -> ReductionTrace:
    """Move ``x`` toward the basepoint by the best side pairing until none helps.

    Generator indices in the trace are 1-based; 0 stands for the identity.
    A step is taken only if it lowers the distance to the basepoint by more
    than ``tol``; among equally good generators the lowest index wins.
    """
    b = gset.basepoint
    cur = x
    M = IDENTITY
    word: list[int] = []
    dist = hdist(cur, b)
    distances = [dist]
    while True:
        best_i, best_d, best_pt = 0, math.inf, None
        for i, g in enumerate(gset.gens, start=1):
            pt = mobius_apply(g, cur)
            d = hdist(pt, b)
            if d < best_d:
                best_i, best_d, best_pt = i, d, pt
        if not best_d < dist - tol:
            return ReductionTrace(word, cur, M, distances)
        if len(word) >= max_steps:
            raise GreedyReductionError(
                f"no convergence after {max_steps} steps; the group may not be geometrically finite "
                "or the generators may not pair the sides of a Dirichlet domain"
            )
        word.append(best_i)
        M = gset.gens[best_i - 1] @ M
        cur, dist = best_pt, best_d
        distances.append(dist)


def satisfies_dirichlet(z: HPoint, gset: GeneratorSet, tol: float = 1e-9) -> bool:
    d = hdist(z, gset.basepoint)
    return all(d <= hdist(mobius_apply(g, z), gset.basepoint) + tol for g in gset.gens)


@dataclass
class StepStats:
    distances: np.ndarray
    steps: np.ndarray

    @property
    def mean_steps(self) -> float:
        return float(self.steps.mean())

    @property
    def max_steps(self) -> int:
        return int(self.steps.max())

    def regression(self) -> tuple[float, float]:
        """Least-squares (slope, intercept) of steps against starting distance."""
        if len(self.steps) < 2 or np.ptp(self.distances) == 0:
            return 0.0, self.mean_steps
        slope, intercept = np.polyfit(self.distances, self.steps, 1)
        return float(slope), float(intercept)


def step_count_experiment(gset: GeneratorSet, R: float, trials: int, stream: RandomStream) -> StepStats:
    """Reduce ``trials`` uniform points of the disk of radius R about the basepoint."""
    to_b = moving_i_to(gset.basepoint)
    dists, steps = [], []
    for _ in range(trials):
        x = mobius_apply(to_b, pick_halfplane(R, stream))
        trace = greedy_reduce(x, gset)
        dists.append(hdist(x, gset.basepoint))
        steps.append(trace.steps)
    return StepStats(np.array(dists), np.array(steps, dtype=np.int64))

"""Joint distribution of two correlated binary sources.

Cell probabilities are kept in lexicographic order of the bit pair (u, v):
p00, p01, p10, p11, where u is sender 1's bit and v is sender 2's bit.
Marginals follow the convention p1 = Pr(U = 0) and p2 = Pr(V = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleCorrelation, NonPositiveProbability, SumOutOfTolerance

BIT_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))

# from_joint accepts this much drift from unit total and renormalises.
_SUM_TOL = 1e-9


@dataclass(frozen=True)
class JointSourceDistribution:
    """Joint pmf of the two source bits, every cell strictly positive."""

    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self) -> None:
        cells = (self.p00, self.p01, self.p10, self.p11)
        if any(not (p > 0.0) for p in cells):
            raise NonPositiveProbability(f"all four cells must be > 0, got {cells}")
        total = math.fsum(cells)
        if abs(total - 1.0) > 1e-12:
            raise SumOutOfTolerance(f"cells sum to {total!r}, expected 1 within 1e-12")

    @property
    def p1(self) -> float:
        """Pr(U = 0)."""
        return self.p00 + self.p01

    @property
    def p2(self) -> float:
        """Pr(V = 0)."""
        return self.p00 + self.p10

    @property
    def gamma_m(self) -> float:
        """Pearson correlation of the two bits."""
        p1, p2 = self.p1, self.p2
        denom = math.sqrt(p1 * (1.0 - p1) * p2 * (1.0 - p2))
        return (self.p11 - (1.0 - p1) * (1.0 - p2)) / denom

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p00, self.p01, self.p10, self.p11)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=np.float64)

    def prob(self, u: int, v: int) -> float:
        return self.as_tuple()[2 * u + v]

    def cdf(self) -> np.ndarray:
        """Cumulative sums in lexicographic cell order, last entry exactly 1."""
        c = np.cumsum(self.as_array())
        c[-1] = 1.0
        return c


def from_joint(p00: float, p01: float, p10: float, p11: float) -> JointSourceDistribution:
    """Build a distribution from raw cells, renormalising drift up to 1e-9."""
    cells = (p00, p01, p10, p11)
    if any(not (p > 0.0) for p in cells):
        raise NonPositiveProbability(f"all four cells must be > 0, got {cells}")
    total = math.fsum(cells)
    if abs(total - 1.0) > _SUM_TOL:
        raise SumOutOfTolerance(f"cells sum to {total!r}, tolerance is {_SUM_TOL}")
    return JointSourceDistribution(p00 / total, p01 / total, p10 / total, p11 / total)


def from_marginals_correlation(p1: float, p2: float, gamma_m: float) -> JointSourceDistribution:
    """Build the joint pmf with given zero-bit marginals and bit correlation.

    The (1,1) cell is gamma_m * sqrt(p1 (1-p1) p2 (1-p2)) + (1-p1)(1-p2);
    the remaining cells follow from the marginals.
    """
    if not (0.0 < p1 < 1.0 and 0.0 < p2 < 1.0):
        raise ValueError(f"marginals must lie strictly inside (0, 1), got {(p1, p2)}")
    p11 = gamma_m * math.sqrt(p1 * (1.0 - p1) * p2 * (1.0 - p2)) + (1.0 - p1) * (1.0 - p2)
    p10 = (1.0 - p1) - p11
    p01 = (1.0 - p2) - p11
    p00 = 1.0 - p01 - p10 - p11
    cells = (p00, p01, p10, p11)
    if any(not (p > 0.0) for p in cells):
        raise InfeasibleCorrelation(
            f"gamma_m={gamma_m} with marginals {(p1, p2)} yields cells {cells}"
        )
    return JointSourceDistribution(*cells)


def marginals_and_correlation(d: JointSourceDistribution) -> tuple[float, float, float]:
    """Return (p1, p2, gamma_m); inverse of from_marginals_correlation."""
    return d.p1, d.p2, d.gamma_m


def pair_from_uniform(d: JointSourceDistribution, x: float) -> tuple[int, int]:
    """Map one uniform [0,1) draw to a bit pair via the fixed CDF cell order."""
    if x < d.p00:
        return (0, 0)
    if x < d.p00 + d.p01:
        return (0, 1)
    if x < d.p00 + d.p01 + d.p10:
        return (1, 0)
    return (1, 1)


def sample(d: JointSourceDistribution, rng: np.random.Generator) -> tuple[int, int]:
    """Draw one bit pair, consuming exactly one uniform from the stream."""
    return pair_from_uniform(d, rng.random())


def sample_pairs(d: JointSourceDistribution, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw n bit pairs as an (n, 2) int array, one uniform per pair."""
    u = rng.random(n)
    idx = np.searchsorted(d.cdf(), u, side="right")
    idx = np.minimum(idx, 3)
    out = np.empty((n, 2), dtype=np.int64)
    out[:, 0] = idx >> 1
    out[:, 1] = idx & 1
    return out

"""Monte-Carlo estimation of joint MAP decoding error."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np

from . import _kernels
from .errors import EmptySweep
from .geometry import CombinedConstellation, priors_array


@dataclass(frozen=True)
class SimResult:
    trials: int
    errors: int
    p_hat: float
    ci_halfwidth: float
    seed: int


def _decoder_tables(cc: CombinedConstellation, sigma2: float):
    pts = cc.as_array()
    ax = np.ascontiguousarray(pts.real)
    ay = np.ascontiguousarray(pts.imag)
    priors = priors_array(cc)
    bias = np.log(priors) - (ax * ax + ay * ay) / (2.0 * sigma2)
    cdf = np.cumsum(priors)
    cdf[3] = 1.0
    return ax, ay, bias, cdf


def simulate(
    cc: CombinedConstellation,
    sigma2: float,
    trials: int,
    seed: int,
    workers: int = 1,
) -> SimResult:
    """Estimate the error probability with `trials` MAP-decoded samples.

    The draw for trial t depends only on (seed, t), so the result is
    identical for any worker count.
    """
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    if sigma2 <= 0.0:
        raise ValueError("sigma2 must be positive")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    if not 0 <= seed < 2**63:
        raise ValueError("seed must be a nonnegative integer below 2**63")
    if trials == 0:
        return SimResult(0, 0, math.nan, math.nan, seed)

    ax, ay, bias, cdf = _decoder_tables(cc, sigma2)
    edges = [trials * i // workers for i in range(workers + 1)]
    chunks = [(lo, hi - lo) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]

    def run(chunk):
        start, n = chunk
        return _kernels.mc_error_count(ax, ay, bias, cdf, sigma2, seed, start, n)

    if len(chunks) == 1:
        counts = [run(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            counts = list(pool.map(run, chunks))
    errors = int(sum(counts))
    p_hat = errors / trials
    ci = 3.0 * math.sqrt(p_hat * (1.0 - p_hat) / trials)
    return SimResult(trials, errors, p_hat, ci, seed)


def sweep(
    configs: list[tuple[CombinedConstellation, float]],
    trials: int,
    seed: int,
    workers: int = 1,
) -> list[SimResult]:
    """Simulate each (constellation, sigma2) pair with its own sub-seed."""
    if not configs:
        raise EmptySweep("sweep needs at least one configuration")
    out = []
    for i, (cc, sigma2) in enumerate(configs):
        out.append(simulate(cc, sigma2, trials, _kernels.derive_seed(seed, i), workers))
    return out

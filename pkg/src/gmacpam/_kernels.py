"""Hot numeric kernels: a numba fast path and a pure numpy fallback.

Set GMACPAM_NO_NUMBA=1 to force the numpy implementations (the flag is read
at import time). Both backends are always importable individually so tests
and benchmarks can compare them directly.

Randomness is counter based: uniform draw j of trial t is a pure function
of (seed, 3 t + j) through a splitmix-style 64-bit finaliser, so Monte
Carlo error counts are invariant to chunking, worker count and backend.
Each trial consumes exactly three uniforms: one source draw and two
Box-Muller uniforms for the complex noise sample.
"""

from __future__ import annotations

import math
import os

import numpy as np
from scipy.special import ndtr

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_U64 = np.uint64
_INV_2_53 = 2.0**-53

# Relative scale below which two combined points count as coincident,
# mirrored from geometry.COINCIDENCE_RTOL for the batched kernels.
_COINCIDENCE_RTOL = 1e-9


def numba_disabled_by_env() -> bool:
    return os.environ.get("GMACPAM_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag instead
    numba = None
    HAVE_NUMBA = False

USING_NUMBA = HAVE_NUMBA and not numba_disabled_by_env()


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# counter-based uniforms (numpy)
# ---------------------------------------------------------------------------


def mask64(seed: int) -> int:
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    return seed & 0xFFFFFFFFFFFFFFFF


def uniforms_numpy(seed: int, counters: np.ndarray) -> np.ndarray:
    """Uniform [0,1) draws at the given 64-bit counters."""
    z = (_U64(mask64(seed)) + (counters.astype(_U64) + _U64(1)) * _U64(_GOLDEN))
    z = (z ^ (z >> _U64(30))) * _U64(_MIX1)
    z = (z ^ (z >> _U64(27))) * _U64(_MIX2)
    z = z ^ (z >> _U64(31))
    return (z >> _U64(11)).astype(np.float64) * _INV_2_53


def derive_seed(seed: int, index: int) -> int:
    """Deterministic per-configuration sub-seed for sweeps.

    Pure Python int arithmetic, masked to 64 bits; the result is kept below
    2^63 so it can round-trip through any integer argument path.
    """
    mask = 0xFFFFFFFFFFFFFFFF
    z = ((mask64(seed) + _GOLDEN) * _MIX1) & mask
    z = (z + (index + 1) * _GOLDEN) & mask
    z = ((z ^ (z >> 30)) * _MIX1) & mask
    z = ((z ^ (z >> 27)) * _MIX2) & mask
    return (z ^ (z >> 31)) & 0x7FFFFFFFFFFFFFFF


# ---------------------------------------------------------------------------
# Monte-Carlo trial kernel
# ---------------------------------------------------------------------------

_MC_BLOCK = 1 << 20


def mc_error_count_numpy(
    ax: np.ndarray,
    ay: np.ndarray,
    bias: np.ndarray,
    cdf: np.ndarray,
    sigma2: float,
    seed: int,
    start: int,
    n: int,
) -> int:
    """Number of MAP decoding errors over trials [start, start + n)."""
    sigma = math.sqrt(sigma2)
    cdf3 = cdf[:3]
    errors = 0
    done = 0
    while done < n:
        m = min(_MC_BLOCK, n - done)
        t = np.arange(start + done, start + done + m, dtype=_U64) * _U64(3)
        u0 = uniforms_numpy(seed, t)
        u1 = uniforms_numpy(seed, t + _U64(1))
        u2 = uniforms_numpy(seed, t + _U64(2))
        idx = np.searchsorted(cdf3, u0, side="right")
        r = sigma * np.sqrt(-2.0 * np.log1p(-u1))
        ang = (2.0 * math.pi) * u2
        rre = ax[idx] + r * np.cos(ang)
        rim = ay[idx] + r * np.sin(ang)
        scores = bias[None, :] + (np.outer(rre, ax) + np.outer(rim, ay)) / sigma2
        best = np.argmax(scores, axis=1)
        errors += int(np.count_nonzero(best != idx))
        done += m
    return errors


# ---------------------------------------------------------------------------
# batched collinear exact error (for the grid designer)
# ---------------------------------------------------------------------------


def collinear_pe_batch_numpy(
    points: np.ndarray, priors: np.ndarray, sigma2: float
) -> np.ndarray:
    """Exact collinear MAP error for a batch of real-axis constellations.

    points has shape (m, 4) in lexicographic pair order. Mirrors
    analysis.exact_error_collinear, vectorised over candidates.
    """
    pts = np.asarray(points, dtype=np.float64)
    m = pts.shape[0]
    sigma = math.sqrt(sigma2)
    logp = np.log(priors)
    tol = _COINCIDENCE_RTOL * np.maximum(np.max(np.abs(pts), axis=1), 1e-300)
    correct = np.zeros(m)
    for uv in range(4):
        lo = np.full(m, -np.inf)
        hi = np.full(m, np.inf)
        alive = np.ones(m, dtype=bool)
        for lm in range(4):
            if lm == uv:
                continue
            c = pts[:, lm] - pts[:, uv]
            deg = np.abs(c) <= tol
            if priors[uv] != priors[lm]:
                wins = priors[uv] > priors[lm]
            else:
                wins = uv < lm
            if not wins:
                alive &= ~deg
            t = c * c / 2.0 + sigma2 * (logp[uv] - logp[lm])
            ratio = t / np.where(deg, 1.0, c)
            pos = (c > 0.0) & ~deg
            neg = (c < 0.0) & ~deg
            hi = np.where(pos, np.minimum(hi, ratio), hi)
            lo = np.where(neg, np.maximum(lo, ratio), lo)
        width = np.clip(ndtr(hi / sigma) - ndtr(lo / sigma), 0.0, 1.0)
        correct += priors[uv] * np.where(alive, width, 0.0)
    return 1.0 - correct


# ---------------------------------------------------------------------------
# numba fast path
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    _njit = numba.njit(cache=True, nogil=True)

    @_njit
    def _uniform_nb(seed: np.uint64, counter: np.uint64) -> float:
        z = seed + (counter + _U64(1)) * _U64(_GOLDEN)
        z = (z ^ (z >> _U64(30))) * _U64(_MIX1)
        z = (z ^ (z >> _U64(27))) * _U64(_MIX2)
        z = z ^ (z >> _U64(31))
        return (z >> _U64(11)) * _INV_2_53

    @_njit
    def mc_error_count_numba(ax, ay, bias, cdf, sigma2, seed, start, n):
        sigma = math.sqrt(sigma2)
        seed_u = _U64(seed)
        errors = 0
        for t in range(start, start + n):
            base = _U64(3 * t)
            u0 = _uniform_nb(seed_u, base)
            if u0 < cdf[0]:
                idx = 0
            elif u0 < cdf[1]:
                idx = 1
            elif u0 < cdf[2]:
                idx = 2
            else:
                idx = 3
            u1 = _uniform_nb(seed_u, base + _U64(1))
            u2 = _uniform_nb(seed_u, base + _U64(2))
            r = sigma * math.sqrt(-2.0 * math.log1p(-u1))
            ang = (2.0 * math.pi) * u2
            rre = ax[idx] + r * math.cos(ang)
            rim = ay[idx] + r * math.sin(ang)
            best = 0
            best_score = bias[0] + (rre * ax[0] + rim * ay[0]) / sigma2
            for k in range(1, 4):
                s = bias[k] + (rre * ax[k] + rim * ay[k]) / sigma2
                if s > best_score:
                    best_score = s
                    best = k
            if best != idx:
                errors += 1
        return errors

    @_njit
    def collinear_pe_batch_numba(points, priors, sigma2):
        m = points.shape[0]
        sigma = math.sqrt(sigma2)
        inv_sigma = 1.0 / sigma
        logp = np.log(priors)
        out = np.empty(m)
        for i in range(m):
            scale = 1e-300
            for j in range(4):
                a = abs(points[i, j])
                if a > scale:
                    scale = a
            tol = _COINCIDENCE_RTOL * scale
            correct = 0.0
            for uv in range(4):
                lo = -np.inf
                hi = np.inf
                alive = True
                for lm in range(4):
                    if lm == uv:
                        continue
                    c = points[i, lm] - points[i, uv]
                    if abs(c) <= tol:
                        if priors[uv] != priors[lm]:
                            wins = priors[uv] > priors[lm]
                        else:
                            wins = uv < lm
                        if not wins:
                            alive = False
                            break
                        continue
                    t = c * c / 2.0 + sigma2 * (logp[uv] - logp[lm])
                    ratio = t / c
                    if c > 0.0:
                        if ratio < hi:
                            hi = ratio
                    else:
                        if ratio > lo:
                            lo = ratio
                if not alive or hi <= lo:
                    continue
                upper = 1.0 if hi == np.inf else 0.5 * math.erfc(-hi * inv_sigma / math.sqrt(2.0))
                lower = 0.0 if lo == -np.inf else 0.5 * math.erfc(-lo * inv_sigma / math.sqrt(2.0))
                width = upper - lower
                if width > 0.0:
                    correct += priors[uv] * (width if width < 1.0 else 1.0)
            out[i] = 1.0 - correct
        return out

else:  # pragma: no cover - exercised via the env flag instead
    mc_error_count_numba = None
    collinear_pe_batch_numba = None


if USING_NUMBA:
    mc_error_count = mc_error_count_numba
    collinear_pe_batch = collinear_pe_batch_numba
else:
    mc_error_count = mc_error_count_numpy
    collinear_pe_batch = collinear_pe_batch_numpy


def warmup() -> None:
    """Trigger jit compilation so timing runs exclude compile cost."""
    if not USING_NUMBA:
        return
    ax = np.array([-1.0, 0.0, 0.0, 1.0])
    ay = np.zeros(4)
    bias = np.zeros(4)
    cdf = np.array([0.25, 0.5, 0.75, 1.0])
    mc_error_count(ax, ay, bias, cdf, 0.1, 1, 0, 8)
    collinear_pe_batch(np.array([[-1.0, 0.0, 0.0, 1.0]]), cdf / cdf.sum(), 0.1)

"""Exact MAP error probabilities and analytic bounds.

For a transmitted pair (u, v) and a candidate (l, m), define the pairwise
decision statistic

    Delta_{uv,lm} = Re[N conj(a_lm - a_uv)] - |a_lm - a_uv|^2 / 2
                    - sigma2 ln(p_uv / p_lm),

which is Gaussian with mean -|a_lm - a_uv|^2/2 - sigma2 ln(p_uv/p_lm) and
standard deviation sigma |a_lm - a_uv|. Correct decoding of (u, v) is the
event that all three statistics are negative.

Two exact evaluation paths cover every constellation:

* collinear (all points on the real axis): each Delta < 0 condition is a
  half-line constraint on Re[N], so the correct region is an interval and
  the miss probability is the pair of Gaussian tails past its two binding
  thresholds;
* planar: the diagonal statistic decomposes as
  Delta_{uv, comp(uv)} = Delta_1 + Delta_2 + alpha_uv with
  alpha_uv = sigma2 ln(p_uv p_compuv / (p_adj1 p_adj2)) - Re[x conj(y)],
  where x, y are the two adjacent difference vectors. When alpha_uv <= 0
  the adjacent constraints imply the diagonal one and the miss probability
  is T_adj1 + T_adj2 minus their joint exceedance; when alpha_uv > 0 the
  correction beta (the wedge {x<0, y<0, x+y>-alpha} mass) collapses by the
  same decomposition into bivariate orthant terms, so no quadrature is ever
  needed and accuracy is set by the orthant evaluator (~1e-14).

Both paths accumulate tail terms directly (never 1 - P_correct), keeping
relative precision at arbitrarily small error rates. The union bound sums
p_uv Pr(Delta_{uv,lm} > 0) over ordered pairs, starting each per-pair sum
from the exact path's own leading floats so the bound cannot round below
the exact value; the high-SNR variants replace the tilted thresholds by
plain midpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, ndtr, owens_t

from .errors import (
    CaseMismatch,
    CollinearInput,
    CorrelationAtUnity,
    NonBijective,
    NotCollinear,
)
from .geometry import BIT_PAIRS, COINCIDENCE_RTOL, CombinedConstellation, is_bijective

_TWO_PI = 2.0 * math.pi
_SQRT2 = math.sqrt(2.0)

# |rho| above this is delegated to the collinear path.
_RHO_LIMIT = 1.0 - 1e-12


def qfunc(x):
    """Gaussian tail probability Q(x) = 0.5 erfc(x / sqrt(2)).

    Stays relatively accurate far into the tail (erfc based, no 1 - CDF
    cancellation); underflows gracefully to 0 near x ~ 38.6.
    """
    return 0.5 * erfc(x / _SQRT2)


@dataclass(frozen=True)
class DeltaStats:
    """Mean and standard deviation of one pairwise decision statistic."""

    mu: float
    sd: float
    degenerate: bool


@dataclass(frozen=True)
class ErrorReport:
    """System error probability with per-pair conditional correct probabilities.

    p_c_per_pair holds Pr(correct | (u, v) sent) in lexicographic pair
    order; p_err_exact is the prior-weighted sum of the per-pair miss
    probabilities 1 - p_c_uv, accumulated in tail form so small values keep
    relative precision. method is 'collinear', 'planar' or 'closed-form'.
    """

    p_err_exact: float
    p_c_per_pair: tuple[float, float, float, float]
    method: str


def _coincidence_tol(cc: CombinedConstellation) -> float:
    return COINCIDENCE_RTOL * max(cc.scale(), 1e-300)


def is_collinear(cc: CombinedConstellation, rtol: float = COINCIDENCE_RTOL) -> bool:
    """True when every combined point sits on the real axis within rtol."""
    pts = cc.as_array()
    return float(np.max(np.abs(pts.imag))) <= rtol * max(cc.scale(), 1e-300)


def _wins_degenerate(uv_idx: int, lm_idx: int, p_uv: float, p_lm: float) -> bool:
    """Does (u,v) keep the shared region against a coincident rival (l,m)?"""
    if p_uv != p_lm:
        return p_uv > p_lm
    return uv_idx < lm_idx


def delta_stats(
    cc: CombinedConstellation, uv: tuple[int, int], lm: tuple[int, int], sigma2: float
) -> DeltaStats:
    """Gaussian parameters of Delta_{uv,lm}; degenerate when the points coincide."""
    a_uv = cc.point(*uv)
    a_lm = cc.point(*lm)
    p = cc.priors
    dist = abs(a_lm - a_uv)
    mu = -(dist**2) / 2.0 - sigma2 * math.log(p.prob(*uv) / p.prob(*lm))
    degenerate = dist <= _coincidence_tol(cc)
    return DeltaStats(mu=mu, sd=math.sqrt(sigma2) * dist, degenerate=degenerate)


def _exceed_bound(
    cc: CombinedConstellation, sigma2: float, uv: tuple[int, int], lm: tuple[int, int]
) -> float:
    """Standardised bound z with Pr(Delta_{uv,lm} > 0) = Phi(z).

    Coincident pairs resolve deterministically by the same prior /
    lexicographic rule the decoder applies: -inf when (u,v) keeps the shared
    point, +inf when it loses it.
    """
    st = delta_stats(cc, uv, lm, sigma2)
    if st.degenerate:
        uv_idx = 2 * uv[0] + uv[1]
        lm_idx = 2 * lm[0] + lm[1]
        priors = cc.priors.as_tuple()
        wins = _wins_degenerate(uv_idx, lm_idx, priors[uv_idx], priors[lm_idx])
        return -math.inf if wins else math.inf
    return st.mu / st.sd


def _pairwise_error_prob(
    cc: CombinedConstellation, sigma2: float, uv: tuple[int, int], lm: tuple[int, int]
) -> float:
    """Pr(Delta_{uv,lm} > 0): the pairwise MAP error from (u,v) toward (l,m).

    Both exact paths and the union bound draw their tail terms from here so
    the shared leading terms are bit-identical.
    """
    return float(qfunc(-_exceed_bound(cc, sigma2, uv, lm)))


# ---------------------------------------------------------------------------
# collinear exact path
# ---------------------------------------------------------------------------


def collinear_pair_threshold(
    cc: CombinedConstellation, sigma2: float, uv: tuple[int, int], lm: tuple[int, int]
) -> tuple[str, float]:
    """One rival's constraint on Re[N] for the collinear MAP region of (u, v).

    A rival (l, m) with signed separation c = a_lm - a_uv demands
    c Re[N] < c^2/2 + sigma2 ln(p_uv/p_lm): ('upper', t/c) when c > 0,
    ('lower', t/c) when c < 0. A coincident rival gives ('win', nan) or
    ('lose', nan) by prior comparison, lexicographic order on exact ties.
    """
    if not is_collinear(cc):
        raise NotCollinear("combined constellation has points off the real axis")
    pts = cc.as_array().real
    priors = cc.priors.as_tuple()
    uv_idx = 2 * uv[0] + uv[1]
    lm_idx = 2 * lm[0] + lm[1]
    if lm_idx == uv_idx:
        raise ValueError("rival must differ from the transmitted pair")
    c = pts[lm_idx] - pts[uv_idx]
    if abs(c) <= _coincidence_tol(cc):
        wins = _wins_degenerate(uv_idx, lm_idx, priors[uv_idx], priors[lm_idx])
        return ("win" if wins else "lose"), math.nan
    t = c * c / 2.0 + sigma2 * math.log(priors[uv_idx] / priors[lm_idx])
    return ("upper" if c > 0.0 else "lower"), t / c


def collinear_decision_interval(
    cc: CombinedConstellation, sigma2: float, uv: tuple[int, int]
) -> tuple[float, float, bool]:
    """Interval of Re[N] values that decode to (u, v), with a liveness flag.

    Intersects the three rival constraints from collinear_pair_threshold;
    a losing coincident rival kills the region outright.
    """
    lo = -math.inf
    hi = math.inf
    for lm in BIT_PAIRS:
        if lm == uv:
            continue
        kind, value = collinear_pair_threshold(cc, sigma2, uv, lm)
        if kind == "lose":
            return 0.0, 0.0, False
        if kind == "upper":
            hi = min(hi, value)
        elif kind == "lower":
            lo = max(lo, value)
    return lo, hi, True


def _collinear_uv_terms(
    cc: CombinedConstellation, sigma2: float, uv: tuple[int, int]
) -> tuple[float, float]:
    """(miss probability, union term) for one transmitted pair on the real axis.

    The miss probability sums the two tails past the binding thresholds, so
    it keeps full relative precision however small it gets. The union term
    starts from those same two floats and then adds the remaining rivals'
    terms; floating-point addition of non-negatives is monotone, so the
    computed bound can never round below the computed exact value.
    """
    binding_up: tuple[float, tuple[int, int]] | None = None
    binding_lo: tuple[float, tuple[int, int]] | None = None
    rest = []
    dead = False
    for lm in BIT_PAIRS:
        if lm == uv:
            continue
        kind, value = collinear_pair_threshold(cc, sigma2, uv, lm)
        if kind == "upper" and (binding_up is None or value < binding_up[0]):
            if binding_up is not None:
                rest.append(binding_up[1])
            binding_up = (value, lm)
        elif kind == "lower" and (binding_lo is None or value > binding_lo[0]):
            if binding_lo is not None:
                rest.append(binding_lo[1])
            binding_lo = (value, lm)
        else:
            dead = dead or kind == "lose"
            rest.append(lm)
    q_up = 0.0 if binding_up is None else _pairwise_error_prob(cc, sigma2, uv, binding_up[1])
    q_lo = 0.0 if binding_lo is None else _pairwise_error_prob(cc, sigma2, uv, binding_lo[1])
    core = q_up + q_lo
    union_term = core
    for lm in rest:
        union_term += _pairwise_error_prob(cc, sigma2, uv, lm)
    lo = -math.inf if binding_lo is None else binding_lo[0]
    hi = math.inf if binding_up is None else binding_up[0]
    if dead:
        miss = 1.0
    elif lo >= hi:
        # Empty region: the true miss is exactly 1, and the two tails overlap
        # to at least that in exact arithmetic.
        miss = min(1.0, core)
    else:
        miss = core
    return miss, union_term


def exact_error_collinear(cc: CombinedConstellation, sigma2: float) -> ErrorReport:
    """Exact MAP error probability for a real-axis combined constellation."""
    priors = cc.priors.as_tuple()
    miss = [_collinear_uv_terms(cc, sigma2, uv)[0] for uv in BIT_PAIRS]
    p_err = math.fsum(p * m for p, m in zip(priors, miss))
    p_c = tuple(1.0 - m for m in miss)
    return ErrorReport(p_err_exact=min(max(p_err, 0.0), 1.0), p_c_per_pair=p_c, method="collinear")


# ---------------------------------------------------------------------------
# bivariate normal lower orthant
# ---------------------------------------------------------------------------


def bvn_lower_orthant(h: float, k: float, rho: float) -> float:
    """Pr(X <= h, Y <= k) for standard bivariate normal with correlation rho.

    Evaluated through Owen's T identity,
    Phi2 = (Phi(h) + Phi(k))/2 - T(h, ah) - T(k, ak) - c, which is accurate
    to ~1e-14. Correlations within 1e-12 of +/-1 are rejected; callers should
    use the collinear path for effectively one-dimensional geometry.
    """
    if not abs(rho) <= _RHO_LIMIT:
        raise CorrelationAtUnity(f"|rho| = {abs(rho)} exceeds {_RHO_LIMIT}")
    if math.isinf(h) or math.isinf(k):
        if h == -math.inf or k == -math.inf:
            return 0.0
        if h == math.inf and k == math.inf:
            return 1.0
        return float(ndtr(k if h == math.inf else h))
    if rho == 0.0:
        return float(ndtr(h) * ndtr(k))
    if h == 0.0 and k == 0.0:
        return 0.25 + math.asin(rho) / _TWO_PI
    # Nudging an exactly zero bound sidesteps the T limit cases; the induced
    # error is below phi(0) * 1e-14.
    hh = h if h != 0.0 else 1e-14
    kk = k if k != 0.0 else 1e-14
    s = math.sqrt((1.0 - rho) * (1.0 + rho))
    ah = (kk / hh - rho) / s
    ak = (hh / kk - rho) / s
    c = 0.0 if hh * kk > 0.0 else 0.5
    val = 0.5 * (ndtr(hh) + ndtr(kk)) - owens_t(hh, ah) - owens_t(kk, ak) - c
    return min(1.0, max(0.0, float(val)))


# ---------------------------------------------------------------------------
# planar exact path
# ---------------------------------------------------------------------------


def _pair_corr(c_a: complex, c_b: complex) -> float:
    """Correlation of two pairwise statistics: cosine between their
    difference vectors, clipped away from +-1 for the orthant evaluator."""
    denom = abs(c_a) * abs(c_b)
    if denom == 0.0:
        return 0.0
    rho = (c_a.real * c_b.real + c_a.imag * c_b.imag) / denom
    return min(max(rho, -_RHO_LIMIT), _RHO_LIMIT)


def _planar_uv_terms(
    cc: CombinedConstellation, sigma2: float, uv: tuple[int, int]
) -> tuple[float, float]:
    """(miss probability, union term) for one pair off the real axis.

    Inclusion-exclusion over the three rival exceedance events, split on the
    diagonal offset alpha_uv. For alpha_uv <= 0 the two adjacent conditions
    already imply the diagonal one inside the correct region, so
    miss = T_x + T_y - J with J the joint adjacent exceedance. For
    alpha_uv > 0 the joint adjacent event is a subset of the diagonal event,
    collapsing the triple term, and miss = T_x + T_y + T_d - B_dx - B_dy
    with B the diagonal-adjacent joint exceedances. Every piece is a small
    orthant quantity, so miss keeps relative precision at high SNR; the
    union term extends the same partial sums by non-negative tails only, so
    it cannot round below miss.
    """
    u, v = uv
    adj_x = (1 - u, v)
    adj_y = (u, 1 - v)
    diag = (1 - u, 1 - v)
    z_x = _exceed_bound(cc, sigma2, uv, adj_x)
    z_y = _exceed_bound(cc, sigma2, uv, adj_y)
    z_d = _exceed_bound(cc, sigma2, uv, diag)
    t_x = float(qfunc(-z_x))
    t_y = float(qfunc(-z_y))
    t_d = float(qfunc(-z_d))
    pts = cc.as_array()
    priors = cc.priors.as_tuple()
    base = pts[2 * u + v]
    c_x = pts[2 * adj_x[0] + adj_x[1]] - base
    c_y = pts[2 * adj_y[0] + adj_y[1]] - base
    c_d = pts[2 * diag[0] + diag[1]] - base
    cross = c_x.real * c_y.real + c_x.imag * c_y.imag
    prior_ratio = (
        priors[2 * u + v] * priors[2 * diag[0] + diag[1]]
        / (priors[2 * adj_x[0] + adj_x[1]] * priors[2 * adj_y[0] + adj_y[1]])
    )
    alpha = sigma2 * math.log(prior_ratio) - cross
    adj = t_x + t_y
    union_term = adj + t_d
    if alpha > 0.0:
        b_dx = bvn_lower_orthant(z_d, z_x, _pair_corr(c_d, c_x))
        b_dy = bvn_lower_orthant(z_d, z_y, _pair_corr(c_d, c_y))
        miss = union_term - b_dx - b_dy
    else:
        joint = bvn_lower_orthant(z_x, z_y, _pair_corr(c_x, c_y))
        miss = adj - joint
    return min(1.0, max(0.0, miss)), union_term


def exact_error_planar(cc: CombinedConstellation, sigma2: float) -> ErrorReport:
    """Exact MAP error probability for a genuinely two-dimensional constellation.

    Each conditional miss probability combines the rival tail terms with
    their bivariate-normal joint exceedances; the branch on the diagonal
    offset alpha_uv absorbs the wedge correction exactly.
    """
    if is_collinear(cc):
        raise CollinearInput("use exact_error_collinear for real-axis constellations")
    if not is_bijective(cc):
        raise NonBijective("combined points coincide; planar analysis requires distinct points")
    priors = cc.priors.as_tuple()
    miss = [_planar_uv_terms(cc, sigma2, uv)[0] for uv in BIT_PAIRS]
    p_err = math.fsum(p * m for p, m in zip(priors, miss))
    p_c = tuple(1.0 - m for m in miss)
    return ErrorReport(p_err_exact=min(max(p_err, 0.0), 1.0), p_c_per_pair=p_c, method="planar")


def exact_error(cc: CombinedConstellation, sigma2: float) -> ErrorReport:
    """Exact MAP error probability, routed by constellation geometry."""
    if is_collinear(cc):
        return exact_error_collinear(cc, sigma2)
    return exact_error_planar(cc, sigma2)


def closed_form_qam(d1_len: float, d2_len: float, sigma: float) -> float:
    """Error probability of an orthogonal pair of antipodal senders.

    With uniform independent sources and gamma_phi = 0 the two senders
    decouple, giving 1 - (1 - Q(d1/2s))(1 - Q(d2/2s)), expanded to
    Q1 + Q2 - Q1 Q2 so the tails survive when both are tiny.
    """
    q1 = qfunc(d1_len / (2.0 * sigma))
    q2 = qfunc(d2_len / (2.0 * sigma))
    return q1 + q2 - q1 * q2


# ---------------------------------------------------------------------------
# union bounds
# ---------------------------------------------------------------------------


def union_bound(cc: CombinedConstellation, sigma2: float) -> float:
    """Sum of pairwise error probabilities p_uv Pr(Delta_{uv,lm} > 0).

    Coincident pairs contribute their deterministic outcome: the full prior
    when the rival wins the shared point, nothing when it loses. Per-pair
    terms accumulate in the order the exact path of the same geometry uses,
    so the computed bound never rounds below the computed exact error.
    """
    priors = cc.priors.as_tuple()
    per_uv = _collinear_uv_terms if is_collinear(cc) else _planar_uv_terms
    terms = (per_uv(cc, sigma2, uv)[1] for uv in BIT_PAIRS)
    return math.fsum(p * t for p, t in zip(priors, terms))


def high_snr_union_bound(
    d1_len: float, d2_len: float, psi: float, priors, sigma: float
) -> float:
    """Union bound with prior-tilted thresholds replaced by midpoints.

    The four distinct pairwise distances are |d1|, |d2| (each over priors
    summing to one) and the two diagonals sqrt(|d1|^2 + |d2|^2 +- 2 |d1| |d2|
    cos psi), weighted by p00 + p11 and p01 + p10 respectively.
    """
    if not (d1_len > 0.0 and d2_len > 0.0):
        raise ValueError("separations must be positive")
    p00, p01, p10, p11 = _priors_tuple(priors)
    cos_psi = math.cos(psi)
    diag_plus = math.sqrt(d1_len**2 + d2_len**2 + 2.0 * d1_len * d2_len * cos_psi)
    diag_minus = math.sqrt(max(d1_len**2 + d2_len**2 - 2.0 * d1_len * d2_len * cos_psi, 0.0))
    two_sigma = 2.0 * sigma
    return (
        qfunc(d1_len / two_sigma)
        + qfunc(d2_len / two_sigma)
        + (p00 + p11) * qfunc(diag_plus / two_sigma)
        + (p01 + p10) * qfunc(diag_minus / two_sigma)
    )


def _priors_tuple(priors) -> tuple[float, float, float, float]:
    if hasattr(priors, "as_tuple"):
        return priors.as_tuple()
    p00, p01, p10, p11 = priors
    return float(p00), float(p01), float(p10), float(p11)


# ---------------------------------------------------------------------------
# collinear high-SNR closed forms
# ---------------------------------------------------------------------------

# The eight sign cases of (d1, d2, |d1| vs |d2|) for collinear geometry.
_SIGN_CASES = {
    1: (1, 1, 1),
    2: (1, 1, -1),
    3: (1, -1, 1),
    4: (1, -1, -1),
    5: (-1, 1, 1),
    6: (-1, 1, -1),
    7: (-1, -1, 1),
    8: (-1, -1, -1),
}


def collinear_sign_case(d1: float, d2: float) -> int:
    """Classify signed separations into sign cases 1 through 8.

    Zero separations and |d1| = |d2| sit on case boundaries and are
    rejected.
    """
    if d1 == 0.0 or d2 == 0.0 or abs(d1) == abs(d2):
        raise CaseMismatch(f"(d1, d2) = {(d1, d2)} lies on a sign-case boundary")
    key = (1 if d1 > 0 else -1, 1 if d2 > 0 else -1, 1 if abs(d1) > abs(d2) else -1)
    for case, pattern in _SIGN_CASES.items():
        if key == pattern:
            return case
    raise CaseMismatch(f"unclassifiable separations {(d1, d2)}")


def high_snr_correct_prob(case: int, d1: float, d2: float, priors, sigma: float) -> float:
    """Closed-form high-SNR system correct probability for one sign case.

    These expressions drop the sigma2 ln(prior ratio) threshold tilts, so
    they approach the exact collinear result as sigma -> 0. The requested
    case must match the actual signs of (d1, d2).
    """
    if case not in _SIGN_CASES:
        raise CaseMismatch(f"case must be 1..8, got {case}")
    if collinear_sign_case(d1, d2) != case:
        raise CaseMismatch(
            f"(d1, d2) = {(d1, d2)} does not satisfy the conditions of case {case}"
        )
    p00, p01, p10, p11 = _priors_tuple(priors)
    s_anti = p10 + p01
    s_diag = p00 + p11
    two_sigma = 2.0 * sigma
    if case == 1:
        return 1.0 - qfunc(d2 / two_sigma) - s_anti * qfunc((d1 - d2) / two_sigma)
    if case == 2:
        return 1.0 - qfunc(d1 / two_sigma) - s_anti * qfunc((d2 - d1) / two_sigma)
    if case == 3:
        return qfunc(d2 / two_sigma) - s_diag * qfunc((d1 + d2) / two_sigma)
    if case == 4:
        return s_anti - qfunc(d1 / two_sigma) + s_diag * qfunc((d1 + d2) / two_sigma)
    if case == 5:
        return s_anti - qfunc(d2 / two_sigma) + s_diag * qfunc((d1 + d2) / two_sigma)
    if case == 6:
        return qfunc(d1 / two_sigma) - s_diag * qfunc((d1 + d2) / two_sigma)
    if case == 7:
        return qfunc(d2 / two_sigma) - s_anti * qfunc((d2 - d1) / two_sigma)
    return qfunc(d1 / two_sigma) - s_anti * qfunc((d1 - d2) / two_sigma)

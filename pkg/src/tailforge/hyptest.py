"""Binary hypothesis testing: exact error exponents and martingale lower bounds.

Hypotheses H1: X ~ P1 and H2: X ~ P2 on a common finite alphabet with all
masses positive. Decisions threshold the normalized log-likelihood ratio
L_n/n against an upper threshold lambda_bar (decide H1 above) and a lower
threshold lambda_under (decide H2 below); in between an erasure is
declared. Exponents are reported in nats per symbol and are prior-free
(priors only scale the mixed error probabilities, never their exponents).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ._optim import golden_max, golden_min
from .bounds import _divergence_exponent
from .pmf import FinitePmf

_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class HypothesisPair:
    """A pair of strictly positive pmfs on one alphabet, with priors."""

    p1: FinitePmf
    p2: FinitePmf
    priors: tuple[float, float] = (0.5, 0.5)

    def __post_init__(self):
        self.p1.require_same_alphabet(self.p2)
        if not (self.p1.strictly_positive and self.p2.strictly_positive):
            raise ValueError("both pmfs must be strictly positive")
        pi1, pi2 = self.priors
        if not (0.0 < pi1 < 1.0 and 0.0 < pi2 < 1.0):
            raise ValueError("priors must lie in (0, 1)")
        if abs(pi1 + pi2 - 1.0) > 1e-9:
            raise ValueError("priors must sum to 1")

    @classmethod
    def from_probs(cls, p1, p2, priors=(0.5, 0.5)) -> "HypothesisPair":
        symbols = tuple(range(len(p1)))
        return cls(FinitePmf(symbols, tuple(p1)), FinitePmf(symbols, tuple(p2)), priors)

    def log_lr(self) -> np.ndarray:
        """ln(P1(x)/P2(x)) per symbol."""
        return np.log(self.p1.as_array() / self.p2.as_array())

    @property
    def d12(self) -> float:
        """D(P1||P2) in nats."""
        return float(np.dot(self.p1.as_array(), self.log_lr()))

    @property
    def d21(self) -> float:
        """D(P2||P1) in nats."""
        return float(np.dot(self.p2.as_array(), -self.log_lr()))


@dataclass(frozen=True)
class Thresholds:
    """Normalized log-LR thresholds; lambda_under <= lambda_bar."""

    lambda_bar: float
    lambda_under: float

    def __post_init__(self):
        if self.lambda_under > self.lambda_bar:
            raise ValueError("lambda_under must not exceed lambda_bar")

    @classmethod
    def single(cls, lam: float = 0.0) -> "Thresholds":
        return cls(lam, lam)

    def validate_for(self, pair: HypothesisPair) -> None:
        if not (-pair.d21 < self.lambda_under and self.lambda_bar < pair.d12):
            raise ValueError(
                "thresholds must satisfy -D(P2||P1) < lambda_under <= "
                "lambda_bar < D(P1||P2); got "
                f"[{self.lambda_under}, {self.lambda_bar}] vs "
                f"(-{pair.d21}, {pair.d12})"
            )


def log_mgf_h(pair: HypothesisPair, t: float) -> float:
    """H(t) = ln sum_x P1(x)^(1-t) P2(x)^t; convex with H(0) = H(1) = 0."""
    lp1 = np.log(pair.p1.as_array())
    lp2 = np.log(pair.p2.as_array())
    exponents = (1.0 - t) * lp1 + t * lp2
    peak = float(np.max(exponents))
    return peak + math.log(float(np.sum(np.exp(exponents - peak))))


def rate_function(pair: HypothesisPair, r: float) -> float:
    """Fenchel-Legendre transform I(r) = sup_t (t r - H(t)).

    This is the large-deviations rate of the per-symbol statistic
    V = ln(P2(X)/P1(X)) under P1; it vanishes at the mean -D(P1||P2), is
    convex, and is +inf outside [min V, max V].
    """
    v = -pair.log_lr()
    vmin, vmax = float(np.min(v)), float(np.max(v))
    p1 = pair.p1.as_array()
    if r >= vmax:
        if r <= vmax + _EDGE_TOL:
            return -math.log(float(np.sum(p1[v >= vmax - _EDGE_TOL])))
        return math.inf
    if r <= vmin:
        if r >= vmin - _EDGE_TOL:
            return -math.log(float(np.sum(p1[v <= vmin + _EDGE_TOL])))
        return math.inf

    def objective(t: float) -> float:
        return t * r - log_mgf_h(pair, t)

    lo, hi = -1.0, 2.0
    while objective(lo) > objective(lo + 1e-3) and lo > -1e6:
        lo *= 2.0
    while objective(hi) > objective(hi - 1e-3) and hi < 1e6:
        hi *= 2.0
    _, val = golden_max(objective, lo, hi, xtol=1e-12)
    return max(0.0, val)


def chernoff_information(pair: HypothesisPair) -> float:
    """C(P1, P2) = -min_{t in [0,1]} H(t); symmetric in the pair."""
    _, hmin = golden_min(lambda t: log_mgf_h(pair, t), 0.0, 1.0, xtol=1e-12)
    return max(0.0, -hmin)


@dataclass(frozen=True)
class ExactExponents:
    """Cramer exponents of the four error/erasure events and their minima."""

    alpha1: float  # error-or-erasure under H1
    alpha2: float  # error under H1
    beta1: float  # error-or-erasure under H2
    beta2: float  # error under H2
    err_or_erasure: float  # exponent of pi1*alpha1 + pi2*beta1
    error: float  # exponent of pi1*alpha2 + pi2*beta2


def exact_exponents(pair: HypothesisPair, thresholds: Thresholds) -> ExactExponents:
    """Exact exponents via the rate function, with lambda_i = -thresholds."""
    thresholds.validate_for(pair)
    lam1 = -thresholds.lambda_bar
    lam2 = -thresholds.lambda_under
    i1 = rate_function(pair, lam1)
    i2 = rate_function(pair, lam2)
    return ExactExponents(
        alpha1=i1,
        alpha2=i2,
        beta1=i2 - lam2,
        beta2=i1 - lam1,
        err_or_erasure=min(i1, i2 - lam2),
        error=min(i2, i1 - lam1),
    )


@dataclass(frozen=True)
class MartingaleParams:
    """Jump/variance statistics of the revealed-sample log-LR martingales.

    Under H_i the Doob martingale of L_n has jumps bounded by d_i;
    sigma_i^2 bounds their conditional second moment. The epsilons are the
    threshold gaps and delta_{i,j} = eps_{i,j}/d_i (j = 1: error-or-
    erasure event, j = 2: error-only event).
    """

    d1: float
    d2: float
    sigma1sq: float
    sigma2sq: float
    eps11: float
    eps21: float
    eps12: float
    eps22: float
    gamma1: float
    gamma2: float
    delta11: float
    delta21: float
    delta12: float
    delta22: float


def martingale_params(
    pair: HypothesisPair, thresholds: Optional[Thresholds] = None
) -> MartingaleParams:
    """Compute d_i, sigma_i^2, gamma_i and the per-event deltas.

    Default thresholds are the single zero threshold. sigma2^2 is the
    second moment of ln(P2/P1) about +D(P2||P1) (not the centered
    variance); this convention is what the reference exponent values
    (e.g. gamma2 = 7/9 for the swapped (0.4, 0.6) pair) pin down, and it
    only lowers the resulting lower bounds, so validity is preserved.
    """
    if thresholds is None:
        thresholds = Thresholds.single(0.0)
    thresholds.validate_for(pair)
    llr = pair.log_lr()
    p1 = pair.p1.as_array()
    p2 = pair.p2.as_array()
    d12, d21 = pair.d12, pair.d21
    d1 = float(np.max(np.abs(llr - d12)))
    d2 = float(np.max(np.abs(-llr - d21)))
    sigma1sq = float(np.dot(p1, (llr - d12) ** 2))
    sigma2sq = float(np.dot(p2, (-llr + d21) ** 2))
    eps11 = d12 - thresholds.lambda_bar
    eps21 = d21 + thresholds.lambda_under
    eps12 = d12 - thresholds.lambda_under
    eps22 = d21 + thresholds.lambda_bar
    return MartingaleParams(
        d1=d1,
        d2=d2,
        sigma1sq=sigma1sq,
        sigma2sq=sigma2sq,
        eps11=eps11,
        eps21=eps21,
        eps12=eps12,
        eps22=eps22,
        gamma1=sigma1sq / d1**2,
        gamma2=sigma2sq / d2**2,
        delta11=eps11 / d1,
        delta21=eps21 / d2,
        delta12=eps12 / d1,
        delta22=eps22 / d2,
    )


@dataclass(frozen=True)
class LowerBoundPair:
    """Labeled exponent lower bounds for the two reported events."""

    err_or_erasure: float
    error: float


def refined_lower_bounds(
    pair: HypothesisPair, thresholds: Optional[Thresholds] = None
) -> LowerBoundPair:
    """Divergence-exponent lower bounds min_i D((delta_ij+gamma_i)/(1+gamma_i)||...)."""
    mp = martingale_params(pair, thresholds)
    return LowerBoundPair(
        err_or_erasure=min(
            _divergence_exponent(mp.gamma1, mp.delta11),
            _divergence_exponent(mp.gamma2, mp.delta21),
        ),
        error=min(
            _divergence_exponent(mp.gamma1, mp.delta12),
            _divergence_exponent(mp.gamma2, mp.delta22),
        ),
    )


def azuma_lower_bounds(
    pair: HypothesisPair, thresholds: Optional[Thresholds] = None
) -> LowerBoundPair:
    """Azuma-loosened lower bounds min_i delta_ij^2 / 2."""
    mp = martingale_params(pair, thresholds)

    def half_sq(delta: float) -> float:
        return math.inf if delta > 1.0 else delta * delta / 2.0

    return LowerBoundPair(
        err_or_erasure=min(half_sq(mp.delta11), half_sq(mp.delta21)),
        error=min(half_sq(mp.delta12), half_sq(mp.delta22)),
    )


def divergence_cubic_lower(gamma: float, delta: float) -> float:
    """Cubic lower bound delta^2/(2 gamma) - delta^3/(6 gamma^2 (1+gamma)).

    Always below the divergence exponent for gamma in (0,1], delta in [0,1].
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    return delta**2 / (2.0 * gamma) - delta**3 / (6.0 * gamma**2 * (1.0 + gamma))


class ParametricFamily:
    """An indexed pmf family theta -> P_theta with optional exact derivative.

    ``pmf_fn(theta)`` returns a FinitePmf; ``dpmf_fn(theta)``, when given,
    returns dP_theta/dtheta as an array aligned with the alphabet.
    Without it, derivatives fall back to central differences with step h
    (relative error budget ~1e-6 for smooth families).
    """

    def __init__(
        self,
        pmf_fn: Callable[[float], FinitePmf],
        dpmf_fn: Optional[Callable[[float], np.ndarray]] = None,
        h: float = 1e-5,
    ):
        self.pmf_fn = pmf_fn
        self.dpmf_fn = dpmf_fn
        self.h = h

    def pmf(self, theta: float) -> FinitePmf:
        return self.pmf_fn(theta)

    def dpmf(self, theta: float) -> np.ndarray:
        if self.dpmf_fn is not None:
            return np.asarray(self.dpmf_fn(theta), dtype=float)
        hi = self.pmf_fn(theta + self.h).as_array()
        lo = self.pmf_fn(theta - self.h).as_array()
        return (hi - lo) / (2.0 * self.h)


def bernoulli_family() -> ParametricFamily:
    """P_theta(1) = theta on {0, 1}, with exact derivative."""
    return ParametricFamily(
        pmf_fn=lambda th: FinitePmf((0, 1), (1.0 - th, th)),
        dpmf_fn=lambda th: np.array([-1.0, 1.0]),
    )


def ternary_skewed_family(alpha: float) -> ParametricFamily:
    """P_theta = (theta(1-a)/(1+theta), a, (1-a)/(1+theta)) on {0, 1, 2}.

    As alpha -> 1 the Azuma-loosened exponent's Fisher ratio collapses
    like (1 - alpha) * theta while the divergence-based one does not.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")

    def pmf_fn(th: float) -> FinitePmf:
        if th <= 0.0:
            raise ValueError("theta must be positive")
        return FinitePmf(
            (0, 1, 2),
            (th * (1.0 - alpha) / (1.0 + th), alpha, (1.0 - alpha) / (1.0 + th)),
        )

    def dpmf_fn(th: float) -> np.ndarray:
        g = (1.0 - alpha) / (1.0 + th) ** 2
        return np.array([g, 0.0, -g])

    return ParametricFamily(pmf_fn, dpmf_fn)


def fisher_information(family: ParametricFamily, theta: float) -> float:
    """J(theta) = sum_x P_theta(x) (d/dtheta ln P_theta(x))^2."""
    p = family.pmf(theta).as_array()
    dp = family.dpmf(theta)
    mask = p > 0.0
    return float(np.sum(dp[mask] ** 2 / p[mask]))


@dataclass(frozen=True)
class FisherLimitRow:
    """One straddle P_{theta+off} vs P_{theta-off} of the local-limit table."""

    offset: float
    delta_theta: float
    chernoff_ratio: float  # C / (delta_theta)^2
    refined_ratio: float  # E_L / (delta_theta)^2
    azuma_ratio: float  # E~_L / (delta_theta)^2
    target: float  # J(theta) / 8


def fisher_limit_check(
    family: ParametricFamily, theta: float, offsets: Sequence[float]
) -> list[FisherLimitRow]:
    """Chernoff and lower-bound exponents over (theta-off, theta+off) pairs.

    Each row reports C, E_L (divergence route, zero threshold) and E~_L
    (Azuma route) divided by (2*off)^2; the first two converge to
    J(theta)/8 as offsets shrink, the third to a(theta) J(theta)/8 with
    a(theta) in [0, 1] possibly far below 1.
    """
    target = fisher_information(family, theta) / 8.0
    rows = []
    for off in offsets:
        if off <= 0.0:
            raise ValueError("offsets must be positive")
        pair = HypothesisPair(family.pmf(theta + off), family.pmf(theta - off))
        dth2 = (2.0 * off) ** 2
        c = chernoff_information(pair)
        refined = refined_lower_bounds(pair).error
        azuma = azuma_lower_bounds(pair).error
        rows.append(
            FisherLimitRow(
                offset=off,
                delta_theta=2.0 * off,
                chernoff_ratio=c / dth2,
                refined_ratio=refined / dth2,
                azuma_ratio=azuma / dth2,
                target=target,
            )
        )
    return rows


@dataclass(frozen=True)
class ModerateDeviationBound:
    """Finite-n moderate-deviations bound and its n->inf scaled-log slope."""

    bound: float
    asymptotic_slope: float


def moderate_deviation_hyptest(
    pair: HypothesisPair, eps1: float, eta: float, n: int
) -> ModerateDeviationBound:
    """Bound on P1(L_n <= n D(P1||P2) - eps1 n^eta) for eta in (1/2, 1).

    The threshold approaches D(P1||P2) at rate n^-(1-eta); the bound is
    exp(-(eps1^2 n^(2 eta - 1) / 2 sigma1^2) (1 - eps1 d1 n^-(1-eta) /
    (3 sigma1^2 (1+gamma1)))), with sub-exponential decay and scaled-log
    slope -eps1^2 / (2 sigma1^2). Requires n large enough that
    delta_1^(eta, n) = eps1 n^-(1-eta) / d1 < 1.
    """
    if eps1 <= 0.0:
        raise ValueError("eps1 must be positive")
    if not 0.5 < eta < 1.0:
        raise ValueError("eta must lie in (1/2, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    mp = martingale_params(pair)
    delta_n = eps1 * n ** (eta - 1.0) / mp.d1
    if delta_n >= 1.0:
        raise ValueError(
            f"n={n} is below the validity threshold (delta={delta_n:.3g} >= 1)"
        )
    lead = eps1**2 * n ** (2.0 * eta - 1.0) / (2.0 * mp.sigma1sq)
    correction = 1.0 - eps1 * mp.d1 * n ** (eta - 1.0) / (
        3.0 * mp.sigma1sq * (1.0 + mp.gamma1)
    )
    return ModerateDeviationBound(
        bound=math.exp(-lead * correction),
        asymptotic_slope=-(eps1**2) / (2.0 * mp.sigma1sq),
    )

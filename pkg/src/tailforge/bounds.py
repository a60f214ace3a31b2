"""Tail exponents for martingales with bounded jumps.

Every operation returns the exponent E (nats per step) of a bound of the
form P(X_n - X_0 >= alpha*n) <= e^(-n*E) (two-sided variants carry a
prefactor 2, attached by ``tail_bound``). Exponents are non-negative, 0 at
delta = 0, and +inf when the deviation exceeds the jump bound (delta > 1
under two-sided conditions), where the probability is exactly zero.

Throughout, gamma = sigma^2/d^2 in (0, 1] and delta = alpha/d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Tuple

from ._optim import golden_min, minimize_on_ray
from .specfun import (
    BOUNDARY_CLAMP,
    big_b,
    binary_divergence,
    f_delta,
    lambert_w0_exparg,
    lambert_wm1_logarg,
)

METHOD_TAGS = (
    "azuma",
    "thm2",
    "thm3",
    "cor2",
    "cor3",
    "cor4",
    "thm4",
    "cor6",
    "pinsker",
    "refined_pinsker",
    "chung_lu",
    "freedman",
)


@dataclass(frozen=True)
class MartingaleSpec:
    """Uniform jump bound d and conditional-variance bound sigma^2.

    Enforces sigma^2 <= d^2 (no generality is lost: bounded jumps imply
    conditional variance at most d^2), so gamma = sigma2/d^2 lies in (0,1].
    """

    d: float
    sigma2: float

    def __post_init__(self):
        if not self.d > 0.0:
            raise ValueError("jump bound d must be positive")
        if not self.sigma2 > 0.0:
            raise ValueError("variance bound sigma2 must be positive")
        if self.sigma2 > self.d**2 * (1.0 + BOUNDARY_CLAMP):
            raise ValueError("sigma2 must not exceed d^2")

    @property
    def gamma(self) -> float:
        return min(1.0, self.sigma2 / self.d**2)

    def delta(self, alpha: float) -> float:
        if alpha < 0.0:
            raise ValueError("alpha must be non-negative")
        return alpha / self.d


@dataclass(frozen=True)
class MomentProfile:
    """Normalized conditional moments gamma_l = mu_l / d^l for l = 2..m.

    ``gammas`` is the sequence (gamma_2, ..., gamma_m); m = len + 1 must be
    even. Values above 1 are admitted (they arise under the weaker
    one-sided moment conditions); negatives are not.
    """

    gammas: Tuple[float, ...]

    def __post_init__(self):
        gammas = tuple(float(g) for g in self.gammas)
        if len(gammas) < 1:
            raise ValueError("profile needs at least gamma_2")
        if (len(gammas) + 1) % 2 != 0:
            raise ValueError("m = len(gammas) + 1 must be even")
        if any(g < 0.0 for g in gammas):
            raise ValueError("moment ratios must be non-negative")
        object.__setattr__(self, "gammas", gammas)

    @property
    def m(self) -> int:
        return len(self.gammas) + 1

    @property
    def gamma2(self) -> float:
        return self.gammas[0]

    @property
    def gamma_m(self) -> float:
        return self.gammas[-1]

    def gamma(self, l: int) -> float:
        if l < 2 or l > self.m:
            raise ValueError(f"l={l} outside 2..{self.m}")
        return self.gammas[l - 2]


@dataclass(frozen=True)
class ExponentValue:
    """A non-negative exponent (nats/step) tagged with its producing method."""

    exponent: float
    method: str
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if math.isnan(self.exponent) or self.exponent < -1e-12:
            raise ValueError(f"exponent must be >= 0, got {self.exponent}")
        if self.exponent < 0.0:
            object.__setattr__(self, "exponent", 0.0)
        base = self.method.split("(")[0]
        if base not in METHOD_TAGS:
            raise ValueError(f"unknown method tag {self.method!r}")

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.exponent)


def tail_bound(value: ExponentValue, n: int, two_sided: bool = True) -> float:
    """Probability bound min(1, c*exp(-n*E)); c = 2 two-sided, 1 one-sided.

    The one-sided form covers the sub/super-martingale variants, which
    differ from the martingale case only by this sign-flip/prefactor.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    prefactor = 2.0 if two_sided else 1.0
    if math.isinf(value.exponent):
        return 0.0
    return min(1.0, prefactor * math.exp(-n * value.exponent))


def _divergence_exponent(gamma: float, delta: float) -> float:
    """D((delta+gamma)/(1+gamma) || gamma/(1+gamma)); +inf for delta > 1."""
    if delta > 1.0:
        return math.inf
    return binary_divergence((delta + gamma) / (1.0 + gamma), gamma / (1.0 + gamma))


def azuma_exponent(spec: MartingaleSpec, alpha: float) -> ExponentValue:
    """Azuma's exponent delta^2/2 for P(|X_n - X_0| >= alpha*n)."""
    delta = spec.delta(alpha)
    return ExponentValue(delta * delta / 2.0, "azuma", {"delta": delta})


def azuma_bound_nonuniform(d_seq: Sequence[float], r: float) -> float:
    """min(1, 2 exp(-r^2 / (2 sum d_k^2))) for per-step bounds d_k."""
    d_seq = list(d_seq)
    if not d_seq:
        raise ValueError("d_seq must be non-empty")
    if any(d <= 0.0 for d in d_seq):
        raise ValueError("jump bounds must be positive")
    if r < 0.0:
        raise ValueError("r must be non-negative")
    total = math.fsum(d * d for d in d_seq)
    return min(1.0, 2.0 * math.exp(-r * r / (2.0 * total)))


def thm2_exponent(spec: MartingaleSpec, alpha: float) -> ExponentValue:
    """Bennett-route divergence exponent D((delta+gamma)/(1+gamma)||gamma/(1+gamma))."""
    gamma, delta = spec.gamma, spec.delta(alpha)
    return ExponentValue(
        _divergence_exponent(gamma, delta), "thm2", {"gamma": gamma, "delta": delta}
    )


def pinsker_loosened_exponent(spec: MartingaleSpec, alpha: float) -> ExponentValue:
    """Pinsker loosening 2*(delta/(1+gamma))^2 of the divergence exponent."""
    gamma, delta = spec.gamma, spec.delta(alpha)
    if delta > 1.0:
        return ExponentValue(math.inf, "pinsker", {"gamma": gamma, "delta": delta})
    e = 2.0 * (delta / (1.0 + gamma)) ** 2
    return ExponentValue(e, "pinsker", {"gamma": gamma, "delta": delta})


def refined_pinsker_exponent(delta: float) -> ExponentValue:
    """Fourth-order refined-Pinsker exponent in delta (gamma = 1 setting).

    delta^2/2 + delta^4/36 + delta^6/270 + 221*delta^8/340220 for
    delta in [0, 1]; +inf beyond.
    """
    if delta < 0.0:
        raise ValueError("delta must be non-negative")
    if delta > 1.0:
        return ExponentValue(math.inf, "refined_pinsker", {"delta": delta})
    d2 = delta * delta
    e = d2 / 2.0 + d2 * d2 / 36.0 + d2**3 / 270.0 + 221.0 * d2**4 / 340220.0
    return ExponentValue(e, "refined_pinsker", {"delta": delta})


def cor3_exponent(spec: MartingaleSpec, alpha: float) -> ExponentValue:
    """Bennett-kernel exponent gamma[(1+delta/gamma)ln(1+delta/gamma) - delta/gamma].

    Algebraically equals (delta^2 / 2 gamma) * B(delta/gamma).
    """
    gamma, delta = spec.gamma, spec.delta(alpha)
    if delta == 0.0:
        return ExponentValue(0.0, "cor3", {"gamma": gamma, "delta": delta})
    u = delta / gamma
    e = gamma * ((1.0 + u) * math.log1p(u) - u)
    return ExponentValue(e, "cor3", {"gamma": gamma, "delta": delta})


def thm3_exponent(spec: MartingaleSpec, alpha: float) -> ExponentValue:
    """Parabola-chord exponent C(gamma, delta).

    Cases: +inf for delta > 1; ln(4/(1+gamma)) at delta = 1; the
    W_-1-based closed form for delta in [0, 1); the gamma -> 1 limit is
    f(delta) (the closed form divides by 1-gamma).
    """
    gamma, delta = spec.gamma, spec.delta(alpha)
    params = {"gamma": gamma, "delta": delta}
    if delta > 1.0:
        return ExponentValue(math.inf, "thm3", params)
    if delta == 1.0:
        return ExponentValue(math.log(4.0 / (1.0 + gamma)), "thm3", params)
    if 1.0 - gamma <= 1e-9:
        return ExponentValue(f_delta(delta), "thm3", params)
    # w = -e^a would underflow for gamma near 1; keep its log instead
    k = (gamma + delta) / ((1.0 + delta) * (1.0 - gamma))
    log_neg_w = (
        math.log((1.0 + gamma) * (1.0 - delta) / ((1.0 - gamma) * (1.0 + delta)))
        - 1.0
        - 2.0 * k
    )
    x = -(1.0 + lambert_wm1_logarg(log_neg_w)) / 2.0 - k
    u = (1.0 + gamma) / 4.0 * math.exp((1.0 - delta) * x)
    v = (0.5 + (1.0 + 2.0 * x) * (1.0 - gamma) / 4.0) * math.exp(-(1.0 + delta) * x)
    e = -math.log(u + v)
    return ExponentValue(max(0.0, e), "thm3", {**params, "x": x})


def _log_mgf_bound(profile: MomentProfile, x: float) -> float:
    """ln S(x) for S(x) = 1 + sum_{l<m}(gamma_l - gamma_m)x^l/l! + gamma_m(e^x-1-x).

    S upper-bounds a conditional MGF, so S >= 1. Factored for large x so
    huge arguments never overflow.
    """
    gm = profile.gamma_m
    poly = 0.0
    fact = 1.0
    for l in range(2, profile.m):
        fact *= l
        poly += (profile.gamma(l) - gm) * x**l / fact
    if x <= 30.0:
        s = 1.0 + poly + gm * (math.expm1(x) - x)
        if s <= 0.0:
            raise ValueError("moment profile yields a non-positive bound base")
        return math.log(s)
    # S = e^x * (gm + r e^{-x}) with polynomial remainder r
    r = 1.0 + poly - gm * (1.0 + x)
    if gm == 0.0:
        if r <= 0.0:
            raise ValueError("moment profile yields a non-positive bound base")
        return math.log(r)
    correction = r * math.exp(-x) / gm if x < 700.0 else 0.0
    if correction <= -1.0:
        raise ValueError("moment profile yields a non-positive bound base")
    return x + math.log(gm) + math.log1p(correction)


def thm4_exponent(profile: MomentProfile, delta: float) -> ExponentValue:
    """Higher-moment exponent sup_{x>=0} {delta*x - ln S(x)}.

    The m = 2, delta = 1 endpoint uses the closed form
    1/gamma - ln(gamma(e^{1/gamma} - 1)); otherwise the supremum is found
    by a doubling bracket scan plus golden section on
    [0, max(50, 4/gamma_m, 10/(1-delta))]. ``params['at_ceiling']`` flags
    a minimizer pinned at the scan ceiling (the infimum may then sit at
    x -> inf and the reported exponent is a valid lower bound of it).
    """
    method = f"thm4(m={profile.m})"
    params = {"m": profile.m, "delta": delta}
    if delta < 0.0:
        raise ValueError("delta must be non-negative")
    if delta > 1.0:
        return ExponentValue(math.inf, method, params)
    if delta == 0.0:
        return ExponentValue(0.0, method, params)
    if delta == 1.0 and profile.m == 2:
        return ExponentValue(_cor4_delta1(profile.gamma2), method, params)
    gm = profile.gamma_m
    if gm > 0.0:
        ceiling = max(50.0, 4.0 / gm)
    else:
        ceiling = 50.0
    if delta < 1.0:
        ceiling = max(ceiling, 10.0 / (1.0 - delta))
    ceiling = min(ceiling, 1e6)

    def objective(x: float) -> float:
        return _log_mgf_bound(profile, x) - delta * x

    x, fmin, hit = minimize_on_ray(objective, ceiling, xtol=1e-12)
    return ExponentValue(
        max(0.0, -fmin), method, {**params, "x": x, "at_ceiling": hit}
    )


def _cor4_delta1(gamma: float) -> float:
    """1/gamma - ln(gamma(e^{1/gamma} - 1)), stable for small gamma."""
    # equals -ln(gamma) - log1p(-exp(-1/gamma))
    return -math.log(gamma) - math.log1p(-math.exp(-1.0 / gamma))


def cor4_exponent(gamma: float, delta: float) -> ExponentValue:
    """Closed form of the m = 2 higher-moment exponent.

    delta > 1: +inf. delta = 1: 1/gamma - ln(gamma(e^{1/gamma}-1)).
    delta in (0,1): delta*x - ln(1 + gamma(e^x - 1 - x)) at
    x = 1/gamma + 1/delta - 1 - W0((1-delta)e^{1/gamma+1/delta-1}/delta).
    """
    if not 0.0 < gamma <= 1.0 + BOUNDARY_CLAMP:
        raise ValueError("gamma must lie in (0, 1]")
    gamma = min(gamma, 1.0)
    params = {"gamma": gamma, "delta": delta}
    if delta < 0.0:
        raise ValueError("delta must be non-negative")
    if delta > 1.0:
        return ExponentValue(math.inf, "cor4", params)
    if delta == 0.0:
        return ExponentValue(0.0, "cor4", params)
    if delta == 1.0:
        return ExponentValue(_cor4_delta1(gamma), "cor4", params)
    x = cor4_optimal_x(gamma, delta)
    profile = MomentProfile((gamma,))
    e = delta * x - _log_mgf_bound(profile, x)
    return ExponentValue(max(0.0, e), "cor4", {**params, "x": x})


def cor4_optimal_x(gamma: float, delta: float) -> float:
    """The optimizing x of the m = 2 closed form, for delta in (0, 1)."""
    a = 1.0 / gamma + 1.0 / delta - 1.0
    log_w = math.log((1.0 - delta) / delta) + a
    return a - lambert_w0_exparg(log_w)


def cor6_suboptimal(profile: MomentProfile, delta: float):
    """Closed-form sub-optimal x and its exponent for general even m.

    x = (a+b)/c - W0((b/c) e^{(a+b)/c}) with a = 1/gamma_2,
    b = (gamma_m/gamma_2)(1/delta - 1), c = 1/delta - b. Coincides with the
    optimal x of the m = 2 closed form. Returns (x, ExponentValue); on the
    degenerate c <= 0 the numeric minimizer is used and flagged.
    """
    method = f"cor6(m={profile.m})"
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    g2, gm = profile.gamma2, profile.gamma_m
    if g2 <= 0.0:
        raise ValueError("gamma_2 must be positive")
    a = 1.0 / g2
    b = (gm / g2) * (1.0 / delta - 1.0)
    c = 1.0 / delta - b
    params = {"m": profile.m, "delta": delta}
    if c <= 0.0:
        ev = thm4_exponent(profile, delta)
        x = ev.params.get("x", 0.0)
        return x, ExponentValue(
            ev.exponent, method, {**params, "x": x, "fallback": True}
        )
    if b == 0.0:
        x = (a + b) / c
    else:
        log_w = math.log(b / c) + (a + b) / c
        x = (a + b) / c - lambert_w0_exparg(log_w)
    e = delta * x - _log_mgf_bound(profile, x)
    return x, ExponentValue(max(0.0, e), method, {**params, "x": x})


@dataclass(frozen=True)
class ExponentComparison:
    """E2 (divergence route) vs E4/E4~ (higher-moment route) at one (profile, delta)."""

    e2: float
    e4: float
    e4_tilde: float
    e4_beats_e2: bool


def compare_e2_e4(
    profile: MomentProfile, gamma: float, delta: float
) -> ExponentComparison:
    """Compare the divergence exponent E2 with the m-moment exponent E4.

    Requires gamma == gamma_2 of the profile (same second moment feeds
    both routes). The higher-moment route wins exponentially iff E4 > E2;
    checking the closed-form E4~ first avoids the scalar optimization.
    """
    if abs(gamma - profile.gamma2) > 1e-12:
        raise ValueError("gamma must equal the profile's gamma_2")
    e2 = _divergence_exponent(gamma, delta)
    e4 = thm4_exponent(profile, delta).exponent
    if delta > 0.0 and delta <= 1.0:
        _, tilde = cor6_suboptimal(profile, delta)
        e4_tilde = tilde.exponent
    else:
        e4_tilde = e4
    return ExponentComparison(e2, e4, e4_tilde, e4 > e2)


def freedman_exponent(z: float, r: float) -> ExponentValue:
    """Freedman-form exponent (z^2 / 2r) B(z/r) for P(S_n >= z, Q_n <= r).

    With z = delta*n and r = gamma*n this is n times the Bennett-kernel
    exponent, recovering the cor3 rate.
    """
    if z <= 0.0 or r <= 0.0:
        raise ValueError("z and r must be positive")
    e = z * z / (2.0 * r) * big_b(z / r)
    return ExponentValue(e, "freedman", {"z": z, "r": r})


def chung_lu_exponent(gamma: float, delta: float) -> ExponentValue:
    """Bernstein-style comparison exponent delta^2 / (2 gamma + 2 delta/3)."""
    if not 0.0 < gamma <= 1.0 + BOUNDARY_CLAMP:
        raise ValueError("gamma must lie in (0, 1]")
    if delta < 0.0:
        raise ValueError("delta must be non-negative")
    if delta == 0.0:
        return ExponentValue(0.0, "chung_lu", {"gamma": gamma, "delta": delta})
    e = delta * delta / (2.0 * gamma + 2.0 * delta / 3.0)
    return ExponentValue(e, "chung_lu", {"gamma": gamma, "delta": delta})


@dataclass(frozen=True)
class SmallDeviationBound:
    """Finite-n bound on P(|X_n - X_0| >= alpha*sqrt(n)) and its n->inf limit."""

    bound: float
    limit: float


def small_deviation_bound(
    spec: MartingaleSpec, alpha: float, n: int
) -> SmallDeviationBound:
    """2 exp(-(delta^2/2gamma) B(delta/(gamma sqrt(n)))) and 2 exp(-delta^2/2gamma).

    The kernel B(0+) = 1 makes the finite-n correction explicit: the bound
    improves Azuma's sqrt(n)-deviation exponent by the factor 1/gamma in
    the limit.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gamma, delta = spec.gamma, spec.delta(alpha)
    lead = delta * delta / (2.0 * gamma)
    bound = 2.0 * math.exp(-lead * big_b(delta / (gamma * math.sqrt(n))))
    return SmallDeviationBound(bound=bound, limit=2.0 * math.exp(-lead))


@dataclass(frozen=True)
class MdpRow:
    n: int
    scaled_log_divergence: float
    scaled_log_azuma: float


def mdp_exponent_check(
    d: float, sigma2: float, alpha: float, eta: float, n_list: Sequence[int]
) -> list[MdpRow]:
    """Moderate-deviations scaling of the one-sided analytic bounds.

    For thresholds alpha*n^eta, eta in (1/2, 1), returns per n the scaled
    logs n^(1-2 eta) * ln e^{-n E} = -n^(2-2 eta) E for the divergence
    exponent (target -alpha^2/(2 sigma^2)) and for Azuma's exponent
    (constant -alpha^2/(2 d^2), the wrong limit unless sigma = d).
    """
    if not 0.5 < eta < 1.0:
        raise ValueError("eta must lie in (1/2, 1)")
    spec = MartingaleSpec(d, sigma2)
    gamma = spec.gamma
    rows = []
    for n in n_list:
        n = int(n)
        if n < 1:
            raise ValueError("n must be >= 1")
        delta_n = alpha * n ** (eta - 1.0) / d
        div = _divergence_exponent(gamma, delta_n)
        scale = float(n) ** (1.0 - 2.0 * eta)
        rows.append(
            MdpRow(
                n=n,
                scaled_log_divergence=-scale * n * div,
                scaled_log_azuma=-scale * n * delta_n * delta_n / 2.0,
            )
        )
    return rows


def mcdiarmid_mgf_compare(gamma: float, x: float) -> tuple[float, float]:
    """(1 + gamma(e^x - 1 - x), exp(gamma(e^x - 1 - x))): tight vs loosened MGF cap."""
    if x < 0.0:
        raise ValueError("x must be non-negative")
    core = gamma * (math.expm1(x) - x)
    return (1.0 + core, math.exp(core))

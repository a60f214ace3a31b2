"""Scalar special functions shared by all tail-exponent computations.

Binary and finite-alphabet divergences (natural log), the binary entropy,
the bounded-jump kernel f(delta) = ln2*(1 - h2((1-delta)/2)), the
Bennett-type kernel B(u), the truncated-exponential remainder phi_m, both
real branches of the Lambert W function, and the exponential envelope of
the Gaussian Q-function.

Conventions: 0*ln(0) = 0 everywhere; +inf is an explicit return value
(math.inf), never an overflow artifact; inputs within BOUNDARY_CLAMP of a
domain boundary are clamped onto it. All functions are pure.
"""

from __future__ import annotations

import math

from .pmf import FinitePmf

INV_E = math.exp(-1.0)
BOUNDARY_CLAMP = 1e-12

_LAMBERT_TOL = 1e-14
_LAMBERT_MAX_ITER = 50


class ConvergenceError(ArithmeticError):
    """An iterative routine failed to meet its residual contract."""


def _clamp_unit(x: float, name: str) -> float:
    """Clamp x into [0, 1], allowing BOUNDARY_CLAMP of slack outside."""
    if x < 0.0:
        if x >= -BOUNDARY_CLAMP:
            return 0.0
        raise ValueError(f"{name}={x} is outside [0, 1]")
    if x > 1.0:
        if x <= 1.0 + BOUNDARY_CLAMP:
            return 1.0
        raise ValueError(f"{name}={x} is outside [0, 1]")
    return x


def _xlogx_ratio(p: float, q: float) -> float:
    """p * ln(p/q) with the 0*ln(0) = 0 convention (q > 0)."""
    if p == 0.0:
        return 0.0
    return p * math.log(p / q)


def binary_divergence(p: float, q: float) -> float:
    """D(p||q) = p ln(p/q) + (1-p) ln((1-p)/(1-q)) in nats.

    Requires q in (0, 1) unless p == q (D(q||q) = 0 at the endpoints too).
    """
    p = _clamp_unit(p, "p")
    q = _clamp_unit(q, "q")
    if q <= 0.0 or q >= 1.0:
        if p == q:
            return 0.0
        raise ValueError(f"q={q} must lie strictly inside (0, 1)")
    return _xlogx_ratio(p, q) + _xlogx_ratio(1.0 - p, 1.0 - q)


def kl_divergence(p: FinitePmf, q: FinitePmf) -> float:
    """Relative entropy D(P||Q) in nats; +inf if supp(P) is not in supp(Q)."""
    p.require_same_alphabet(q)
    total = 0.0
    for pi, qi in zip(p.probs, q.probs):
        if pi == 0.0:
            continue
        if qi == 0.0:
            return math.inf
        total += pi * math.log(pi / qi)
    return total


def binary_entropy(x: float) -> float:
    """h2(x) = -x log2(x) - (1-x) log2(1-x) in bits, endpoints mapping to 0."""
    x = _clamp_unit(x, "x")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -(x * math.log2(x) + (1.0 - x) * math.log2(1.0 - x))


def f_delta(delta: float) -> float:
    """ln(2) * (1 - h2((1-delta)/2)) for delta in [0, 1]; +inf beyond 1.

    Computed as the equivalent divergence D((1+delta)/2 || 1/2), which is
    exact at both endpoints. Equals sum_{p>=1} delta^(2p) / (2p(2p-1)).
    """
    if delta < 0.0:
        if delta >= -BOUNDARY_CLAMP:
            delta = 0.0
        else:
            raise ValueError("delta must be non-negative")
    if delta > 1.0:
        return math.inf
    return binary_divergence((1.0 + delta) / 2.0, 0.5)


def big_b(u: float) -> float:
    """Bennett-type kernel B(u) = 2[(1+u)ln(1+u) - u] / u^2 for u > 0.

    Decreasing on (0, inf) with B(0+) = 1; the limit is exposed at u = 0.
    A power series (B(u) = sum_k 2(-u)^k / ((k+1)(k+2))) is used near 0
    where the closed form loses precision to cancellation.
    """
    if u < 0.0:
        if u >= -BOUNDARY_CLAMP:
            u = 0.0
        else:
            raise ValueError("u must be non-negative")
    if u == 0.0:
        return 1.0
    if u < 1e-3:
        total, term, k = 0.0, 2.0, 0
        while True:
            contrib = term / ((k + 1) * (k + 2))
            total += contrib
            if abs(contrib) < 1e-18:
                return total
            k += 1
            term *= -u
    return 2.0 * ((1.0 + u) * math.log1p(u) - u) / (u * u)


def phi_m(m: int, y: float) -> float:
    """Remainder kernel (m!/y^m)(e^y - sum_{l<m} y^l/l!), with phi_m(0) = 1.

    m must be even and >= 2. Continuous, increasing on [0, inf), and in
    (0, 1) for y < 0. Evaluated by the absolutely convergent series
    sum_{l>=0} m! y^l / (m+l)! for |y| <= m (no cancellation there), and
    by the direct formula otherwise.
    """
    if m < 2 or m % 2 != 0:
        raise ValueError("m must be an even integer >= 2")
    if y == 0.0:
        return 1.0
    if abs(y) <= m:
        total, term, l = 0.0, 1.0, 0
        while True:
            total += term
            l += 1
            term *= y / (m + l)
            if abs(term) < 1e-18 * max(1.0, abs(total)):
                return total + term
    partial = 0.0
    term = 1.0
    for l in range(m):
        partial += term
        term *= y / (l + 1)
    return math.factorial(m) / y**m * (math.exp(y) - partial)


def _halley_w(w: float, x: float) -> float:
    """Polish a Lambert W estimate x for target w by Halley iteration.

    Stops when the step reaches machine precision in x (not merely when
    the residual is small: near w -> 0- the residual derivative vanishes
    and a residual-only rule would leave x digits on the table).
    """
    for _ in range(_LAMBERT_MAX_ITER):
        e = math.exp(x)
        f = x * e - w
        if f == 0.0:
            return x
        fprime = e * (x + 1.0)
        # Halley step; the (x+2)/(2(x+1)) factor is the curvature correction
        denom = fprime - f * (x + 2.0) / (2.0 * (x + 1.0))
        step = f / denom
        x -= step
        if abs(step) <= 5e-16 * max(1.0, abs(x)):
            break
    if abs(x * math.exp(x) - w) <= 1e-12 * max(1.0, abs(w)):
        return x
    raise ConvergenceError(f"Lambert W iteration did not converge for w={w}")


def _branch_point_series(w: float, principal: bool) -> float:
    """Series about the branch point w = -1/e in p = sqrt(2(1 + e*w))."""
    p = math.sqrt(max(0.0, 2.0 * (1.0 + math.e * w)))
    if not principal:
        p = -p
    return -1.0 + p - p * p / 3.0 + 11.0 * p**3 / 72.0 - 43.0 * p**4 / 540.0


def lambert_w0(w: float) -> float:
    """Principal branch W0: the x >= -1 solving x e^x = w, for w >= -1/e."""
    if w < -INV_E:
        if w >= -INV_E - BOUNDARY_CLAMP:
            return -1.0
        raise ValueError(f"w={w} is below the branch point -1/e")
    if w == 0.0:
        return 0.0
    if w < -0.3:
        x = _branch_point_series(w, principal=True)
        if 2.0 * (1.0 + math.e * w) < 1e-12:
            return x
    elif w < 3.0:
        x = math.log1p(w) if w > -0.2 else w
    else:
        l1 = math.log(w)
        x = l1 - math.log(l1)
    return _halley_w(w, x)


def lambert_wm1(w: float) -> float:
    """Lower branch W-1: the x <= -1 solving x e^x = w, for w in [-1/e, 0)."""
    if w >= 0.0 or w < -INV_E - BOUNDARY_CLAMP:
        raise ValueError(f"w={w} is outside [-1/e, 0)")
    if w < -INV_E:
        return -1.0
    if w > -0.25:
        l1 = math.log(-w)
        l2 = math.log(-l1)
        x = l1 - l2 + l2 / l1
    else:
        x = _branch_point_series(w, principal=False)
        if 2.0 * (1.0 + math.e * w) < 1e-12:
            return x
    return _halley_w(w, x)


def lambert_wm1_logarg(a: float) -> float:
    """W-1(-e^a) for a <= -3, stable for arbitrarily negative a.

    Solves the log form x + ln(-x) = a (x <= -1) by Newton iteration from
    the asymptote x = a - ln(-a), avoiding underflow of -e^a itself.
    Residual contract: |x + ln(-x) - a| <= 1e-12 * max(1, |a|).
    """
    if a > -3.0:
        return lambert_wm1(-math.exp(a))
    x = a - math.log(-a)
    for _ in range(_LAMBERT_MAX_ITER):
        g = x + math.log(-x) - a
        step = g * x / (x + 1.0)
        x -= step
        if abs(step) <= 5e-16 * abs(x):
            break
    if abs(x + math.log(-x) - a) <= 1e-12 * max(1.0, abs(a)):
        return x
    raise ConvergenceError(f"W-1(-e^a) iteration did not converge for a={a}")


def lambert_w0_exparg(a: float) -> float:
    """W0(e^a), stable for arbitrarily large a.

    For large a the argument e^a overflows, so the defining equation is
    solved in log form: x + ln x = a (x > 0), by Newton iteration from the
    asymptote x = a - ln a. Residual contract: |x + ln x - a| <= 1e-12.
    """
    if a <= 690.0:
        return lambert_w0(math.exp(a))
    x = a - math.log(a)
    for _ in range(_LAMBERT_MAX_ITER):
        g = x + math.log(x) - a
        if abs(g) <= 1e-13 * max(1.0, abs(a)):
            return x
        x -= g * x / (x + 1.0)
    raise ConvergenceError(f"W0(e^a) iteration did not converge for a={a}")


def q_function_envelope(x: float) -> tuple[float, float]:
    """Exponential envelope of Q(x) for x > 0.

    Returns (lower, upper) with
      lower = x / (sqrt(2 pi) (1 + x^2)) * exp(-x^2/2) < Q(x)
      upper = 1 / (sqrt(2 pi) x) * exp(-x^2/2) > Q(x).
    """
    if x <= 0.0:
        raise ValueError("x must be positive")
    core = math.exp(-x * x / 2.0) / math.sqrt(2.0 * math.pi)
    return (core * x / (1.0 + x * x), core / x)

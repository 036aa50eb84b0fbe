"""Reference models used as oracles: lognormal (Black) prices and partial
moments, implied lognormal/normal volatility inversion, a two-state binomial
model, and Gauss-Legendre quadrature.

All prices are undiscounted forward values.  Discounting enters only through
the rates application, via explicit discount factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import ndtr

from .errors import (
    ConvergenceFailure,
    ParameterOutOfRange,
    PriceOutsideArbitrageBounds,
)

__all__ = [
    "LognormalModel",
    "BinomialModel",
    "norm_cdf",
    "norm_pdf",
    "bs_call_price",
    "bs_put_price",
    "bachelier_call_price",
    "implied_lognormal_vol",
    "implied_normal_vol",
    "lognormal_partial_moment",
    "binomial_price",
    "gauss_legendre",
]

# Bracket for lognormal implied-vol bisection.  Desk-scale prices never need
# vols above 10; anything outside is reported as a convergence failure rather
# than silently extrapolated.
_VOL_BRACKET = (1e-8, 10.0)
_BISECTION_ITERATIONS = 90

# Prices this close to the forward are treated as the upper arbitrage bound,
# where the implied lognormal volatility diverges.
UPPER_BOUND_MARGIN = 1e-14


def norm_cdf(x):
    """Standard normal CDF.

    Single shared primitive for all lognormal math; backed by the erf-based
    ``scipy.special.ndtr``, accurate to better than 1e-15 in absolute terms.
    Accepts scalars or arrays.
    """
    return ndtr(x)


def norm_pdf(x):
    """Standard normal density."""
    return np.exp(-0.5 * np.square(x)) / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class LognormalModel:
    """Driftless lognormal forward model (undiscounted Black dynamics).

    Attributes:
        forward: forward price, > 0.
        sigma: lognormal volatility per sqrt(year), >= 0.
        expiry: time to expiry in years, > 0.
    """

    forward: float
    sigma: float
    expiry: float

    def __post_init__(self):
        if not self.forward > 0.0:
            raise ParameterOutOfRange(f"forward must be positive, got {self.forward}")
        if self.sigma < 0.0:
            raise ParameterOutOfRange(f"sigma must be non-negative, got {self.sigma}")
        if not self.expiry > 0.0:
            raise ParameterOutOfRange(f"expiry must be positive, got {self.expiry}")

    @property
    def total_variance(self) -> float:
        return self.sigma * self.sigma * self.expiry

    @property
    def root_variance(self) -> float:
        """Normalised variance of the square-root of the terminal asset.

        For a lognormal asset, E[sqrt(a)]^2 / E[a] = exp(-sigma^2 T / 4), so
        the root-variance is 1 - exp(-sigma^2 T / 4).
        """
        return -math.expm1(-0.25 * self.total_variance)

    def moment(self, p: float) -> float:
        """E[a^p] = f^p exp(p (p - 1) sigma^2 T / 2)."""
        return self.forward**p * math.exp(0.5 * p * (p - 1.0) * self.total_variance)


@dataclass(frozen=True)
class BinomialModel:
    """Two-state asset with spectrum {low, high} and trigonometric weights.

    The state weights are sin(angle)^2 on ``low`` and cos(angle)^2 on ``high``
    for an angle strictly inside (0, pi/2), so both weights are positive and
    sum to one.
    """

    low: float
    high: float
    angle: float

    def __post_init__(self):
        if self.low < 0.0 or self.high < 0.0:
            raise ParameterOutOfRange("binomial spectrum must be non-negative")
        if not 0.0 < self.angle < 0.5 * math.pi:
            raise ParameterOutOfRange(
                f"angle must lie strictly inside (0, pi/2), got {self.angle}"
            )

    @property
    def weight_low(self) -> float:
        return math.sin(self.angle) ** 2

    @property
    def weight_high(self) -> float:
        return math.cos(self.angle) ** 2

    @property
    def mean(self) -> float:
        return self.weight_low * self.low + self.weight_high * self.high

    @property
    def sqrt_mean(self) -> float:
        return self.weight_low * math.sqrt(self.low) + self.weight_high * math.sqrt(self.high)


def binomial_price(model: BinomialModel, payoff: Callable[[float], float]) -> float:
    """Expectation of ``payoff`` over the two-state spectrum."""
    return model.weight_low * payoff(model.low) + model.weight_high * payoff(model.high)


def _d12(forward: float, strike: float, stdev: float):
    d1 = (math.log(forward / strike) + 0.5 * stdev * stdev) / stdev
    return d1, d1 - stdev


def bs_call_price(model: LognormalModel, strike: float) -> float:
    """Undiscounted Black call price E[(a - k)^+]."""
    if not strike > 0.0:
        raise ParameterOutOfRange(f"strike must be positive, got {strike}")
    stdev = model.sigma * math.sqrt(model.expiry)
    if stdev == 0.0:
        return max(model.forward - strike, 0.0)
    d1, d2 = _d12(model.forward, strike, stdev)
    return model.forward * float(ndtr(d1)) - strike * float(ndtr(d2))


def bs_put_price(model: LognormalModel, strike: float) -> float:
    """Undiscounted Black put price E[(k - a)^+]."""
    if not strike > 0.0:
        raise ParameterOutOfRange(f"strike must be positive, got {strike}")
    stdev = model.sigma * math.sqrt(model.expiry)
    if stdev == 0.0:
        return max(strike - model.forward, 0.0)
    d1, d2 = _d12(model.forward, strike, stdev)
    return strike * float(ndtr(-d2)) - model.forward * float(ndtr(-d1))


def bachelier_call_price(forward: float, strike: float, sigma: float, expiry: float) -> float:
    """Undiscounted Bachelier (normal) call price; supports negative rates and strikes."""
    if sigma < 0.0:
        raise ParameterOutOfRange(f"normal vol must be non-negative, got {sigma}")
    stdev = sigma * math.sqrt(expiry)
    if stdev == 0.0:
        return max(forward - strike, 0.0)
    d = (forward - strike) / stdev
    return (forward - strike) * float(ndtr(d)) + stdev * float(norm_pdf(d))


def implied_lognormal_vol(
    forward: float,
    strike: float,
    expiry: float,
    price: float,
    *,
    price_tol: float = 1e-10,
) -> float:
    """Invert the Black call formula by bracketed bisection.

    Returns ``math.inf`` when the price sits at the upper arbitrage bound
    (within ``UPPER_BOUND_MARGIN`` of the forward), where the implied
    volatility diverges.

    Raises:
        PriceOutsideArbitrageBounds: price outside [(f-k)^+, f].
        ConvergenceFailure: price requires a volatility above the bracket.
    """
    if not forward > 0.0 or not strike > 0.0 or not expiry > 0.0:
        raise ParameterOutOfRange("forward, strike and expiry must be positive")
    intrinsic = max(forward - strike, 0.0)
    slack = 1e-12 * max(1.0, forward)
    if price < intrinsic - slack or price > forward + slack:
        raise PriceOutsideArbitrageBounds(
            f"price {price} outside [{intrinsic}, {forward}] for strike {strike}"
        )
    if price >= forward - UPPER_BOUND_MARGIN:
        return math.inf
    if price <= intrinsic + slack:
        # Deep in the money the time value collapses below representable
        # resolution; zero vol reproduces such prices within price_tol.
        return 0.0

    lo, hi = _VOL_BRACKET

    def value(sigma: float) -> float:
        return bs_call_price(LognormalModel(forward, sigma, expiry), strike)

    if value(hi) < price:
        raise ConvergenceFailure(
            f"implied lognormal vol above bracket {hi} for price {price}"
        )
    for _ in range(_BISECTION_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if value(mid) < price:
            lo = mid
        else:
            hi = mid
    sigma = 0.5 * (lo + hi)
    if abs(value(sigma) - price) > max(price_tol, 1e-10):
        raise ConvergenceFailure(
            f"bisection residual exceeds tolerance at sigma={sigma}"
        )
    return sigma


def implied_normal_vol(
    forward: float,
    strike: float,
    expiry: float,
    price: float,
    *,
    price_tol: float = 1e-10,
) -> float:
    """Invert the Bachelier call formula; supports negative forwards and strikes."""
    if not expiry > 0.0:
        raise ParameterOutOfRange(f"expiry must be positive, got {expiry}")
    intrinsic = max(forward - strike, 0.0)
    scale = max(1.0, abs(forward), abs(strike))
    if price < intrinsic - 1e-12 * scale:
        raise PriceOutsideArbitrageBounds(
            f"price {price} below intrinsic {intrinsic}"
        )
    if price <= intrinsic:
        return 0.0
    if forward == strike:
        # ATM Bachelier identity: price = sigma sqrt(T / 2 pi), inverted exactly.
        return price * math.sqrt(2.0 * math.pi / expiry)

    lo = 0.0
    hi = 2.0 * (price + abs(forward - strike)) / math.sqrt(expiry / (2.0 * math.pi))
    for _ in range(200):
        if bachelier_call_price(forward, strike, hi, expiry) >= price:
            break
        hi *= 2.0
    else:
        raise ConvergenceFailure("could not bracket the normal vol")
    for _ in range(_BISECTION_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if bachelier_call_price(forward, strike, mid, expiry) < price:
            lo = mid
        else:
            hi = mid
    sigma = 0.5 * (lo + hi)
    if abs(bachelier_call_price(forward, strike, sigma, expiry) - price) > max(price_tol, 1e-10):
        raise ConvergenceFailure(f"bisection residual exceeds tolerance at sigma={sigma}")
    return sigma


def lognormal_partial_moment(
    model: LognormalModel, p: float, lower: float, upper: float
) -> float:
    """Truncated moment E[a^p 1{lower < a <= upper}] in closed form.

    Cells are half-open on the left, ``(lower, upper]``, with the full line
    recovered as (0, inf).  A zero-volatility model is treated as a point
    mass at the forward.
    """
    if lower < 0.0 or not upper > lower:
        raise ParameterOutOfRange(f"need 0 <= lower < upper, got ({lower}, {upper})")
    if model.sigma == 0.0:
        return model.moment(p) if lower < model.forward <= upper else 0.0
    stdev = model.sigma * math.sqrt(model.expiry)

    def h(x: float) -> float:
        if x <= 0.0:
            return -math.inf
        if math.isinf(x):
            return math.inf
        return (math.log(x / model.forward) + (0.5 - p) * model.total_variance) / stdev

    return model.moment(p) * float(ndtr(h(upper)) - ndtr(h(lower)))


@lru_cache(maxsize=None)
def _gl_rule(n_nodes: int):
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(fn, lower: float, upper: float, n_nodes: int = 64) -> float:
    """Gauss-Legendre quadrature of a vectorised integrand on [lower, upper].

    Exact for polynomials of degree <= 2 n - 1; for analytic integrands the
    error decays geometrically in ``n_nodes``.
    """
    if n_nodes < 1:
        raise ParameterOutOfRange(f"n_nodes must be >= 1, got {n_nodes}")
    nodes, weights = _gl_rule(n_nodes)
    mid = 0.5 * (upper + lower)
    half = 0.5 * (upper - lower)
    return half * float(np.dot(weights, np.asarray(fn(mid + half * nodes), dtype=float)))

"""Closed-form two-asset bound for vanilla options, the implied smile and the
implied cumulative density.

The option to receive a - k, with only the price f and root-variance nu of
the asset known, is bounded by the positive root of

    p^2 - (f - k) p - f k nu = 0,

equivalently (f - k)/2 + sqrt((f - k)^2 + 4 f k nu)/2.  The implied
distribution behind this bound combines a point mass nu at strike zero with
a continuous density on the upper half-line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import DEFAULT_TOLERANCES, QuantityVector, Tolerances, positive_eigenvalue_bound
from .errors import ParameterOutOfRange, ShapeViolation
from .models import implied_lognormal_vol
from .moments import AssetMoments, assemble_q

__all__ = [
    "VanillaBoundCurve",
    "vanilla_bound",
    "vanilla_put_bound",
    "vanilla_bound_via_engine",
    "implied_cdf",
    "smile_curve",
    "check_decreasing_convex",
]

# Slack for curve shape checks: second differences of a valid bound curve may
# dip this far below zero before we call it an arbitrage violation.
SHAPE_TOL = 1e-10


def _validate(f: float, nu: float, k: float) -> None:
    if not f > 0.0:
        raise ParameterOutOfRange(f"forward must be positive, got {f}")
    if not 0.0 <= nu <= 1.0:
        raise ParameterOutOfRange(f"root-variance must lie in [0, 1], got {nu}")
    if not k > 0.0:
        raise ParameterOutOfRange(f"strike must be positive, got {k}")


def _discriminant_root(f: float, nu: float, k: float) -> float:
    return math.sqrt((f - k) ** 2 + 4.0 * f * k * nu)


def vanilla_bound(f: float, nu: float, k: float) -> float:
    """Upper bound for E[(a - k)^+] given price f and root-variance nu.

    Evaluated in a cancellation-free form: the explicit root when f >= k,
    and the product-of-roots form 2 f k nu / (sqrt(D) + (k - f)) when f < k,
    which stays accurate deep out of the money with tiny nu.
    """
    _validate(f, nu, k)
    root = _discriminant_root(f, nu, k)
    if f >= k:
        return 0.5 * ((f - k) + root)
    return 2.0 * f * k * nu / (root + (k - f))


def vanilla_put_bound(f: float, nu: float, k: float) -> float:
    """Upper bound for E[(k - a)^+]; related to the call bound by parity."""
    _validate(f, nu, k)
    root = _discriminant_root(f, nu, k)
    if k >= f:
        return 0.5 * ((k - f) + root)
    return 2.0 * f * k * nu / (root + (f - k))


def vanilla_bound_via_engine(
    f: float, nu: float, k: float, tol: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """Same bound through the general eigenvalue engine.

    Assembles the 2x2 moment matrix for the asset paired with the constant
    asset 1 and quantities (1, -k).  Agrees with the closed form to within
    eigensolver roundoff; kept as an independent route for cross-checks.
    """
    _validate(f, nu, k)
    q = assemble_q(
        [AssetMoments(f, nu), AssetMoments(1.0, 0.0)],
        {(0, 1): 0.0},
        tol,
    )
    return positive_eigenvalue_bound(q, QuantityVector([1.0, -k]), tol).bound


def implied_cdf(f: float, nu: float, k: float) -> float:
    """Cumulative density implied by the bound: 1 + d(bound)/dk.

    Evaluated analytically as 1/2 + (2 f nu - (f - k)) / (2 sqrt(D)).  The
    right-limit convention applies at kinks, so k = 0 reports the point mass
    nu and, for nu = 0, the strike at the forward reports 1.
    """
    if not f > 0.0:
        raise ParameterOutOfRange(f"forward must be positive, got {f}")
    if not 0.0 <= nu <= 1.0:
        raise ParameterOutOfRange(f"root-variance must lie in [0, 1], got {nu}")
    if k < 0.0:
        raise ParameterOutOfRange(f"strike must be non-negative, got {k}")
    if k == 0.0:
        return nu
    root = _discriminant_root(f, nu, k)
    if root == 0.0:
        # nu = 0 and k = f: point mass at the forward, CDF right-limit is 1.
        return 1.0
    return 0.5 + (2.0 * f * nu - (f - k)) / (2.0 * root)


def check_decreasing_convex(
    strikes, values, shape_tol: float = SHAPE_TOL, label: str = "bound curve"
) -> None:
    """Raise ShapeViolation unless the curve is decreasing and convex in strike.

    Convexity uses divided differences, so unevenly spaced grids are handled;
    both checks allow slack ``shape_tol``.
    """
    ks = np.asarray(strikes, dtype=float)
    vs = np.asarray(values, dtype=float)
    if ks.ndim != 1 or ks.shape != vs.shape or ks.size < 2:
        raise ParameterOutOfRange("need matching 1-d grids with at least two points")
    if np.any(np.diff(ks) <= 0.0):
        raise ParameterOutOfRange("strikes must be strictly increasing")
    slopes = np.diff(vs) / np.diff(ks)
    if np.any(slopes > shape_tol):
        i = int(np.argmax(slopes))
        raise ShapeViolation(
            f"{label} increases between strikes {ks[i]} and {ks[i + 1]} "
            f"(slope {slopes[i]:.3e})"
        )
    if slopes.size >= 2:
        curvature = np.diff(slopes)
        if np.any(curvature < -shape_tol):
            i = int(np.argmin(curvature))
            raise ShapeViolation(
                f"{label} is concave around strike {ks[i + 1]} "
                f"(slope change {curvature[i]:.3e})"
            )


@dataclass(frozen=True)
class VanillaBoundCurve:
    """Bound, implied-vol and implied-CDF values over a strike grid.

    Construction enforces the no-arbitrage shape invariants: bounds are
    decreasing and convex in strike, the CDF is non-decreasing with values
    in [0, 1].  Implied vols use math.inf as the diverging-vol sentinel.
    """

    strikes: np.ndarray
    bounds: np.ndarray
    implied_vols: np.ndarray
    cdf: np.ndarray

    def __post_init__(self):
        for name in ("strikes", "bounds", "implied_vols", "cdf"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.strikes.shape == self.bounds.shape == self.implied_vols.shape == self.cdf.shape):
            raise ParameterOutOfRange("curve columns must share one strike grid")
        check_decreasing_convex(self.strikes, self.bounds)
        if np.any(np.diff(self.cdf) < -SHAPE_TOL):
            raise ShapeViolation("implied CDF must be non-decreasing in strike")
        if np.any(self.cdf < -SHAPE_TOL) or np.any(self.cdf > 1.0 + SHAPE_TOL):
            raise ShapeViolation("implied CDF must take values in [0, 1]")


def smile_curve(f: float, nu: float, strikes, expiry: float) -> VanillaBoundCurve:
    """Bound curve with implied lognormal vols and implied CDF on a strike grid."""
    ks = np.asarray(strikes, dtype=float)
    if ks.ndim != 1 or ks.size < 2:
        raise ParameterOutOfRange("need a 1-d grid of at least two strikes")
    if np.any(ks <= 0.0) or np.any(np.diff(ks) <= 0.0):
        raise ParameterOutOfRange("strikes must be positive and strictly increasing")
    bounds = np.array([vanilla_bound(f, nu, k) for k in ks])
    vols = np.array([implied_lognormal_vol(f, k, expiry, b) for k, b in zip(ks, bounds)])
    cdf = np.array([implied_cdf(f, nu, k) for k in ks])
    return VanillaBoundCurve(ks, bounds, vols, cdf)

"""Refining the vanilla bound with partitions of the asset.

A partition of unity u_n splits the spread a - k into the portfolio
sum_n a u_n[a] - k sum_n u_n[a] of 2N positive assets, whose moment matrix
feeds the eigenvalue engine.  Two families are supported:

* Flat: digital indicators of a decomposition of (0, inf) into cells.  The
  moment matrix has diagonal quadrants built from per-cell digital prices,
  conditional prices and conditional root-variances.
* Linear: hat functions anchored at a strike grid.  Only consecutive
  functions overlap, so the four quadrants are tridiagonal, with the
  off-diagonal moments computed by quadrature under a reference model.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .engine import (
    DEFAULT_TOLERANCES,
    MomentMatrix,
    QuantityVector,
    Tolerances,
    positive_eigenvalue_bound,
)
from .errors import DegenerateCell, ParameterOutOfRange, QuadratureBudgetExceeded
from .models import LognormalModel, lognormal_partial_moment, _gl_rule
from .moments import root_variance_from_moments

__all__ = [
    "PartitionKind",
    "PartitionSpec",
    "ConditionalMoments",
    "flat_conditional_moments",
    "linear_conditional_moments",
    "partition_moment_matrix",
    "refined_bound",
    "flat_refined_bound",
    "linear_refined_bound",
    "LinearPartition",
    "linear_partition_functions",
    "quadrature_partial_moment",
]

# Cells with less probability mass than this add pure numerical noise.
CELL_FLOOR = 1e-12

# Default nodes per quadrature panel and overall evaluation budget.
PANEL_NODES = 64
NODE_BUDGET = 1_000_000

# Log-space cutoff for the density: 13 standard deviations covers any mass
# above 1e-30, far below every tolerance used here.
_TAIL_SIGMAS = 13.0


class PartitionKind(enum.Enum):
    FLAT = "flat"
    LINEAR = "linear"


@dataclass(frozen=True)
class PartitionSpec:
    """A partition family plus its defining grid.

    For FLAT the grid holds the interior cell boundaries (the endpoints 0 and
    inf are implicit); for LINEAR it holds the hat-function strikes.
    """

    kind: PartitionKind
    grid: np.ndarray

    def __post_init__(self):
        arr = np.array(self.grid, dtype=float)
        if arr.ndim != 1:
            raise ParameterOutOfRange("partition grid must be one-dimensional")
        if arr.size and (np.any(arr <= 0.0) or np.any(np.diff(arr) <= 0.0)):
            raise ParameterOutOfRange("partition grid must be positive and strictly increasing")
        if self.kind is PartitionKind.LINEAR and arr.size < 2:
            raise ParameterOutOfRange("linear partitions need at least two strikes")
        arr.setflags(write=False)
        object.__setattr__(self, "grid", arr)

    @property
    def cell_count(self) -> int:
        if self.kind is PartitionKind.FLAT:
            return self.grid.size + 1
        return self.grid.size


@dataclass(frozen=True)
class ConditionalMoments:
    """Per-cell moments of a partitioned asset.

    digital[n] is the price of the partition asset u_n, price[n] the
    conditional asset price and root_variance[n] the conditional
    root-variance.  For overlapping (linear) partitions the three cross
    sequences hold the tridiagonal off-diagonal moments
    E[a sqrt(u_n u_{n+1})], E[sqrt(a u_n u_{n+1})] and E[sqrt(u_n u_{n+1})];
    they are None for disjoint (flat) partitions.
    """

    digital: np.ndarray
    price: np.ndarray
    root_variance: np.ndarray
    cross_price: np.ndarray | None = None
    cross_sqrt: np.ndarray | None = None
    cross_digital: np.ndarray | None = None

    def __post_init__(self):
        for name in ("digital", "price", "root_variance"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.digital.size
        if not (self.price.size == n and self.root_variance.size == n and n >= 1):
            raise ParameterOutOfRange("per-cell sequences must share one length >= 1")
        crosses = [self.cross_price, self.cross_sqrt, self.cross_digital]
        if any(c is not None for c in crosses):
            if any(c is None for c in crosses):
                raise ParameterOutOfRange("supply all three cross sequences or none")
            for name in ("cross_price", "cross_sqrt", "cross_digital"):
                arr = np.array(getattr(self, name), dtype=float)
                if arr.size != n - 1:
                    raise ParameterOutOfRange("cross sequences must have length cells - 1")
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)
        if np.any(self.digital <= 0.0) or np.any(self.price <= 0.0):
            raise ParameterOutOfRange("digital prices and conditional prices must be positive")
        if np.any(self.root_variance < 0.0) or np.any(self.root_variance > 1.0):
            raise ParameterOutOfRange("conditional root-variances must lie in [0, 1]")

    @property
    def cells(self) -> int:
        return self.digital.size

    @property
    def sqrt_scaled(self) -> np.ndarray:
        """Per-cell E[sqrt(a) u_n] = sqrt(f_n (1 - nu_n)) d_n."""
        return np.sqrt(self.price * (1.0 - self.root_variance)) * self.digital

    def normalisation_sums(self):
        """The three partition sums (sum d_n, sum f_n d_n, sum sqrt(f_n(1-nu_n)) d_n).

        For an exact decomposition these reproduce (1, f, sqrt(f (1 - nu)))
        of the unpartitioned asset.
        """
        return (
            float(np.sum(self.digital)),
            float(np.sum(self.price * self.digital)),
            float(np.sum(self.sqrt_scaled)),
        )


def _log_grid_panel(model: LognormalModel, upper: float):
    """Quadrature panel for (0, upper] in log coordinates, avoiding a = 0."""
    stdev = model.sigma * math.sqrt(model.expiry)
    y_low = math.log(model.forward) - 0.5 * model.total_variance - _TAIL_SIGMAS * stdev
    return y_low, math.log(upper)


def _density(model: LognormalModel, a: np.ndarray) -> np.ndarray:
    stdev = model.sigma * math.sqrt(model.expiry)
    z = (np.log(a / model.forward) + 0.5 * model.total_variance) / stdev
    return np.exp(-0.5 * z * z) / (a * stdev * math.sqrt(2.0 * math.pi))


def quadrature_partial_moment(
    model: LognormalModel,
    p: float,
    lower: float,
    upper: float,
    n_nodes: int = PANEL_NODES,
) -> float:
    """E[a^p 1{lower < a <= upper}] by Gauss-Legendre quadrature.

    Head cells starting at zero integrate in log coordinates; tail cells
    ending at infinity use the substitution a = upper_strike / t.  Serves as
    the independent cross-check for the closed-form partial moments and as
    the shared panel integrator for partition moments.
    """
    if model.sigma == 0.0:
        raise ParameterOutOfRange("quadrature path requires sigma > 0")
    if lower < 0.0 or not upper > lower:
        raise ParameterOutOfRange(f"need 0 <= lower < upper, got ({lower}, {upper})")
    nodes, weights = _gl_rule(n_nodes)
    if math.isinf(upper):
        # a = lower / t maps (lower, inf) to t in (0, 1).
        if lower <= 0.0:
            raise ParameterOutOfRange("full-line integrals should be split at a strike")
        t = 0.5 * (nodes + 1.0)
        a = lower / t
        values = a**p * _density(model, a) * (lower / (t * t))
        return 0.5 * float(np.dot(weights, values))
    if lower == 0.0:
        y_lo, y_hi = _log_grid_panel(model, upper)
        if y_hi <= y_lo:
            return 0.0
        mid, half = 0.5 * (y_hi + y_lo), 0.5 * (y_hi - y_lo)
        a = np.exp(mid + half * nodes)
        return half * float(np.dot(weights, a**p * _density(model, a) * a))
    mid, half = 0.5 * (upper + lower), 0.5 * (upper - lower)
    a = mid + half * nodes
    return half * float(np.dot(weights, a**p * _density(model, a)))


def _moments_from_raw(
    digital: np.ndarray, first: np.ndarray, half: np.ndarray, tol: Tolerances
):
    """Convert raw partial moments (p = 0, 1, 1/2) to conditional quantities."""
    price = first / digital
    nu = np.array(
        [root_variance_from_moments(f, h / d, tol) for f, h, d in zip(price, half, digital)]
    )
    return price, nu


def flat_conditional_moments(
    model: LognormalModel,
    boundaries: Sequence[float],
    *,
    cell_floor: float = CELL_FLOOR,
    strict: bool = False,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ConditionalMoments:
    """Conditional moments for the digital partition with the given interior boundaries.

    Cells are (0, b_1], (b_1, b_2], ..., (b_{N-1}, inf).  Cells with digital
    price below ``cell_floor`` signal boundaries far in the tail: with
    ``strict`` they raise DegenerateCell, otherwise they are dropped with a
    warning (their contribution to any moment is below every tolerance in
    use).
    """
    if model.sigma == 0.0:
        raise ParameterOutOfRange("flat conditional moments require sigma > 0")
    spec = PartitionSpec(PartitionKind.FLAT, np.asarray(boundaries, dtype=float))
    edges = np.concatenate([[0.0], spec.grid, [math.inf]])
    digital, first, half = [], [], []
    dropped = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        d = lognormal_partial_moment(model, 0.0, lo, hi)
        if d < cell_floor:
            if strict:
                raise DegenerateCell(
                    f"cell ({lo}, {hi}) has digital price {d:.3e} below {cell_floor}"
                )
            dropped.append((lo, hi, d))
            continue
        digital.append(d)
        first.append(lognormal_partial_moment(model, 1.0, lo, hi))
        half.append(lognormal_partial_moment(model, 0.5, lo, hi))
    if dropped:
        warnings.warn(
            f"dropped {len(dropped)} partition cell(s) with mass below {cell_floor}: "
            + ", ".join(f"({lo:g}, {hi:g})" for lo, hi, _ in dropped),
            stacklevel=2,
        )
    if not digital:
        raise DegenerateCell("all partition cells are numerically empty")
    digital = np.asarray(digital)
    first = np.asarray(first)
    half = np.asarray(half)
    price, nu = _moments_from_raw(digital, first, half, tol)
    return ConditionalMoments(digital, price, nu)


class LinearPartition:
    """Hat-function partition of unity anchored at strikes k_1 < ... < k_N.

    Each function is 1 at its own strike, falls linearly to 0 at the
    neighbouring strikes, and the end functions extend flat to 0 and
    infinity.  Only consecutive functions have overlapping support.
    """

    def __init__(self, strikes):
        spec = PartitionSpec(PartitionKind.LINEAR, np.asarray(strikes, dtype=float))
        self.strikes = spec.grid

    @property
    def count(self) -> int:
        return self.strikes.size

    def weight(self, n: int, a) -> np.ndarray:
        """Value of the n-th partition function (0-based) at asset level(s) a."""
        if not 0 <= n < self.count:
            raise ParameterOutOfRange(f"partition index {n} out of range")
        a = np.asarray(a, dtype=float)
        k = self.strikes
        value = np.ones_like(a)
        if n > 0:
            left = k[n] - k[n - 1]
            value = value - (np.clip(k[n] - a, 0.0, None) - np.clip(k[n - 1] - a, 0.0, None)) / left
        if n < self.count - 1:
            right = k[n + 1] - k[n]
            value = value - (np.clip(a - k[n], 0.0, None) - np.clip(a - k[n + 1], 0.0, None)) / right
        return np.clip(value, 0.0, 1.0)

    def sqrt_cross(self, n: int, a) -> np.ndarray:
        """sqrt(u_n u_{n+1}) at asset level(s) a, supported on (k_n, k_{n+1})."""
        if not 0 <= n < self.count - 1:
            raise ParameterOutOfRange(f"cross index {n} out of range")
        a = np.asarray(a, dtype=float)
        lo, hi = self.strikes[n], self.strikes[n + 1]
        inside = (a > lo) & (a < hi)
        out = np.zeros_like(a)
        out[inside] = np.sqrt((a[inside] - lo) * (hi - a[inside])) / (hi - lo)
        return out


def linear_partition_functions(strikes) -> LinearPartition:
    """Partition-of-unity family for the given strikes."""
    return LinearPartition(strikes)


def _ramp_panel(model, lo, hi, n_nodes):
    """Integrals of a^p x {ascending, descending} ramp x density on [lo, hi]."""
    nodes, weights = _gl_rule(n_nodes)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    a = mid + half * nodes
    dens = _density(model, a) * half
    asc = (a - lo) / (hi - lo)
    out = {}
    for p in (0.0, 0.5, 1.0):
        ap = a**p
        out[("asc", p)] = float(np.dot(weights, ap * asc * dens))
        out[("desc", p)] = float(np.dot(weights, ap * (1.0 - asc) * dens))
    return out


def _cross_panel(model, lo, hi, n_nodes):
    """Integrals of a^p sqrt((a-lo)(hi-a))/(hi-lo) x density on [lo, hi].

    The substitution a = lo + (hi - lo) sin^2(phi) removes the square-root
    kinks at both endpoints, leaving a smooth trigonometric integrand.
    """
    nodes, weights = _gl_rule(n_nodes)
    width = hi - lo
    phi = 0.25 * math.pi * (nodes + 1.0)
    s2 = np.sin(2.0 * phi)
    a = lo + width * np.sin(phi) ** 2
    base = 0.25 * math.pi * 0.5 * width * s2 * s2 * _density(model, a)
    return {p: float(np.dot(weights, a**p * base)) for p in (0.0, 0.5, 1.0)}


def linear_conditional_moments(
    model: LognormalModel,
    strikes,
    *,
    n_nodes: int = PANEL_NODES,
    node_budget: int = NODE_BUDGET,
    cell_floor: float = CELL_FLOOR,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ConditionalMoments:
    """Conditional and cross moments of the hat partition under the model.

    All six tridiagonal moment families are integrated against the model
    density: per-strike-interval Gauss-Legendre panels, the head cell in log
    coordinates and the tail cell via the a = k_N / t substitution.
    """
    if model.sigma == 0.0:
        raise ParameterOutOfRange("linear conditional moments require sigma > 0")
    part = LinearPartition(strikes)
    n = part.count
    planned = (n + 1 + (n - 1)) * n_nodes * 3
    if planned > node_budget:
        raise QuadratureBudgetExceeded(
            f"{planned} integrand evaluations exceed the budget {node_budget}"
        )
    k = part.strikes
    digital = np.zeros(n)
    first = np.zeros(n)
    half = np.zeros(n)
    # Head and tail cells, where the end functions sit flat at one.
    for p, acc in ((0.0, digital), (0.5, half), (1.0, first)):
        acc[0] += quadrature_partial_moment(model, p, 0.0, k[0], n_nodes)
        acc[-1] += quadrature_partial_moment(model, p, k[-1], math.inf, n_nodes)
    # Interior intervals: descending ramp of u_i, ascending ramp of u_{i+1}.
    cross_price = np.zeros(n - 1)
    cross_sqrt = np.zeros(n - 1)
    cross_digital = np.zeros(n - 1)
    for i in range(n - 1):
        ramps = _ramp_panel(model, k[i], k[i + 1], n_nodes)
        for p, acc in ((0.0, digital), (0.5, half), (1.0, first)):
            acc[i] += ramps[("desc", p)]
            acc[i + 1] += ramps[("asc", p)]
        crosses = _cross_panel(model, k[i], k[i + 1], n_nodes)
        cross_digital[i] = crosses[0.0]
        cross_sqrt[i] = crosses[0.5]
        cross_price[i] = crosses[1.0]
    if np.any(digital < cell_floor):
        raise DegenerateCell(
            "a hat function carries numerically zero mass; move its strike toward the forward"
        )
    price, nu = _moments_from_raw(digital, first, half, tol)
    return ConditionalMoments(digital, price, nu, cross_price, cross_sqrt, cross_digital)


def partition_moment_matrix(moments: ConditionalMoments) -> MomentMatrix:
    """Assemble the 2N x 2N moment matrix of the partition assets.

    Components 0..N-1 are the asset-weighted partition assets a u_n and
    components N..2N-1 the bare partition assets u_n.  Disjoint partitions
    give diagonal quadrants; overlapping ones add the tridiagonal cross
    moments.
    """
    n = moments.cells
    q = np.zeros((2 * n, 2 * n))
    upper = moments.price * moments.digital
    mixed = moments.sqrt_scaled
    idx = np.arange(n)
    q[idx, idx] = upper
    q[idx, idx + n] = mixed
    q[idx + n, idx] = mixed
    q[idx + n, idx + n] = moments.digital
    if moments.cross_price is not None:
        i = np.arange(n - 1)
        for block_row, block_col, values in (
            (0, 0, moments.cross_price),
            (0, n, moments.cross_sqrt),
            (n, 0, moments.cross_sqrt),
            (n, n, moments.cross_digital),
        ):
            q[block_row + i, block_col + i + 1] = values
            q[block_col + i + 1, block_row + i] = values
    return MomentMatrix(q)


def refined_bound(
    moments: ConditionalMoments, strike: float, tol: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """Partition-refined upper bound for E[(a - k)^+] from conditional moments."""
    if not strike > 0.0:
        raise ParameterOutOfRange(f"strike must be positive, got {strike}")
    n = moments.cells
    quantities = QuantityVector(np.concatenate([np.ones(n), np.full(n, -strike)]))
    return positive_eigenvalue_bound(partition_moment_matrix(moments), quantities, tol).bound


def flat_refined_bound(
    moments: ConditionalMoments, strike: float, tol: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """Refined bound for a flat (digital) partition; reduces to the vanilla
    bound when the partition has a single cell."""
    return refined_bound(moments, strike, tol)


def linear_refined_bound(
    model: LognormalModel,
    strikes,
    strike: float,
    *,
    n_nodes: int = PANEL_NODES,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Refined bound for the hat partition with moments implied by the model.

    For strike sweeps, compute ``linear_conditional_moments`` once and call
    ``refined_bound`` per strike; the moment matrix does not depend on the
    option strike.
    """
    return refined_bound(linear_conditional_moments(model, strikes, n_nodes=n_nodes), strike, tol)

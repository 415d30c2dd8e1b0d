"""State space primitives: test functions, discrete measures, and the
bounded-Lipschitz (Fortet-Mourier) distance.

The state space is a subset of the nonnegative reals with the absolute-value
metric, which keeps every quantity in this package exactly computable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Iterable, Sequence, Union

import numpy as np

# A point of the state space. Plain floats keep the samplers fast; validation
# happens at construction boundaries (measures, balls, models).
StatePoint = float

WEIGHT_TOL = 1e-12


def as_state(x: float) -> float:
    """Validate a candidate state point (finite, nonnegative)."""
    v = float(x)
    if not math.isfinite(v) or v < 0.0:
        raise ValueError(f"state point must be a finite nonnegative real, got {x!r}")
    return v


@dataclass(frozen=True)
class TestFunction:
    """A bounded Lipschitz observable with declared metadata.

    ``sup_bound`` and ``lip_const`` are declared by the constructor and
    validated statistically (see :meth:`spot_check`), not symbolically.
    ``lower``/``upper`` give the tightest known value range; they default to
    ``[-sup_bound, sup_bound]`` and are what Monte Carlo confidence widths
    are based on.
    """

    evaluator: Callable[[float], float]
    sup_bound: float
    lip_const: float
    lower: float = field(default=None)  # type: ignore[assignment]
    upper: float = field(default=None)  # type: ignore[assignment]
    name: str = "f"

    __test__ = False  # keep pytest from collecting this as a test class

    def __post_init__(self) -> None:
        if not (self.sup_bound > 0.0 and math.isfinite(self.sup_bound)):
            raise ValueError("sup_bound must be a positive real")
        if self.lip_const < 0.0 or not math.isfinite(self.lip_const):
            raise ValueError("lip_const must be a nonnegative real")
        if self.lower is None:
            object.__setattr__(self, "lower", -self.sup_bound)
        if self.upper is None:
            object.__setattr__(self, "upper", self.sup_bound)
        if not (-self.sup_bound <= self.lower <= self.upper <= self.sup_bound):
            raise ValueError("value range must sit inside [-sup_bound, sup_bound]")

    def __call__(self, x: float) -> float:
        return self.evaluator(x)

    @property
    def value_bound(self) -> float:
        """Width of the declared value range (Hoeffding range parameter)."""
        return self.upper - self.lower

    def spot_check(self, points: Sequence[float], tol: float = 1e-9) -> None:
        """Check the declared bound and Lipschitz constant on sample points.

        Raises ``ValueError`` on the first violated pair; a pass is evidence,
        not proof.
        """
        pts = [as_state(p) for p in points]
        vals = [self.evaluator(p) for p in pts]
        for p, v in zip(pts, vals):
            if abs(v) > self.sup_bound + tol:
                raise ValueError(f"|{self.name}({p})| = {abs(v)} exceeds sup_bound {self.sup_bound}")
            if not (self.lower - tol <= v <= self.upper + tol):
                raise ValueError(f"{self.name}({p}) = {v} outside declared range")
        for (p, v), (q, w) in zip(zip(pts, vals), zip(pts[1:], vals[1:])):
            if abs(v - w) > self.lip_const * abs(p - q) + tol:
                raise ValueError(
                    f"|{self.name}({p}) - {self.name}({q})| = {abs(v - w)} exceeds "
                    f"Lip bound {self.lip_const} * {abs(p - q)}"
                )


def _eval_xmin1(x: float) -> float:
    return x if x < 1.0 else 1.0


def _eval_const(x: float, c: float) -> float:
    return c


def xmin1() -> TestFunction:
    """The observable min(x, 1), the canonical sensitivity probe."""
    return TestFunction(_eval_xmin1, sup_bound=1.0, lip_const=1.0, lower=0.0, upper=1.0, name="xmin1")


def constant(c: float = 1.0) -> TestFunction:
    b = max(abs(c), 1e-300)
    return TestFunction(partial(_eval_const, c=c), sup_bound=b, lip_const=0.0,
                        lower=c, upper=c, name=f"const({c:g})")


@dataclass(frozen=True)
class Ball:
    """Open ball ``{x : |x - center| < radius}`` in the half-line metric."""

    center: float
    radius: float

    def __post_init__(self) -> None:
        as_state(self.center)
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError("ball radius must be positive and finite")

    def contains(self, x: float) -> bool:
        return abs(x - self.center) < self.radius

    @property
    def label(self) -> str:
        return f"ball({self.center:g},{self.radius:g})"


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Probability measure with finite support, stored in ascending order."""

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        support = np.asarray(self.support, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)
        if support.ndim != 1 or support.shape != weights.shape or support.size == 0:
            raise ValueError("support and weights must be matching nonempty 1-d arrays")
        if not np.all(np.isfinite(support)) or np.any(support < 0.0):
            raise ValueError("support must consist of finite nonnegative reals")
        if support.size > 1 and not np.all(np.diff(support) > 0.0):
            raise ValueError("support must be strictly ascending")
        if np.any(weights < 0.0):
            raise ValueError("weights must be nonnegative")
        if abs(float(np.sum(weights)) - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1 within {WEIGHT_TOL}")
        support.setflags(write=False)
        weights.setflags(write=False)

    @staticmethod
    def point_mass(x: float) -> "EmpiricalMeasure":
        return EmpiricalMeasure(np.array([as_state(x)]), np.array([1.0]))

    @staticmethod
    def from_samples(values: Iterable[float]) -> "EmpiricalMeasure":
        """Empirical distribution of a sample; duplicates are merged."""
        arr = np.asarray(list(values), dtype=float)
        if arr.size == 0:
            raise ValueError("cannot build a measure from an empty sample")
        support, counts = np.unique(arr, return_counts=True)
        return EmpiricalMeasure(support, counts / arr.size)

    def mass_in(self, ball: Ball) -> float:
        inside = np.abs(self.support - ball.center) < ball.radius
        return float(np.sum(self.weights[inside]))


def pair(f: Union[TestFunction, Callable[[float], float]], mu: EmpiricalMeasure) -> float:
    """Integral of ``f`` against ``mu``: the weighted sum over the support."""
    vals = np.array([f(x) for x in mu.support])
    return float(np.dot(mu.weights, vals))


def _merged_signed_weights(mu: EmpiricalMeasure, nu: EmpiricalMeasure):
    support = np.concatenate([mu.support, nu.support])
    signed = np.concatenate([mu.weights, -nu.weights])
    merged, inverse = np.unique(support, return_inverse=True)
    d = np.zeros(merged.size)
    np.add.at(d, inverse, signed)
    return merged, d


def _max_signed_pairing(support: np.ndarray, d: np.ndarray) -> float:
    # Maximize sum_i d_i f_i subject to |f_i| <= 1 and
    # |f_{i+1} - f_i| <= support_{i+1} - support_i. On a line the adjacent
    # slope constraints imply all pairwise ones, so this value is the exact
    # supremum over 1-bounded 1-Lipschitz functions. Solved by propagating
    # the concave piecewise-linear value function of the last coordinate;
    # a sliding max of a concave function is the same function split at its
    # peak, shifted outward, with a flat plateau in between.
    phis = np.array([-1.0, 1.0])
    vals = np.array([-d[0], d[0]])
    for i in range(1, support.size):
        delta = support[i] - support[i - 1]
        vmax = vals.max()
        peak = np.nonzero(vals == vmax)[0]
        a, b = peak[0], peak[-1]
        phis = np.concatenate([phis[: a + 1] - delta, phis[b:] + delta])
        vals = np.concatenate([vals[: a + 1], vals[b:]])
        lo = np.interp(-1.0, phis, vals)
        hi = np.interp(1.0, phis, vals)
        keep = (phis > -1.0) & (phis < 1.0)
        phis = np.concatenate([[-1.0], phis[keep], [1.0]])
        vals = np.concatenate([[lo], vals[keep], [hi]])
        vals = vals + d[i] * phis
    return float(vals.max())


def bl_distance(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> float:
    """Bounded-Lipschitz distance between two discrete measures.

    Supremum of ``|<f, mu> - <f, nu>|`` over functions with sup-norm at most 1
    and Lipschitz constant at most 1. Computed exactly on the merged support;
    always in ``[0, 2]``, and equal to ``min(2, |x - y|)`` for point masses.
    """
    support, d = _merged_signed_weights(mu, nu)
    if not np.any(d):
        return 0.0
    if support.size == 1:
        return 0.0
    value = _max_signed_pairing(support, d)
    return min(max(value, 0.0), 2.0)


def _eval_bump(y: float, lo: float, hi: float, quarter: float) -> float:
    # distance from y to the closed core [lo, hi]
    d_core = max(0.0, lo - y, y - hi)
    # distance from y to the complement (within the half-line) of the open
    # enlargement (lo - quarter, hi + quarter)
    a = lo - quarter
    b = hi + quarter
    d_right = max(0.0, b - y)
    if a >= 0.0:
        d_comp = min(max(0.0, y - a), d_right)
    else:
        d_comp = d_right
    return d_comp / (d_comp + d_core)


def bump_function(region: Union[Ball, tuple], eps: float) -> TestFunction:
    """Continuous indicator surrogate: 1 on the region, 0 off its eps/4 collar.

    The value at ``y`` is ``d(y, C) / (d(y, C) + d(y, K))`` where ``K`` is the
    region and ``C`` the complement of its ``eps/4`` enlargement, so the output
    is 1 on ``K``, vanishes outside the enlargement, and has Lipschitz constant
    at most ``4 / eps``.
    """
    if not (eps > 0.0 and math.isfinite(eps)):
        raise ValueError("eps must be positive and finite")
    if isinstance(region, Ball):
        lo, hi = max(0.0, region.center - region.radius), region.center + region.radius
    else:
        lo, hi = float(region[0]), float(region[1])
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
            raise ValueError(f"empty or invalid interval {region!r}")
        lo = as_state(lo)
    return TestFunction(
        partial(_eval_bump, lo=lo, hi=hi, quarter=eps / 4.0),
        sup_bound=1.0,
        lip_const=4.0 / eps,
        lower=0.0,
        upper=1.0,
        name=f"bump([{lo:g},{hi:g}],{eps:g})",
    )

"""Iterated function systems driven by an exponential jump clock.

Between jumps the state follows a deterministic flow; at each jump time a
transformation is chosen from a finite family with probabilities that depend
on the pre-jump point, and applied. One trajectory is therefore a sequence
of records (jump time, pre-jump point, chosen index, post-jump point)
together with the flow interpolation in between.

Two models ship built in:

* ``flip``: maps (kill to 0, stay, invert), identity flow. The selection
  probabilities are continuous in the state and give the same kill and
  invert chance at x and 1/x, so a trajectory from x lives on {0, x, 1/x}
  until it is absorbed at 0.
* ``halving``: maps (halve, stay), identity flow, halving chosen with
  probability exp(-x). Near 0 the system halves almost surely, far away it
  barely moves; contraction strength varies from place to place. This model
  carries a full :class:`AssumptionSet` (anchor, contraction coefficient,
  modulus, series budget) that the diagnostics layer can audit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import as_state

__all__ = [
    "IdentityFlow",
    "ExponentialFlow",
    "IfsModel",
    "Trajectory",
    "AssumptionSet",
    "example_flip",
    "example_halving",
    "sample_jump_chain",
    "state_at",
    "j_n",
    "linear_modulus",
    "halving_tv_modulus",
    "check_prob_vector",
]

PROB_SUM_TOL = 1e-9


def check_prob_vector(weights: np.ndarray, where: str = "") -> np.ndarray:
    """Validate a probability vector (nonnegative, sums to one)."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0.0) or not np.all(np.isfinite(w)):
        raise ValueError(f"probability vector has invalid entries {w!r} {where}")
    s = float(np.sum(w))
    if abs(s - 1.0) > PROB_SUM_TOL:
        raise ValueError(f"probability vector sums to {s!r}, not 1 {where}")
    return w


@dataclass(frozen=True)
class IdentityFlow:
    def __call__(self, t: float, x: float) -> float:
        return x


@dataclass(frozen=True)
class ExponentialFlow:
    """Flow x -> x * exp(alpha t); expansion rate alpha >= 0."""

    alpha: float

    def __call__(self, t: float, x: float) -> float:
        return x * math.exp(self.alpha * t)


@dataclass(frozen=True)
class IfsModel:
    """Immutable description of one jump system.

    ``maps`` are the transformations, ``prob_field`` returns the selection
    probabilities at a point, ``flow`` moves the state between jumps and
    ``rate`` is the jump intensity. ``absorbing`` lists exact fixed points
    at which every map and the flow stall, so samplers may stop early.
    """

    name: str
    maps: tuple
    prob_field: Callable[[float], np.ndarray]
    rate: float
    flow: Callable[[float, float], float] = IdentityFlow()
    absorbing: tuple = ()

    def __post_init__(self) -> None:
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise ValueError("jump rate must be a positive real")
        if len(self.maps) == 0:
            raise ValueError("a jump system needs at least one map")

    @property
    def n_maps(self) -> int:
        return len(self.maps)

    def probabilities(self, x: float) -> np.ndarray:
        w = np.asarray(self.prob_field(x), dtype=float)
        if w.shape != (self.n_maps,):
            raise ValueError(f"prob_field returned shape {w.shape}, expected ({self.n_maps},)")
        return check_prob_vector(w, where=f"at x={x!r} in model {self.name!r}")

    def apply_map(self, index: int, x: float) -> float:
        """Apply map ``index`` (1-based) and validate the landing point."""
        y = float(self.maps[index - 1](x))
        if not math.isfinite(y) or y < 0.0:
            raise RuntimeError(
                f"map w{index} of model {self.name!r} produced invalid state {y!r} from x={x!r}"
            )
        return y

    def terminal_state(self, x0: float, t: float, stream: np.random.Generator) -> float:
        """State at time t of one trajectory from x0; trajectory not recorded.

        Stops drawing once the state hits an exact absorbing point; the
        result is identical to interpolating a fully recorded trajectory.
        """
        if t < 0.0:
            raise ValueError("time must be nonnegative")
        x = as_state(x0)
        if t == 0.0:
            return x
        rate = self.rate
        flow = self.flow
        absorbing = self.absorbing
        rnd = stream.random
        now = 0.0
        while True:
            if x in absorbing:
                return x
            gap = -math.log1p(-rnd()) / rate
            if gap <= 0.0:  # u == 0 draw, probability ~2^-53
                continue
            if now + gap > t:
                return flow(t - now, x)
            now += gap
            pre = flow(gap, x)
            x = self.apply_map(self._draw_index(pre, rnd), pre)

    def _draw_index(self, x: float, rnd) -> int:
        """Inverse-CDF draw from the selection probabilities at x (1-based).

        Validates the probability vector inline with plain float arithmetic;
        this sits on the jump hot path, so no numpy reductions here.
        """
        w = self.prob_field(x)
        if isinstance(w, np.ndarray):
            w = w.tolist()
        if len(w) != len(self.maps):
            raise ValueError(f"prob_field returned {len(w)} weights for "
                             f"{len(self.maps)} maps at x={x!r}")
        u = rnd()
        acc = 0.0
        chosen = 0
        k = 0
        for p in w:
            k += 1
            if p < 0.0:
                raise ValueError(
                    f"negative selection probability {p!r} at x={x!r} in model {self.name!r}")
            acc += p
            if chosen == 0 and u < acc:
                chosen = k
        if not (1.0 - PROB_SUM_TOL <= acc <= 1.0 + PROB_SUM_TOL):
            raise ValueError(
                f"selection probabilities sum to {acc!r} at x={x!r} in model {self.name!r}")
        if chosen:
            return chosen
        # float slack: fall back to the last map with positive weight
        for k in range(len(self.maps), 0, -1):
            if w[k - 1] > 0.0:
                return k
        raise RuntimeError(f"degenerate probability vector at x={x!r}")

    @staticmethod
    def state_label(x0: float) -> str:
        return f"{x0:g}"


@dataclass(frozen=True)
class Trajectory:
    """Jump-chain record: arrays over jumps k = 1..K with tau_0 = 0 implicit.

    ``tau`` holds jump times (strictly increasing), ``xi`` pre-jump points,
    ``index`` the chosen map (1-based), ``phi`` post-jump points.
    """

    x0: float
    horizon: float
    tau: np.ndarray
    xi: np.ndarray
    index: np.ndarray
    phi: np.ndarray

    def __len__(self) -> int:
        return self.tau.size

    @property
    def records(self):
        return list(zip(self.tau, self.xi, self.index, self.phi))


def sample_jump_chain(model: IfsModel, x: float, horizon: float,
                      stream: np.random.Generator) -> Trajectory:
    """Sample one trajectory and record every jump up to the horizon.

    Waiting times are i.i.d. exponential with the model rate, drawn by
    inverse CDF; the map index at each jump is drawn from the selection
    probabilities evaluated at the pre-jump point.
    """
    if not (horizon >= 0.0 and math.isfinite(horizon)):
        raise ValueError("horizon must be a finite nonnegative real")
    x = as_state(x)
    taus, xis, idxs, phis = [], [], [], []
    rnd = stream.random
    now = 0.0
    cur = x
    while True:
        gap = -math.log1p(-rnd()) / model.rate
        if gap <= 0.0:  # u == 0 draw, probability ~2^-53
            continue
        if now + gap > horizon:
            break
        now += gap
        pre = model.flow(gap, cur)
        k = model._draw_index(pre, rnd)
        cur = model.apply_map(k, pre)
        taus.append(now)
        xis.append(pre)
        idxs.append(k)
        phis.append(cur)
    return Trajectory(
        x0=x,
        horizon=float(horizon),
        tau=np.array(taus, dtype=float),
        xi=np.array(xis, dtype=float),
        index=np.array(idxs, dtype=int),
        phi=np.array(phis, dtype=float),
    )


def state_at(traj: Trajectory, model: IfsModel, t: float) -> float:
    """Interpolated state at time t: flow applied since the last jump."""
    if not (0.0 <= t <= traj.horizon):
        raise ValueError(f"t={t!r} outside [0, {traj.horizon}]")
    k = int(np.searchsorted(traj.tau, t, side="right"))
    if k == 0:
        return model.flow(t, traj.x0)
    return model.flow(t - traj.tau[k - 1], traj.phi[k - 1])


# ---------------------------------------------------------------------------
# built-in models


def _flip_kill(x: float) -> float:
    return 0.0


def _flip_stay(x: float) -> float:
    return x


def _flip_invert(x: float) -> float:
    return 1.0 / x if x != 0.0 else 0.0


def _flip_probs(x: float):
    if x < 2.0 / 3.0:
        return (x / 2.0, 1.0 - x, x / 2.0)
    if x <= 1.5:
        return (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)
    inv = 1.0 / x
    return (inv / 2.0, 1.0 - inv, inv / 2.0)


def _halve(x: float) -> float:
    return x / 2.0


def _stay(x: float) -> float:
    return x


def _halving_probs(x: float):
    p = math.exp(-x)
    return (p, 1.0 - p)


def _halving_r(x: float) -> float:
    return 1.0 - math.exp(-x) / 2.0


def linear_modulus(s: float) -> float:
    """Modulus omega(s) = s; the one matching the halving series budget."""
    return s


def halving_tv_modulus(s: float) -> float:
    """Modulus omega(s) = 2 (1 - exp(-s)).

    Equals the exact total selection-probability gap of the halving model
    between x = s and the anchor 0, so it is the tightest concave modulus
    for that field.
    """
    return 2.0 * (1.0 - math.exp(-s))


@dataclass(frozen=True)
class AssumptionSet:
    """Hypothesis data for contraction-based stability audits.

    ``anchor`` is the reference point z, ``r`` the place-dependent
    contraction coefficient with values in (0, 1], ``omega`` a concave
    nondecreasing modulus with omega(0) = 0 bounding the selection
    probability gap, ``alpha`` the flow expansion rate, and ``rate`` the
    jump intensity. ``m_start``, ``eta`` and ``gamma`` parametrize the
    series budget: the tail sum of modulated contraction products from
    index ``m_start``, over starting points within ``eta`` of the anchor,
    must stay at or below ``1 - gamma``.
    """

    anchor: float
    r: Callable[[float], float]
    omega: Callable[[float], float]
    m_start: int
    eta: float
    gamma: float
    alpha: float
    rate: float

    def __post_init__(self) -> None:
        as_state(self.anchor)
        if self.m_start < 0:
            raise ValueError("m_start must be a nonnegative integer")
        if not (self.eta > 0.0):
            raise ValueError("eta must be positive")
        if not (0.0 < self.gamma < 1.0):
            raise ValueError("gamma must lie in (0, 1)")
        if self.alpha < 0.0:
            raise ValueError("alpha must be nonnegative")
        if not (self.rate > 0.0):
            raise ValueError("rate must be positive")
        if self.omega(0.0) != 0.0:
            raise ValueError("omega(0) must equal 0")


def example_flip(lam: float) -> IfsModel:
    """Three-map flip system: kill to 0, stay, or invert, identity flow.

    Selection probabilities are (x/2, 1-x, x/2) below 2/3, uniform between
    2/3 and 3/2, and (1/(2x), 1-1/x, 1/(2x)) above 3/2; the three branches
    agree at the seams, so the field is continuous.
    """
    return IfsModel(
        name="flip",
        maps=(_flip_kill, _flip_stay, _flip_invert),
        prob_field=_flip_probs,
        rate=float(lam),
        flow=IdentityFlow(),
        absorbing=(0.0,),
    )


def example_halving(lam: float) -> tuple[IfsModel, AssumptionSet]:
    """Two-map halving system plus the hypothesis data it satisfies.

    The assumption data uses anchor 0, contraction coefficient
    r(x) = 1 - exp(-x)/2, tail start 0, window eta = 1/8 and budget
    1 - gamma = exp(1/8)/4. Two moduli are natural here and they are not
    interchangeable: ``linear_modulus`` makes the series budget an exact
    identity at the window edge, while ``halving_tv_modulus`` is the exact
    probability-gap bound (the linear one undershoots it near 0). The
    default is the linear modulus; the audit functions accept an override.
    """
    model = IfsModel(
        name="halving",
        maps=(_halve, _stay),
        prob_field=_halving_probs,
        rate=float(lam),
        flow=IdentityFlow(),
        absorbing=(0.0,),
    )
    assume = AssumptionSet(
        anchor=0.0,
        r=_halving_r,
        omega=linear_modulus,
        m_start=0,
        eta=0.125,
        gamma=1.0 - math.exp(0.125) / 4.0,
        alpha=0.0,
        rate=float(lam),
    )
    return model, assume


# ---------------------------------------------------------------------------
# composition-orbit contraction products


def j_n(model: IfsModel, assume: AssumptionSet, x: float, n: int,
        max_words: int = 10 ** 6) -> float:
    """Largest product of contraction coefficients over length-n map words.

    For a word (i_1, ..., i_n) the j-th factor is r evaluated at the point
    w_{i_1} o ... o w_{i_j} applied to x (composition applies the newest
    letter innermost), with the empty prefix contributing r(x). The maximum
    runs over all words; enumeration is depth first and prunes a branch as
    soon as its running product cannot beat the incumbent, which is sound
    because r never exceeds 1.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1.0
    x = as_state(x)
    N = model.n_maps
    if n * math.log(N) > math.log(max_words) + 1e-9:
        raise ValueError(
            f"{N}^{n} words exceed the enumeration budget of {max_words}; "
            "raise max_words explicitly if this is intended"
        )
    maps = model.maps
    r = assume.r

    def coeff(pt: float) -> float:
        v = float(r(pt))
        if not (0.0 < v <= 1.0):
            raise ValueError(f"contraction coefficient r({pt!r}) = {v!r} outside (0, 1]")
        return v

    base = coeff(x)
    if n == 1:
        return base
    best = 0.0
    # stack entries: (prefix letters, running product over prefixes 0..len-1)
    stack = [((), base)]
    while stack:
        prefix, running = stack.pop()
        if running <= best and best > 0.0:
            continue
        depth = len(prefix) + 1  # prefixes consumed so far
        for letter in range(N - 1, -1, -1):
            # point of the extended prefix: newest letter applied first
            pt = float(maps[letter](x))
            for idx in reversed(prefix):
                pt = float(maps[idx](pt))
            if not math.isfinite(pt) or pt < 0.0:
                raise RuntimeError(
                    f"map w{letter + 1} orbit left the state space at {pt!r}"
                )
            prod = running * coeff(pt)
            if depth == n - 1:
                if prod > best:
                    best = prod
            elif prod > best:
                stack.append((prefix + (letter,), prod))
    return best

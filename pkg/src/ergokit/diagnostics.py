"""Computable surrogates for the ergodicity notions the built-in models probe.

Long-run quantities such as ``limsup`` or ``liminf`` over all times are not
computable; every diagnostic here replaces them by a max or min over an
explicit, user-declared large-time grid, and labels the window in its
output so the surrogate's scope is always visible. Monte Carlo rows carry
Hoeffding or bounded-difference half-widths; whenever a reported statistic
aggregates several estimated cells, the cell confidences are combined with
a union bound so the row's guarantee holds at the declared confidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional, Sequence

import numpy as np

from .core import Ball, EmpiricalMeasure, TestFunction, bl_distance
from .exact_ctmc import CtmcProcess
from .ifs_jump import AssumptionSet, IfsModel, j_n
from .montecarlo import (
    SamplingPlan,
    estimate_ptf,
    hoeffding_half_width,
    run_batch,
    sample_terminals,
)

__all__ = [
    "McSettings",
    "ReportRow",
    "DiagnosticReport",
    "ec_profile",
    "eproperty_witness",
    "lower_bound_scan",
    "stability_report",
    "check_b2",
    "check_b3",
    "check_b5",
    "check_c2",
]


@dataclass(frozen=True)
class McSettings:
    """Monte Carlo budget shared by the sampling diagnostics."""

    n_samples: int = 10_000
    seed: int = 0
    confidence: float = 0.999
    workers: Optional[int] = None

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must lie in (0, 1)")


@dataclass(frozen=True)
class ReportRow:
    label: str
    x: str
    t: str
    value: float
    half_width: float
    error: Optional[str] = None


@dataclass
class DiagnosticReport:
    """Rows plus the metadata needed to reproduce them."""

    metadata: dict
    rows: list = field(default_factory=list)

    def add(self, label: str, x, t, value: float, half_width: float,
            error: Optional[str] = None) -> None:
        if half_width < 0.0:
            raise ValueError("half widths are nonnegative")
        self.rows.append(ReportRow(label, str(x), str(t), float(value),
                                   float(half_width), error))

    def values(self, label: Optional[str] = None) -> list:
        return [r.value for r in self.rows if label is None or r.label == label]

    def failed_rows(self) -> list:
        return [r for r in self.rows if r.error is not None]


def _is_exact(process) -> bool:
    return isinstance(process, CtmcProcess)


def _split_confidence(confidence: float, n_cells: int) -> float:
    """Per-cell confidence whose union bound meets the target confidence."""
    return 1.0 - (1.0 - confidence) / n_cells


def _difference_half_width(value_bound: float, n: int, confidence: float) -> float:
    """Hoeffding half-width for the difference of two independent n-means."""
    delta = 1.0 - confidence
    return value_bound * math.sqrt(math.log(2.0 / delta) / n)


def _mcdiarmid_half_width(n: int, confidence: float, n_empirical: int) -> float:
    """Bounded-difference half-width for a distance of 1 or 2 empirical laws
    around its own expectation (one sample swap moves the value by <= 2/n)."""
    delta = 1.0 - confidence
    return math.sqrt(2.0 * n_empirical * math.log(2.0 / delta) / n)


def _window_label(lo: float, hi: float) -> str:
    return f"[{lo:g},{hi:g}]"


def _base_metadata(process, name: str, mc: Optional[McSettings]) -> dict:
    meta = {"diagnostic": name, "model": getattr(process, "name", "?")}
    rate = getattr(process, "rate", None)
    if rate is not None:
        meta["lambda"] = rate
    if mc is not None:
        meta.update(samples=mc.n_samples, seed=mc.seed, confidence=mc.confidence)
    return meta


# ---------------------------------------------------------------------------
# eventual-continuity profile


def ec_profile(process, f: TestFunction, z, xs: Sequence, T: float, t_max: float,
               grid: Sequence[float], mc: Optional[McSettings] = None) -> DiagnosticReport:
    """Largest time-t expectation gap between each x and the anchor z over a
    late-time window.

    For each x the reported value is ``max over grid of |P_t f(x) - P_t f(z)|``
    with the grid inside ``[T, t_max]``. Values that shrink as x approaches z
    are evidence of insensitivity to the initial condition at z; the window
    makes the late-time surrogate explicit. Exact closed forms are used for
    the built-in chain, Monte Carlo otherwise.
    """
    grid = sorted(float(g) for g in grid)
    if not grid:
        raise ValueError("grid empty")
    if not (0.0 <= T <= t_max):
        raise ValueError("window must satisfy 0 <= T <= t_max")
    if grid[0] < T or grid[-1] > t_max:
        raise ValueError("grid must lie inside the window [T, t_max]")
    window = _window_label(T, t_max)

    if _is_exact(process):
        report = DiagnosticReport(_base_metadata(process, "ec_profile", None))
        report.metadata.update(mode="exact", window=window, grid=grid, f=f.name,
                               z=process.state_label(z))
        for x in xs:
            gap = max(abs(process.exact_expectation(f, x, t)
                          - process.exact_expectation(f, z, t)) for t in grid)
            report.add("ec_gap_max", process.state_label(x), window, gap, 0.0)
        return report

    mc = mc or McSettings()
    initials = tuple(xs) + (z,)
    plan = SamplingPlan(process, initials, tuple(grid), (f,), mc.n_samples, mc.seed,
                        confidence=_split_confidence(mc.confidence, len(initials) * len(grid)))
    results = run_batch(plan, workers=mc.workers)
    means = {}
    for cell in results:
        if cell.error is not None:
            raise RuntimeError(f"cell {cell.cell_index} failed: {cell.error}")
        means[(cell.initial, cell.time)] = cell.estimate
    report = DiagnosticReport(_base_metadata(process, "ec_profile", mc))
    report.metadata.update(mode="monte-carlo", window=window, grid=grid, f=f.name,
                           z=process.state_label(z))
    z_label = process.state_label(z)
    for x in xs:
        x_label = process.state_label(x)
        gap, hw = 0.0, 0.0
        for t in grid:
            ex, ez = means[(x_label, t)], means[(z_label, t)]
            gap = max(gap, abs(ex.mean - ez.mean))
            hw = max(hw, ex.half_width + ez.half_width)
        report.add("ec_gap_max", x_label, window, gap, hw)
    return report


# ---------------------------------------------------------------------------
# equicontinuity-failure witness


def eproperty_witness(process, f: TestFunction, z, pairs: Sequence,
                      mc: Optional[McSettings] = None) -> DiagnosticReport:
    """Expectation gaps ``P_t f(x) - P_t f(z)`` along a list of (x, t) pairs.

    A sequence of pairs with x -> z whose gap stays above a positive floor
    witnesses that the expectation family is not equicontinuous at z, no
    matter how it behaves for each fixed time.
    """
    if not pairs:
        raise ValueError("need at least one (x, t) pair")

    if _is_exact(process):
        report = DiagnosticReport(_base_metadata(process, "eproperty_witness", None))
        report.metadata.update(mode="exact", f=f.name, z=process.state_label(z))
        for x, t in pairs:
            w = process.exact_expectation(f, x, t) - process.exact_expectation(f, z, t)
            report.add("witness", process.state_label(x), f"{t:g}", w, 0.0)
        return report

    mc = mc or McSettings()
    report = DiagnosticReport(_base_metadata(process, "eproperty_witness", mc))
    report.metadata.update(mode="monte-carlo", f=f.name, z=process.state_label(z))
    conf_pair = mc.confidence
    for k, (x, t) in enumerate(pairs):
        ex = estimate_ptf(process, x, t, f, mc.n_samples, mc.seed,
                          cell=2 * k, confidence=conf_pair)
        ez = estimate_ptf(process, z, t, f, mc.n_samples, mc.seed,
                          cell=2 * k + 1, confidence=conf_pair)
        hw = _difference_half_width(f.value_bound, mc.n_samples, conf_pair)
        report.add("witness", process.state_label(x), f"{t:g}", ex.mean - ez.mean, hw)
    return report


# ---------------------------------------------------------------------------
# long-run neighborhood hit floor


def lower_bound_scan(process, z, eps: float, x_grid: Sequence, t_grid: Sequence[float],
                     mc: Optional[McSettings] = None) -> DiagnosticReport:
    """Worst late-time probability of sitting near the anchor, over a start grid.

    Reports ``m(x) = min over t_grid of P_t(x, B(z, eps))`` for each start x
    and the scan minimum over x. A scan minimum whose lower confidence
    endpoint stays positive supports the hit-probability floor needed for
    stability; the floor claim is only as strong as the declared grids.
    """
    if not (eps > 0.0):
        raise ValueError("eps must be positive")
    t_grid = sorted(float(t) for t in t_grid)
    if not t_grid:
        raise ValueError("grid empty")
    if not x_grid:
        raise ValueError("x grid empty")
    mc = mc or McSettings()
    anchor = z.value if hasattr(z, "value") else float(z)
    ball = Ball(anchor, eps)
    n_cells = len(x_grid) * len(t_grid)
    plan = SamplingPlan(process, tuple(x_grid), tuple(t_grid), (ball,),
                        mc.n_samples, mc.seed,
                        confidence=_split_confidence(mc.confidence, n_cells))
    results = run_batch(plan, workers=mc.workers)

    report = DiagnosticReport(_base_metadata(process, "lower_bound_scan", mc))
    report.metadata.update(z=f"{anchor:g}", eps=eps, t_grid=t_grid,
                           x_grid=[process.state_label(x) for x in x_grid])
    by_initial: dict = {}
    failures = []
    for cell in results:
        if cell.error is not None:
            failures.append(cell)
            continue
        cur = by_initial.get(cell.initial)
        if cur is None or cell.estimate.mean < cur[0]:
            by_initial[cell.initial] = (cell.estimate.mean, cell.time, cell.estimate.half_width)
    for x in x_grid:
        label = process.state_label(x)
        if label in by_initial:
            m, t_at, hw = by_initial[label]
            report.add("hit_prob_min", label, f"{t_at:g}", m, hw)
    for cell in failures:
        report.add("hit_prob_min", cell.initial, f"{cell.time:g}", math.nan, 0.0,
                   error=cell.error)
    if by_initial:
        m, t_at, hw = min(by_initial.values())
        report.add("scan_min", "all", _window_label(t_grid[0], t_grid[-1]), m, hw)
    return report


# ---------------------------------------------------------------------------
# distance-to-equilibrium decay


def stability_report(process, initials: Sequence, t_grid: Sequence[float],
                     reference: EmpiricalMeasure,
                     mc: Optional[McSettings] = None) -> DiagnosticReport:
    """Bounded-Lipschitz distances of sampled laws to a candidate limit.

    For each start and grid time the empirical law of the time-t state is
    compared against the reference measure, and laws from different starts
    are compared pairwise. Distances falling toward 0 from every start are
    the observable trace of convergence to a unique limit. Half-widths are
    bounded-difference bounds around the expected empirical distance; the
    residual sampling bias of the empirical law itself is not estimated.
    """
    t_grid = sorted(float(t) for t in t_grid)
    if not t_grid:
        raise ValueError("grid empty")
    if not initials:
        raise ValueError("need at least one initial point")
    mc = mc or McSettings()
    report = DiagnosticReport(_base_metadata(process, "stability_report", mc))
    report.metadata.update(t_grid=t_grid,
                           initials=[process.state_label(x) for x in initials])
    hw1 = _mcdiarmid_half_width(mc.n_samples, mc.confidence, 1)
    hw2 = _mcdiarmid_half_width(mc.n_samples, mc.confidence, 2)
    cells = list(enumerate(product(initials, t_grid)))
    laws: dict = {}
    for idx, (x, t) in cells:
        label = process.state_label(x)
        try:
            values = sample_terminals(process, x, t, mc.n_samples, mc.seed, cell=idx)
        except Exception as exc:
            report.add("bl_to_ref", label, f"{t:g}", math.nan, 0.0, error=str(exc))
            continue
        law = EmpiricalMeasure.from_samples(values)
        laws[(label, t)] = law
        report.add("bl_to_ref", label, f"{t:g}", bl_distance(law, reference), hw1)
    labels = [process.state_label(x) for x in initials]
    for t in t_grid:
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                a, b = laws.get((labels[i], t)), laws.get((labels[j], t))
                if a is None or b is None:
                    continue
                report.add("bl_between", f"{labels[i]}|{labels[j]}", f"{t:g}",
                           bl_distance(a, b), hw2)
    return report


# ---------------------------------------------------------------------------
# hypothesis audits for jump systems with assumption data


def check_b2(model: IfsModel, assume: AssumptionSet, x_grid: Sequence[float]) -> float:
    """Worst violation of the mean one-jump contraction bound on the grid.

    At each x the expected post-jump distance to the anchor must not exceed
    ``r(x)`` times the current distance; returns the largest excess (a value
    at or below 0 means the bound holds on the grid).
    """
    if len(x_grid) == 0:
        raise ValueError("x grid empty")
    z = assume.anchor
    worst = -math.inf
    for x in x_grid:
        probs = model.probabilities(x)
        lhs = 0.0
        for k, p in enumerate(probs, start=1):
            lhs += p * abs(model.apply_map(k, x) - z)
        worst = max(worst, lhs - assume.r(x) * abs(x - z))
    return worst


def check_b3(model: IfsModel, assume: AssumptionSet, x_grid: Sequence[float],
             omega: Optional[Callable[[float], float]] = None) -> float:
    """Worst violation of the selection-probability modulus bound on the grid.

    The total probability gap between x and the anchor must be dominated by
    ``omega(|x - z|)``; returns the largest excess over the grid.
    """
    if len(x_grid) == 0:
        raise ValueError("x grid empty")
    omega = omega or assume.omega
    z = assume.anchor
    pz = model.probabilities(z)
    worst = -math.inf
    for x in x_grid:
        gap = float(np.sum(np.abs(model.probabilities(x) - pz)))
        worst = max(worst, gap - omega(abs(x - z)))
    return worst


def check_b5(model: IfsModel, assume: AssumptionSet, n_trunc: int,
             x_grid: Sequence[float],
             omega: Optional[Callable[[float], float]] = None,
             max_words: int = 10 ** 6) -> float:
    """Worst series-budget residual over starting points near the anchor.

    Sums ``omega(J_m(x) |x - z| (rate/(rate - alpha))^m)`` for m from
    ``m_start`` to ``n_trunc`` and adds a geometric majorant for the tail,
    extrapolated from the last observed term ratio. The majorant is valid
    when the term arguments keep decaying at no worse than that ratio and
    omega is concave (so it is dominated by secants through the origin);
    for a linear omega under a constant contraction coefficient it is exact.
    Returns the largest value of (bounded sum) - (1 - gamma); at or below 0
    means the budget holds on the grid. Raises if the observed terms do not
    decay, rather than truncating silently.
    """
    if len(x_grid) == 0:
        raise ValueError("x grid empty")
    if n_trunc < assume.m_start:
        raise ValueError("n_trunc must be at least m_start")
    if not assume.rate > assume.alpha:
        raise ValueError("series budget needs rate > alpha")
    omega = omega or assume.omega
    if omega(0.0) != 0.0:
        raise ValueError("omega(0) must equal 0")
    z = assume.anchor
    kappa = assume.rate / (assume.rate - assume.alpha)
    budget = 1.0 - assume.gamma
    worst = -math.inf
    for x in x_grid:
        dist = abs(x - z)
        if dist > assume.eta * (1.0 + 1e-12):
            raise ValueError(f"x={x!r} lies outside the eta-window around the anchor")
        terms = []
        for m in range(assume.m_start, n_trunc + 1):
            u = j_n(model, assume, x, m, max_words=max_words) * dist * kappa ** m
            terms.append(omega(u))
        total = math.fsum(terms)
        if terms[-1] > 0.0:
            if len(terms) < 2 or terms[-2] <= 0.0:
                raise ValueError(
                    "cannot extrapolate the tail from a single positive term; "
                    "increase n_trunc"
                )
            ratio = terms[-1] / terms[-2]
            if not ratio < 1.0:
                raise ValueError(
                    f"geometric tail bound inapplicable at x={x!r}: "
                    f"term ratio {ratio:.6g} does not decay"
                )
            total += terms[-1] * ratio / (1.0 - ratio)
        worst = max(worst, total - budget)
    return worst


def check_c2(process, z, eps_list: Sequence[float], x_grid: Sequence,
             t_search: float, mc: Optional[McSettings] = None) -> DiagnosticReport:
    """Empirical reachability floor: how surely each start visits the anchor.

    Searches the exponentially spaced times {0, 1, 2, 4, ...} up to
    ``t_search`` and reports, per radius, each start's best hit probability
    with the earliest grid time attaining it, plus the floor
    ``beta_hat = min over x of max over t`` of the hit probability. The same
    trajectories are reused for every radius, so enlarging the radius never
    lowers a reported probability.
    """
    if not (t_search > 0.0):
        raise ValueError("t_search must be positive")
    if not eps_list or not x_grid:
        raise ValueError("need at least one radius and one start")
    mc = mc or McSettings()
    anchor = z.value if hasattr(z, "value") else float(z)
    t_grid = [0.0]
    t = 1.0
    while t <= t_search:
        t_grid.append(t)
        t *= 2.0
    n_cells = len(x_grid) * len(t_grid)
    conf_cell = _split_confidence(mc.confidence, n_cells)
    hw = hoeffding_half_width(1.0, mc.n_samples, conf_cell)

    report = DiagnosticReport(_base_metadata(process, "check_c2", mc))
    report.metadata.update(z=f"{anchor:g}", t_search=t_search, t_grid=t_grid,
                           eps_list=list(eps_list),
                           x_grid=[process.state_label(x) for x in x_grid])
    hit_prob: dict = {}
    for idx, (x, t) in enumerate(product(x_grid, t_grid)):
        values = sample_terminals(process, x, t, mc.n_samples, mc.seed, cell=idx)
        dists = np.abs(values - anchor)
        for eps in eps_list:
            hit_prob[(eps, process.state_label(x), t)] = float(np.mean(dists < eps))
    for eps in eps_list:
        best: dict = {}
        for x in x_grid:
            label = process.state_label(x)
            probs = [(hit_prob[(eps, label, t)], t) for t in t_grid]
            m_x = max(p for p, _ in probs)
            if m_x <= 0.0:
                report.add("c2_first_hit", label, f">{t_search:g}", 0.0, hw,
                           error="no hit within t_search")
                best[label] = 0.0
                continue
            t_first = min(t for p, t in probs if p >= m_x)
            report.add("c2_first_hit", label, f"{t_first:g}", m_x, hw)
            best[label] = m_x
        report.add("c2_beta", f"eps={eps:g}", f"<={t_search:g}", min(best.values()), hw)
    return report

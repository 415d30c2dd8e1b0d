import math

import numpy as np
import pytest

from ergokit.core import xmin1
from ergokit.exact_ctmc import (
    CtmcProcess,
    CtmcState,
    chapman_kolmogorov_residual,
    parse_ctmc_state,
    sample_path,
    semigroup_apply,
    transition_prob,
)
from ergokit.montecarlo import StreamFactory, hoeffding_half_width

F = xmin1()


def states(n):
    return CtmcState.low(n), CtmcState.high(n), CtmcState.zero()


# ---------------------------------------------------------------------------
# transition table


def test_low_to_high_at_matching_time():
    assert transition_prob(CtmcState.low(4), CtmcState.high(4), 4.0) == pytest.approx(
        math.exp(-1.0), abs=1e-15)


def test_zero_is_absorbing():
    for t in (0.0, 1.0, 123.4):
        assert transition_prob(CtmcState.zero(), CtmcState.zero(), t) == 1.0
        assert transition_prob(CtmcState.zero(), CtmcState.low(2), t) == 0.0


def test_time_zero_is_identity():
    low3, high3, zero = states(3)
    assert transition_prob(low3, zero, 0.0) == 0.0
    assert transition_prob(low3, low3, 0.0) == 1.0
    assert transition_prob(high3, high3, 0.0) == 1.0


def test_no_cross_cascade_transitions():
    assert transition_prob(CtmcState.low(3), CtmcState.high(5), 2.0) == 0.0
    assert transition_prob(CtmcState.high(3), CtmcState.low(3), 2.0) == 0.0


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        transition_prob(CtmcState.low(2), CtmcState.zero(), -0.1)


@pytest.mark.parametrize("n", [2, 3, 7, 50])
@pytest.mark.parametrize("t", [0.0, 0.3, 1.0, 5.0, 40.0])
def test_rows_sum_to_one(n, t):
    row_states = states(n)
    for i in row_states:
        total = sum(transition_prob(i, j, t) for j in row_states)
        assert total == pytest.approx(1.0, abs=1e-12)


def test_absorption_is_monotone_in_time():
    zero = CtmcState.zero()
    grid = np.linspace(0.0, 60.0, 121)
    for i in (CtmcState.low(4), CtmcState.high(4)):
        probs = [transition_prob(i, zero, t) for t in grid]
        assert all(b >= a for a, b in zip(probs, probs[1:]))


# ---------------------------------------------------------------------------
# semigroup evaluation


def test_expectation_from_absorbing_state_is_zero():
    assert semigroup_apply(F, CtmcState.zero(), 7.0) == 0.0


def test_expectation_low2_at_time_two():
    got = semigroup_apply(F, CtmcState.low(2), 2.0)
    assert got == pytest.approx(math.exp(-1.0) * 1.5, abs=1e-15)


def test_expectation_high5_at_time_five():
    got = semigroup_apply(F, CtmcState.high(5), 5.0)
    assert got == pytest.approx(math.exp(-1.0), abs=1e-15)


@pytest.mark.parametrize("n", [2, 3, 5, 10, 50])
def test_diagonal_gap_identity(n):
    # the time-n gap between starting at 1/n and at 0 is exp(-1) (1 + 1/n)
    gap = semigroup_apply(F, CtmcState.low(n), float(n)) - semigroup_apply(
        F, CtmcState.zero(), float(n))
    assert gap == pytest.approx(math.exp(-1.0) * (1.0 + 1.0 / n), abs=1e-12)
    assert gap >= math.exp(-1.0)


@pytest.mark.parametrize("n", [2, 5, 10])
def test_gap_dies_out_for_fixed_start(n):
    # max over [10n, 100n] of the expectation from 1/n, against the closed form
    grid = np.linspace(10.0 * n, 100.0 * n, 64)
    psi = max(abs(semigroup_apply(F, CtmcState.low(n), t)) for t in grid)
    closed = max(math.exp(-t / n) * (1.0 + t) / n for t in grid)
    assert psi == pytest.approx(closed, abs=1e-15)
    assert psi <= 11.0 * math.exp(-10.0) < 5e-4


# ---------------------------------------------------------------------------
# consistency of the table


@pytest.mark.parametrize("seed", range(4))
def test_chapman_kolmogorov_on_random_triples(seed):
    rng = np.random.default_rng(seed)
    for _ in range(25):
        n = int(rng.integers(2, 80))
        s, t = rng.uniform(0.0, 40.0, size=2)
        assert chapman_kolmogorov_residual(n, s, t) < 1e-12


def test_chapman_kolmogorov_at_time_zero_is_exact():
    assert chapman_kolmogorov_residual(2, 0.0, 5.0) == 0.0


def test_chapman_kolmogorov_symbolic_case():
    assert chapman_kolmogorov_residual(3, 1.0, 2.0) < 1e-12
    assert chapman_kolmogorov_residual(10, 7.3, 0.4) < 1e-12


# ---------------------------------------------------------------------------
# trajectory sampling against the closed form


def test_sample_path_zero_absorbing():
    stream = StreamFactory(1).stream(0, 0)
    for t in (0.0, 2.0, 50.0):
        assert sample_path(CtmcState.zero(), t, stream) == CtmcState.zero()


def test_sample_path_no_time_no_move():
    stream = StreamFactory(1).stream(0, 1)
    assert sample_path(CtmcState.high(4), 0.0, stream) == CtmcState.high(4)


def test_sample_path_marginal_matches_table():
    # empirical occupation of High(4) at t = 4 vs the closed form exp(-1)
    n_samples = 100_000
    factory = StreamFactory(777)
    start = CtmcState.low(4)
    hits_high = 0
    hits_low = 0
    for k in range(n_samples):
        out = sample_path(start, 4.0, factory.stream(0, k))
        hits_high += out == CtmcState.high(4)
        hits_low += out == CtmcState.low(4)
    hw = hoeffding_half_width(1.0, n_samples, 0.999)
    assert hits_high / n_samples == pytest.approx(math.exp(-1.0), abs=3 * hw)
    assert hits_low / n_samples == pytest.approx(math.exp(-1.0), abs=3 * hw)


def test_process_terminal_state_embeds_sampled_state():
    proc = CtmcProcess()
    factory = StreamFactory(5)
    a = proc.terminal_state(CtmcState.low(3), 3.0, factory.stream(0, 0))
    b = sample_path(CtmcState.low(3), 3.0, factory.stream(0, 0)).value
    assert a == b


def test_exact_law_is_a_probability_measure():
    law = CtmcProcess().exact_law(CtmcState.low(5), 5.0)
    assert float(np.sum(law.weights)) == pytest.approx(1.0, abs=1e-12)
    assert list(law.support) == [0.0, 0.2, 5.0]


# ---------------------------------------------------------------------------
# state plumbing


def test_state_embeddings():
    assert CtmcState.zero().value == 0.0
    assert CtmcState.low(4).value == 0.25
    assert CtmcState.high(4).value == 4.0


def test_state_validation():
    with pytest.raises(ValueError):
        CtmcState.low(1)
    with pytest.raises(ValueError):
        CtmcState.high(0)
    with pytest.raises(ValueError):
        CtmcState("weird")


def test_state_parsing_round_trip():
    for token, want in [("zero", CtmcState.zero()), ("low:7", CtmcState.low(7)),
                        ("high:3", CtmcState.high(3))]:
        assert parse_ctmc_state(token) == want
        assert parse_ctmc_state(str(want)) == want
    with pytest.raises(ValueError):
        parse_ctmc_state("mid:4")

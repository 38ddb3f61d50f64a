import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from survfuse.stepfn import StepFunction
from survfuse.survmetrics import (
    NotComputableError,
    average_curves,
    brier_curve,
    censoring_km,
    concordance_index,
    cumulative_dynamic_auc,
    kaplan_meier,
    risk_stratify,
)
from survfuse.synthetic import random_censored_sample


def brute_force_concordance(time, event, risks):
    """O(n^2) oracle: enumerate every ordered pair."""
    conc = disc = tied = 0
    n = len(time)
    for i in range(n):
        if not event[i]:
            continue
        for j in range(n):
            if time[i] < time[j]:
                if risks[i] > risks[j]:
                    conc += 1
                elif risks[i] < risks[j]:
                    disc += 1
                else:
                    tied += 1
    total = conc + disc + tied
    if total == 0:
        return None
    return (conc + 0.5 * tied) / total, conc, disc, tied, total


def brute_force_auc(time, event, risks, t):
    """Unweighted cumulative/dynamic AUC oracle (valid when no censoring)."""
    cases = [i for i in range(len(time)) if time[i] <= t and event[i]]
    controls = [j for j in range(len(time)) if time[j] > t]
    if not cases or not controls:
        return None
    total = 0.0
    for i in cases:
        for j in controls:
            if risks[i] > risks[j]:
                total += 1.0
            elif risks[i] == risks[j]:
                total += 0.5
    return total / (len(cases) * len(controls))


def test_concordance_perfect_and_reversed():
    time = np.array([1.0, 2.0, 3.0, 4.0])
    event = np.array([True, True, False, True])
    res = concordance_index(time, event, np.array([4.0, 3.0, 2.0, 1.0]))
    assert res.c_index == 1.0 and res.n_comparable == 5
    res = concordance_index(time, event, np.array([1.0, 2.0, 3.0, 4.0]))
    assert res.c_index == 0.0


def test_concordance_all_ties_is_half():
    time = np.array([1.0, 2.0, 3.0])
    event = np.array([True, True, True])
    res = concordance_index(time, event, np.zeros(3))
    assert res.c_index == 0.5
    assert res.n_tied_risk == res.n_comparable


def test_concordance_matches_brute_force_100_instances():
    rng = np.random.default_rng(0)
    for _ in range(100):
        time, event, risks = random_censored_sample(rng)
        oracle = brute_force_concordance(time, event, risks)
        if oracle is None:
            with pytest.raises(NotComputableError):
                concordance_index(time, event, risks)
            continue
        c, conc, disc, tied, total = oracle
        res = concordance_index(time, event, risks)
        assert res.c_index == c
        assert (res.n_concordant, res.n_discordant, res.n_tied_risk, res.n_comparable) == (
            conc, disc, tied, total,
        )


def test_concordance_no_comparable_pairs():
    # Single event occurring after every censoring time.
    time = np.array([5.0, 1.0, 2.0])
    event = np.array([True, False, False])
    with pytest.raises(NotComputableError):
        concordance_index(time, event, np.array([1.0, 2.0, 3.0]))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_concordance_rank_invariance(seed):
    rng = np.random.default_rng(seed)
    time, event, risks = random_censored_sample(rng)
    transformed = np.exp(risks) + 3.0  # strictly increasing transform
    try:
        res = concordance_index(time, event, risks)
    except NotComputableError:
        return
    res2 = concordance_index(time, event, transformed)
    assert res.c_index == res2.c_index


def test_km_hand_computed():
    # times [1,2,3], events [1,0,1]: S = 2/3 on [1,3), 0 at t >= 3.
    km = kaplan_meier(np.array([1.0, 2.0, 3.0]), np.array([True, False, True]))
    assert km(0.5) == 1.0
    assert np.isclose(km(1.0), 2.0 / 3.0, rtol=1e-15)
    assert np.isclose(km(2.5), 2.0 / 3.0, rtol=1e-15)
    assert km(3.0) == 0.0


def test_km_no_events_is_one():
    km = kaplan_meier(np.array([1.0, 2.0]), np.array([False, False]))
    assert km(0.0) == 1.0 and km(5.0) == 1.0


def test_km_two_distinct_events():
    km = kaplan_meier(np.array([1.0, 2.0]), np.array([True, True]))
    assert np.isclose(km(1.0), 0.5, rtol=1e-15)
    assert km(2.0) == 0.0


def test_km_bounds_and_monotone():
    rng = np.random.default_rng(1)
    for _ in range(20):
        time, event, _ = random_censored_sample(rng)
        km = kaplan_meier(time, event)
        grid = np.linspace(0, time.max() + 1, 50)
        vals = np.atleast_1d(km(grid))
        assert np.all((vals >= 0) & (vals <= 1))
        assert np.all(np.diff(vals) <= 0)


def test_censoring_km_is_flipped_km():
    rng = np.random.default_rng(2)
    time, event, _ = random_censored_sample(rng)
    g = censoring_km(time, event)
    flipped = kaplan_meier(time, ~event)
    assert np.array_equal(g.times, flipped.times)
    assert np.array_equal(g.values, flipped.values)


def test_censoring_km_edges():
    g = censoring_km(np.array([1.0, 2.0]), np.array([True, True]))
    assert g(10.0) == 1.0  # no censoring
    g = censoring_km(np.array([5.0, 5.0]), np.array([False, False]))
    assert g(4.9) == 1.0 and g(5.0) == 0.0


def test_auc_perfect_ordering_single_time():
    # No censoring, risks perfectly ordered, t chosen with 2 cases / 2 controls.
    time = np.array([1.0, 2.0, 5.0, 6.0])
    event = np.ones(4, bool)
    risks = np.array([4.0, 3.0, 2.0, 1.0])
    auc, mean = cumulative_dynamic_auc(time, event, time, event, risks, np.array([3.0]))
    assert auc[0] == 1.0 and mean == 1.0


def test_auc_all_risks_equal_is_half():
    time = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    event = np.ones(5, bool)
    auc, mean = cumulative_dynamic_auc(
        time, event, time, event, np.zeros(5), np.array([1.5, 2.5, 3.5])
    )
    assert np.all(auc == 0.5) and mean == 0.5


def test_auc_no_censoring_matches_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(5, 20))
        time = rng.permutation(np.arange(1.0, n + 1.0))
        event = np.ones(n, bool)
        risks = np.round(rng.standard_normal(n), 1)
        t = float(rng.integers(1, n)) + 0.5
        oracle = brute_force_auc(time, event, risks, t)
        if oracle is None:
            continue
        auc, mean = cumulative_dynamic_auc(time, event, time, event, risks, np.array([t]))
        assert abs(auc[0] - oracle) < 1e-12
        assert abs(mean - oracle) < 1e-12


def test_auc_invalid_points_flagged():
    time = np.array([3.0, 4.0, 5.0, 6.0])
    event = np.array([False, True, True, False])
    risks = np.array([1.0, 2.0, 3.0, 4.0])
    # t=3.5 has no cases (only a censoring before it).
    auc, _ = cumulative_dynamic_auc(time, event, time, event, risks, np.array([3.5, 4.5]))
    assert np.isnan(auc[0]) and not np.isnan(auc[1])


def test_brier_oracle_predictions_zero():
    time = np.array([2.0, 4.0, 6.0, 8.0])
    event = np.ones(4, bool)
    times = np.array([3.0, 5.0, 7.0])
    surv = np.array([[1.0 if t < time[i] else 0.0 for t in times] for i in range(4)])
    bs, ibs = brier_curve(time, event, time, event, surv, times)
    assert np.all(bs == 0.0) and ibs == 0.0


def test_brier_constant_half_is_quarter():
    time = np.array([2.0, 4.0, 6.0, 8.0])
    event = np.ones(4, bool)
    times = np.array([3.0, 5.0, 7.0])
    surv = np.full((4, 3), 0.5)
    bs, ibs = brier_curve(time, event, time, event, surv, times)
    assert np.allclose(bs, 0.25, rtol=1e-15)
    assert np.isclose(ibs, 0.25, rtol=1e-15)  # constant integrand


def test_brier_rejects_out_of_range_times():
    time = np.array([2.0, 4.0])
    event = np.ones(2, bool)
    with pytest.raises(ValueError, match="range"):
        brier_curve(time, event, time, event, np.ones((2, 1)), np.array([10.0]))


def test_risk_stratify_median_split():
    time = np.array([1.0, 2.0, 3.0, 4.0])
    event = np.ones(4, bool)
    low, high = risk_stratify(np.array([1.0, 2.0, 3.0, 4.0]), time, event)
    # low group = {1,2} -> its KM is built from times {1,2}.
    assert np.array_equal(low.times, [1.0, 2.0])
    assert np.array_equal(high.times, [3.0, 4.0])


def test_risk_stratify_ties_to_low():
    time = np.array([1.0, 2.0, 3.0, 4.0])
    event = np.ones(4, bool)
    low, high = risk_stratify(np.array([1.0, 1.0, 1.0, 2.0]), time, event)
    assert len(high.times) == 1  # only the strictly-greater risk


def test_risk_stratify_degenerate():
    time = np.array([1.0, 2.0, 3.0, 4.0])
    event = np.ones(4, bool)
    with pytest.raises(ValueError, match="degenerate"):
        risk_stratify(np.ones(4), time, event)


def test_risk_stratify_anticorrelated_curves_ordered():
    rng = np.random.default_rng(4)
    n = 100
    risks = rng.standard_normal(n)
    time = np.maximum(1.0, 50.0 * np.exp(-risks) * rng.uniform(0.9, 1.1, n))
    event = np.ones(n, bool)
    low, high = risk_stratify(risks, time, event)
    grid = np.linspace(0, time.max(), 40)
    lo_vals = np.atleast_1d(low(grid))
    hi_vals = np.atleast_1d(high(grid))
    assert np.all(hi_vals <= lo_vals + 1e-12)


def test_average_curves_identical_and_constant():
    curve = StepFunction(np.array([1.0, 2.0]), np.array([0.8, 0.4]))
    grid = np.array([0.5, 1.5, 2.5])
    mean, std = average_curves([curve] * 5, grid)
    assert np.array_equal(mean, np.atleast_1d(curve(grid)))
    assert np.all(std == 0.0)

    ones = StepFunction(np.array([1.0]), np.array([1.0]))
    zeros = StepFunction(np.array([1.0]), np.array([0.0]))
    mean, std = average_curves([ones, zeros], np.array([2.0, 3.0]))
    assert np.all(mean == 0.5) and np.all(std == 0.5)


def test_average_curves_initial_value_convention():
    curve = StepFunction(np.array([5.0]), np.array([0.2]))
    mean, _ = average_curves([curve], np.array([1.0]))
    assert mean[0] == 1.0  # before any step: survival starts at 1


def test_average_curves_empty_list():
    with pytest.raises(ValueError, match="empty"):
        average_curves([], np.array([1.0]))

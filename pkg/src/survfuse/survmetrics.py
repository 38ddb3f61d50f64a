"""Censoring-aware evaluation: C-index, Kaplan-Meier, IPCW AUC, Brier/IBS,
risk-stratified curve averaging.

Conventions fixed here (Harrell lineage): a pair (i, j) is comparable iff
T_i < T_j and subject i had an event; tied risk scores count 0.5; both-event
ties in time are not comparable. The censoring distribution G used for IPCW
weights is estimated on the training split's outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stepfn import StepFunction


class NotComputableError(ValueError):
    """Raised when a metric has no comparable pairs / no valid time points."""


@dataclass
class ConcordanceResult:
    c_index: float
    n_concordant: int
    n_discordant: int
    n_tied_risk: int
    n_comparable: int


def _as_outcome_arrays(time, event):
    time = np.asarray(time, dtype=np.float64)
    event = np.asarray(event, dtype=bool)
    if time.shape != event.shape or time.ndim != 1:
        raise ValueError("time and event must be 1-d arrays of equal length")
    if time.size == 0:
        raise ValueError("empty outcomes")
    return time, event


def concordance_index(time, event, risks) -> ConcordanceResult:
    """Harrell's C-index with exact pair counts.

    Comparable pairs are (i, j) with T_i < T_j and event_i; risk ties count
    half. Raises NotComputableError when no pair is comparable.
    """
    time, event = _as_outcome_arrays(time, event)
    risks = np.asarray(risks, dtype=np.float64)
    if risks.shape != time.shape:
        raise ValueError("risks length must match outcomes")

    n_conc = n_disc = n_tied = 0
    for i in np.flatnonzero(event):
        later = time > time[i]
        if not later.any():
            continue
        diff = risks[i] - risks[later]
        n_conc += int((diff > 0).sum())
        n_disc += int((diff < 0).sum())
        n_tied += int((diff == 0).sum())
    n_comparable = n_conc + n_disc + n_tied
    if n_comparable == 0:
        raise NotComputableError("not computable: zero comparable pairs")
    c = (n_conc + 0.5 * n_tied) / n_comparable
    return ConcordanceResult(c, n_conc, n_disc, n_tied, n_comparable)


def kaplan_meier(time, event) -> StepFunction:
    """Product-limit estimate of the survival function, stepping at event times."""
    time, event = _as_outcome_arrays(time, event)
    order = np.argsort(time, kind="stable")
    ts, es = time[order], event[order]
    uniq, starts = np.unique(ts, return_index=True)
    bounds = np.append(starts, len(ts))
    n_at_risk = len(ts)
    surv = 1.0
    times_out, values_out = [], []
    for k in range(len(uniq)):
        group = es[bounds[k] : bounds[k + 1]]
        d = int(group.sum())
        if d > 0:
            surv *= 1.0 - d / n_at_risk
            times_out.append(uniq[k])
            values_out.append(surv)
        n_at_risk -= len(group)
    return StepFunction(np.array(times_out), np.array(values_out), initial=1.0)


def censoring_km(time, event) -> StepFunction:
    """KM estimate of the censoring distribution G (event indicator flipped)."""
    time, event = _as_outcome_arrays(time, event)
    return kaplan_meier(time, ~event)


def cumulative_dynamic_auc(
    train_time,
    train_event,
    test_time,
    test_event,
    risks,
    times,
):
    """IPCW cumulative/dynamic AUC(t) and its survival-weighted mean.

    At time t, cases are subjects with an observed event by t and controls
    are subjects still at risk past t; case weights are 1/G(T_i-) with G the
    censoring KM from the training outcomes. Times with no cases or no
    controls yield NaN and are excluded from the mean. The mean integrates
    AUC against the test-set event KM over the valid times, normalized by
    the KM drop across them; if the KM is flat there, the plain average of
    valid points is used.

    Returns (auc_values, mean_auc); auc_values aligns with `times`.
    """
    test_time, test_event = _as_outcome_arrays(test_time, test_event)
    risks = np.asarray(risks, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    if risks.shape != test_time.shape:
        raise ValueError("risks length must match test outcomes")
    if times.size == 0:
        raise ValueError("empty time grid")
    if np.any(times <= test_time.min()) or np.any(times >= test_time.max()):
        raise ValueError("times must lie strictly inside the observed test follow-up range")

    g_hat = censoring_km(train_time, train_event)
    g_at_event = np.asarray(g_hat.before(test_time))
    auc = np.full(times.shape, np.nan)
    for k, t in enumerate(times):
        is_case = (test_time <= t) & test_event
        is_control = test_time > t
        if not is_case.any() or not is_control.any():
            continue
        g_case = g_at_event[is_case]
        if np.any(g_case <= 0):
            raise ValueError("censoring survival is zero at a needed event time")
        w = 1.0 / g_case
        r_case = risks[is_case][:, None]
        r_ctrl = risks[is_control][None, :]
        correct = (r_case > r_ctrl).sum(axis=1) + 0.5 * (r_case == r_ctrl).sum(axis=1)
        auc[k] = float((w * correct).sum() / (w.sum() * is_control.sum()))

    valid = ~np.isnan(auc)
    if not valid.any():
        raise NotComputableError("not computable: no valid time points")
    t_valid = times[valid]
    a_valid = auc[valid]
    if t_valid.size == 1:
        return auc, float(a_valid[0])
    s_km = kaplan_meier(test_time, test_event)
    s_vals = np.asarray(s_km(t_valid))
    denom = s_vals[0] - s_vals[-1]
    if denom <= 0:
        mean_auc = float(a_valid.mean())
    else:
        weights = s_vals[:-1] - s_vals[1:]
        mean_auc = float((a_valid[1:] * weights).sum() / denom)
    return auc, mean_auc


def brier_curve(train_time, train_event, test_time, test_event, surv_matrix, times):
    """IPCW Brier score curve BS(t) and trapezoidal IBS over the grid.

    surv_matrix[i, k] is the predicted S(times[k] | x_i) for test subject i.
    """
    test_time, test_event = _as_outcome_arrays(test_time, test_event)
    times = np.asarray(times, dtype=np.float64)
    surv_matrix = np.asarray(surv_matrix, dtype=np.float64)
    n = test_time.size
    if surv_matrix.shape != (n, times.size):
        raise ValueError("surv_matrix must be n_test x n_times")
    if np.any(times < test_time.min()) or np.any(times > test_time.max()):
        raise ValueError("times outside the observed test follow-up range")

    g_hat = censoring_km(train_time, train_event)
    g_at_event = np.asarray(g_hat.before(test_time))
    bs = np.empty(times.size)
    for k, t in enumerate(times):
        had_event = (test_time <= t) & test_event
        still_at_risk = test_time > t
        g_t = float(g_hat(t))
        terms = np.zeros(n)
        if had_event.any():
            g_e = g_at_event[had_event]
            if np.any(g_e <= 0):
                raise ValueError("censoring survival is zero at a needed event time")
            terms[had_event] = surv_matrix[had_event, k] ** 2 / g_e
        if still_at_risk.any():
            if g_t <= 0:
                raise ValueError("censoring survival is zero at an evaluation time")
            terms[still_at_risk] = (1.0 - surv_matrix[still_at_risk, k]) ** 2 / g_t
        bs[k] = terms.sum() / n

    if times.size == 1:
        ibs = float(bs[0])
    else:
        ibs = float(np.trapezoid(bs, times) / (times[-1] - times[0]))
    return bs, ibs


def risk_stratify(risks, time, event):
    """Split about the median risk (ties to the low group) and return both KM curves."""
    time, event = _as_outcome_arrays(time, event)
    risks = np.asarray(risks, dtype=np.float64)
    if risks.size < 4:
        raise ValueError("need at least 4 subjects to stratify")
    median = np.median(risks)
    high = risks > median
    if not high.any() or high.all():
        raise ValueError("degenerate stratification: one group is empty")
    low = ~high
    return (
        kaplan_meier(time[low], event[low]),
        kaplan_meier(time[high], event[high]),
    )


def average_curves(curves, grid):
    """Pointwise mean and population std of step curves sampled on a shared grid.

    Right-continuous evaluation with last value carried forward; grid points
    before a curve's first step take the curve's initial value.
    """
    if len(curves) == 0:
        raise ValueError("empty curve list")
    grid = np.asarray(grid, dtype=np.float64)
    sampled = np.vstack([np.atleast_1d(c(grid)) for c in curves])
    return sampled.mean(axis=0), sampled.std(axis=0)

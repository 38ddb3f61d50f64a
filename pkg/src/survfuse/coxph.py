"""Ridge-penalized Cox proportional hazards model.

Breslow tie handling throughout. The penalized objective is

    l(beta) = sum_events [x_i beta - log sum_{j in R(t_i)} exp(x_j beta)]
              - (alpha / 2) * ||beta||^2

with risk set R(t) = {j : T_j >= t} and no scaling of the penalty by n.
Fitting is Newton-Raphson from beta = 0 with step halving.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stepfn import StepFunction


@dataclass
class FitConfig:
    max_iter: int = 100
    tol: float = 1e-9
    step_halving_max: int = 30

    def __post_init__(self):
        if self.max_iter <= 0 or self.tol <= 0 or self.step_halving_max <= 0:
            raise ValueError("FitConfig fields must be positive")


@dataclass
class CoxModel:
    beta: np.ndarray
    alpha: float
    baseline_cumhaz: StepFunction | None = None
    n_iter: int = 0
    converged: bool = False


def _validate(X, time, event):
    X = np.asarray(X, dtype=np.float64)
    time = np.asarray(time, dtype=np.float64)
    event = np.asarray(event, dtype=bool)
    if X.ndim != 2:
        raise ValueError("X must be 2-d")
    n = X.shape[0]
    if time.shape != (n,) or event.shape != (n,):
        raise ValueError("X, time, event lengths must match")
    if not np.all(np.isfinite(X)) or not np.all(np.isfinite(time)):
        raise ValueError("non-finite inputs")
    if not event.any():
        raise ValueError("no events")
    return X, time, event


def partial_loglik(X, time, event, beta, alpha):
    """Penalized Breslow partial log-likelihood with analytic gradient and Hessian.

    The returned Hessian includes the -alpha*I penalty term.
    """
    X, time, event = _validate(X, time, event)
    beta = np.asarray(beta, dtype=np.float64)
    n, d = X.shape
    if beta.shape != (d,):
        raise ValueError("beta length must equal feature count")

    eta = X @ beta
    shift = eta.max()
    w = np.exp(eta - shift)

    order = np.argsort(time, kind="stable")
    ts = time[order]
    uniq_times, starts = np.unique(ts, return_index=True)
    bounds = np.append(starts, len(ts))

    loglik = 0.0
    grad = np.zeros(d)
    hess = np.zeros((d, d))
    s0 = 0.0
    s1 = np.zeros(d)
    s2 = np.zeros((d, d))
    for k in range(len(uniq_times) - 1, -1, -1):
        idx = order[bounds[k] : bounds[k + 1]]
        wk = w[idx]
        Xk = X[idx]
        s0 += wk.sum()
        s1 += wk @ Xk
        s2 += (Xk * wk[:, None]).T @ Xk
        ev_idx = idx[event[idx]]
        dk = len(ev_idx)
        if dk == 0:
            continue
        mean = s1 / s0
        loglik += eta[ev_idx].sum() - dk * (np.log(s0) + shift)
        grad += X[ev_idx].sum(axis=0) - dk * mean
        hess -= dk * (s2 / s0 - np.outer(mean, mean))

    loglik -= 0.5 * alpha * float(beta @ beta)
    grad -= alpha * beta
    hess -= alpha * np.eye(d)
    return loglik, grad, hess


def cox_fit(X, time, event, alpha=0.1, config: FitConfig | None = None) -> CoxModel:
    """Newton-Raphson fit of the penalized partial likelihood from beta = 0.

    Step halving keeps accepted steps monotone in the objective; convergence
    is declared when the max coefficient change falls below config.tol.
    The fitted model carries the Breslow baseline cumulative hazard.
    """
    X, time, event = _validate(X, time, event)
    if config is None:
        config = FitConfig()
    d = X.shape[1]
    beta = np.zeros(d)
    loglik, grad, hess = partial_loglik(X, time, event, beta, alpha)
    converged = False
    n_iter = 0
    for n_iter in range(1, config.max_iter + 1):
        try:
            delta = np.linalg.solve(-hess, grad)
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError("singular system") from exc
        step = 1.0
        accepted = False
        for _ in range(config.step_halving_max):
            candidate = beta + step * delta
            new_ll, new_grad, new_hess = partial_loglik(X, time, event, candidate, alpha)
            if new_ll >= loglik:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break  # cannot improve further at this scale
        change = np.max(np.abs(candidate - beta))
        beta, loglik, grad, hess = candidate, new_ll, new_grad, new_hess
        if change < config.tol:
            converged = True
            break
    model = CoxModel(beta=beta, alpha=float(alpha), n_iter=n_iter, converged=converged)
    model.baseline_cumhaz = breslow_baseline(X, time, event, beta)
    return model


def cox_risk(model: CoxModel, X) -> np.ndarray:
    """Linear-predictor risk scores x . beta (higher = higher hazard)."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != model.beta.shape[0]:
        raise ValueError("dimension mismatch")
    return X @ model.beta


def breslow_baseline(X, time, event, beta) -> StepFunction:
    """Breslow cumulative baseline hazard H0(t) = sum_{t_i <= t} d_i / S0(t_i)."""
    X, time, event = _validate(X, time, event)
    beta = np.asarray(beta, dtype=np.float64)
    eta = X @ beta
    w = np.exp(eta)

    order = np.argsort(time, kind="stable")
    ts = time[order]
    uniq_times, starts = np.unique(ts, return_index=True)
    bounds = np.append(starts, len(ts))

    s0 = 0.0
    increments = []  # (time, d/S0) in descending time
    for k in range(len(uniq_times) - 1, -1, -1):
        idx = order[bounds[k] : bounds[k + 1]]
        s0 += w[idx].sum()
        dk = int(event[idx].sum())
        if dk > 0:
            increments.append((uniq_times[k], dk / s0))
    increments.reverse()
    jump_times = np.array([t for t, _ in increments])
    cumhaz = np.cumsum([h for _, h in increments])
    return StepFunction(times=jump_times, values=cumhaz, initial=0.0)


def cox_survival(model: CoxModel, x, times) -> np.ndarray:
    """Predicted survival S(t|x) = exp(-H0(t) * exp(x . beta))."""
    if model.baseline_cumhaz is None:
        raise ValueError("model has no baseline cumulative hazard")
    x = np.asarray(x, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    if np.any(times < 0):
        raise ValueError("times must be nonnegative")
    rel_hazard = np.exp(float(x @ model.beta))
    h0 = np.atleast_1d(model.baseline_cumhaz(times))
    return np.exp(-h0 * rel_hazard)


def model_to_dict(model: CoxModel) -> dict:
    """JSON-ready dump of a fitted model."""
    return {
        "beta": model.beta.tolist(),
        "alpha": model.alpha,
        "baseline_times": model.baseline_cumhaz.times.tolist() if model.baseline_cumhaz else [],
        "baseline_values": model.baseline_cumhaz.values.tolist() if model.baseline_cumhaz else [],
        "n_iter": model.n_iter,
        "converged": model.converged,
    }

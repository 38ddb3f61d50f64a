"""Acceptance suite: one test per primary acceptance criterion.

Each test prints exactly one ``[PASS]``/``[FAIL]`` line for its criterion
(visible with ``pytest -s`` or in captured output on failure).
"""

import functools
import json
import time as time_mod
from pathlib import Path

import numpy as np

from survfuse import survmetrics
from survfuse.coxph import breslow_baseline, cox_fit, partial_loglik
from survfuse.pipeline import (
    ExperimentConfig,
    evaluate_per_cancer,
    run_experiment,
    train_fusion,
    train_unimodal,
)
from survfuse.splits import stratified_kfold
from survfuse.summarizer import DecodingParams, build_request_body
from survfuse.synthetic import make_cohort, random_censored_sample

DATA = Path(__file__).parent / "data"


def criterion(name):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[FAIL] {name}")
                raise
            print(f"[PASS] {name}")

        return wrapper

    return decorate


# ---------------------------------------------------------------- oracles


def brute_force_concordance(time, event, risks):
    num = den = 0.0
    n = len(time)
    for i in range(n):
        for j in range(n):
            if event[i] and time[i] < time[j]:
                den += 1
                if risks[i] > risks[j]:
                    num += 1
                elif risks[i] == risks[j]:
                    num += 0.5
    return num / den if den else None


def brute_force_auc(time, event, risks, t):
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


def golden_section_max(f, lo=-10.0, hi=10.0, tol=1e-10):
    phi = (np.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    return (a + b) / 2


def fold_indices(dataset, plan, fold):
    pid_to_row = {pid: i for i, pid in enumerate(dataset.patient_ids)}
    train_ids, test_ids = plan.train_test_ids(fold)
    return (
        np.array([pid_to_row[p] for p in train_ids]),
        np.array([pid_to_row[p] for p in test_ids]),
    )


# ---------------------------------------------------------------- criteria


@criterion("c-index oracle (100 random datasets, exact, < 5 s)")
def test_c_index_oracle():
    rng = np.random.default_rng(20260823)
    start = time_mod.perf_counter()
    for _ in range(100):
        time, event, risks = random_censored_sample(rng, n_max=30)
        expected = brute_force_concordance(time, event, risks)
        if expected is None:
            try:
                survmetrics.concordance_index(time, event, risks)
                raise AssertionError("expected NotComputableError")
            except survmetrics.NotComputableError:
                continue
        got = survmetrics.concordance_index(time, event, risks).c_index
        assert got == expected
    assert time_mod.perf_counter() - start < 5.0


@criterion("cox gradient/hessian finite-difference check (50 instances, < 30 s)")
def test_cox_gradient_check():
    rng = np.random.default_rng(7)
    start = time_mod.perf_counter()
    eps = 1e-5
    for _ in range(50):
        n = int(rng.integers(5, 51))
        d = int(rng.integers(1, 6))
        X = rng.standard_normal((n, d))
        time = rng.integers(1, n + 2, size=n).astype(float)
        event = rng.random(n) < 0.7
        if not event.any():
            event[0] = True
        beta = rng.standard_normal(d) * 0.5
        alpha = 0.1
        _, grad, hess = partial_loglik(X, time, event, beta, alpha)
        for j in range(d):
            e = np.zeros(d)
            e[j] = eps
            lp, gp, _ = partial_loglik(X, time, event, beta + e, alpha)
            lm, gm, _ = partial_loglik(X, time, event, beta - e, alpha)
            fd_grad = (lp - lm) / (2 * eps)
            assert abs(fd_grad - grad[j]) <= 1e-6 * max(1.0, abs(grad[j]))
            fd_hess = (gp - gm) / (2 * eps)
            assert np.all(
                np.abs(fd_hess - hess[:, j]) <= 1e-4 * np.maximum(1.0, np.abs(hess[:, j]))
            )
    assert time_mod.perf_counter() - start < 30.0


@criterion("cox 1-D golden-section oracle (20 instances, 1e-6)")
def test_cox_1d_oracle():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(6, 13))
        X = rng.standard_normal((n, 1))
        time = rng.permutation(np.arange(1.0, n + 1.0))
        event = rng.random(n) < 0.7
        if not event.any():
            event[0] = True
        model = cox_fit(X, time, event, alpha=0.1)
        oracle = golden_section_max(
            lambda b: partial_loglik(X, time, event, np.array([b]), 0.1)[0]
        )
        assert abs(model.beta[0] - oracle) < 1e-6


@criterion("KM/Breslow hand-computed fixtures (1e-12)")
def test_km_breslow_fixtures():
    # Breslow with beta = 0, events at t = 1 and t = 2:
    # H0(1) = 1/2 (risk set of size 2), H0(2) = 1/2 + 1 = 3/2.
    h0 = breslow_baseline(
        np.zeros((2, 1)), np.array([1.0, 2.0]), np.array([True, True]), np.zeros(1)
    )
    assert abs(h0(1.0) - 0.5) < 1e-12
    assert abs(h0(2.0) - 1.5) < 1e-12

    # KM on times [1,2,3], events [1,0,1]: S = 2/3 on [1,3), 0 at t >= 3.
    km = survmetrics.kaplan_meier(np.array([1.0, 2.0, 3.0]), np.array([True, False, True]))
    assert abs(km(0.5) - 1.0) < 1e-12
    assert abs(km(1.0) - 2.0 / 3.0) < 1e-12
    assert abs(km(2.5) - 2.0 / 3.0) < 1e-12
    assert abs(km(3.0) - 0.0) < 1e-12

    # KM with two events at distinct times: 1/2 then 0.
    km2 = survmetrics.kaplan_meier(np.array([1.0, 2.0]), np.array([True, True]))
    assert abs(km2(1.0) - 0.5) < 1e-12
    assert abs(km2(2.0) - 0.0) < 1e-12


@criterion("IPCW reductions (no censoring: brute-force AUC; oracle IBS < 1e-12)")
def test_ipcw_reductions():
    rng = np.random.default_rng(13)
    for _ in range(20):
        n = int(rng.integers(8, 30))
        time = rng.permutation(np.arange(1.0, n + 1.0))
        event = np.ones(n, dtype=bool)
        risks = np.round(rng.standard_normal(n), 1)
        grid = np.array([t for t in (n * 0.25, n * 0.5, n * 0.75) if t < time.max()])
        aucs, _ = survmetrics.cumulative_dynamic_auc(time, event, time, event, risks, grid)
        for t, auc in zip(grid, aucs):
            expected = brute_force_auc(time, event, risks, t)
            if expected is None:
                assert np.isnan(auc)
            else:
                assert abs(auc - expected) < 1e-12

        # Oracle survival predictions S(t|i) = 1[T_i > t] have zero Brier score.
        surv = (time[:, None] > grid[None, :]).astype(float)
        bs, ibs = survmetrics.brier_curve(time, event, time, event, surv, grid)
        assert np.all(np.abs(bs) < 1e-12)
        assert abs(ibs) < 1e-12


@criterion("leakage: perturbing test rows changes no fitted parameter (exact)")
def test_leakage():
    def fit(perturb):
        dataset = make_cohort(n=150, seed=17)
        plan = stratified_kfold(dataset, k=3, seed=0)
        time, event = dataset.outcome_arrays()
        train_idx, test_idx = fold_indices(dataset, plan, 0)
        if perturb:
            for mod in dataset.modalities.values():
                mod.values[test_idx] += 1000.0
        bundles = {
            name: train_unimodal(mod, train_idx, test_idx, time, event, 4)
            for name, mod in dataset.modalities.items()
        }
        names = sorted(bundles)
        fusion, _, _ = train_fusion(
            np.column_stack([bundles[n].train_risks for n in names]),
            np.column_stack([bundles[n].test_risks for n in names]),
            time[train_idx],
            event[train_idx],
        )
        g_hat = survmetrics.censoring_km(time[train_idx], event[train_idx])
        return bundles, fusion, g_hat

    clean_b, clean_f, clean_g = fit(False)
    dirty_b, dirty_f, dirty_g = fit(True)
    for name in clean_b:
        c, d = clean_b[name], dirty_b[name]
        assert np.array_equal(c.standardizer.means, d.standardizer.means)
        assert np.array_equal(c.standardizer.stds, d.standardizer.stds)
        assert np.array_equal(c.pca.components, d.pca.components)
        assert np.array_equal(c.cox.beta, d.cox.beta)
    assert np.array_equal(clean_f.cox.beta, dirty_f.cox.beta)
    assert np.array_equal(clean_f.risk_means, dirty_f.risk_means)
    assert np.array_equal(clean_f.risk_stds, dirty_f.risk_stds)
    assert np.array_equal(clean_g.times, dirty_g.times)
    assert np.array_equal(clean_g.values, dirty_g.values)


@criterion("fusion additivity (20 seeds, fused >= max unimodal - 0.005, < 2 min)")
def test_fusion_additivity():
    start = time_mod.perf_counter()
    fused_means, best_uni_means = [], []
    for seed in range(20):
        dataset = make_cohort(n=600, seed=1000 + seed)
        plan = stratified_kfold(dataset, k=5, seed=0)
        time, event = dataset.outcome_arrays()
        names = sorted(dataset.modalities)
        fold_fused, fold_uni = [], {name: [] for name in names}
        for fold in range(5):
            train_idx, test_idx = fold_indices(dataset, plan, fold)
            bundles = {
                name: train_unimodal(
                    dataset.modalities[name], train_idx, test_idx, time, event, 4
                )
                for name in names
            }
            _, fused, _ = train_fusion(
                np.column_stack([bundles[n].train_risks for n in names]),
                np.column_stack([bundles[n].test_risks for n in names]),
                time[train_idx],
                event[train_idx],
            )
            te_t, te_e = time[test_idx], event[test_idx]
            fold_fused.append(survmetrics.concordance_index(te_t, te_e, fused).c_index)
            for name in names:
                fold_uni[name].append(
                    survmetrics.concordance_index(te_t, te_e, bundles[name].test_risks).c_index
                )
        fused_means.append(np.mean(fold_fused))
        best_uni_means.append(max(np.mean(fold_uni[name]) for name in names))
    assert np.mean(fused_means) >= np.mean(best_uni_means) - 0.005
    assert time_mod.perf_counter() - start < 120.0


@criterion("fusion-of-one equivalence (1e-9 when coefficient positive)")
def test_fusion_of_one():
    rng = np.random.default_rng(23)
    checked = 0
    for seed in range(10):
        dataset = make_cohort(n=200, seed=2000 + seed, modality_specs={"solo": (8, 1.0)})
        plan = stratified_kfold(dataset, k=3, seed=0)
        time, event = dataset.outcome_arrays()
        train_idx, test_idx = fold_indices(dataset, plan, 0)
        bundle = train_unimodal(dataset.modalities["solo"], train_idx, test_idx, time, event, 4)
        fusion, fused, _ = train_fusion(
            bundle.train_risks[:, None],
            bundle.test_risks[:, None],
            time[train_idx],
            event[train_idx],
        )
        if fusion.cox.beta[0] <= 0:
            continue
        checked += 1
        uni = survmetrics.concordance_index(time[test_idx], event[test_idx], bundle.test_risks)
        fus = survmetrics.concordance_index(time[test_idx], event[test_idx], fused)
        assert abs(uni.c_index - fus.c_index) < 1e-9
    assert checked >= 5


@criterion("combinatorics: 31 combos x k folds x |pca_dims| rows")
def test_combinatorics(tmp_path):
    specs = {name: (6, 0.4) for name in ["m1", "m2", "m3", "m4", "m5"]}
    dataset = make_cohort(n=250, seed=29, modality_specs=specs)
    k, pca_dims = 3, [4, None]
    plan = stratified_kfold(dataset, k=k, seed=0)
    table = run_experiment(
        ExperimentConfig(pca_dims=pca_dims, k=k, seed=0), dataset, plan, out_dir=tmp_path
    )
    assert len(table) == 31 * k * len(pca_dims)


@criterion("determinism: identical runs produce byte-identical CSVs")
def test_determinism(tmp_path):
    dataset = make_cohort(n=150, seed=31)
    plan = stratified_kfold(dataset, k=3, seed=5)
    config = ExperimentConfig(pca_dims=[4], k=3, seed=5)
    run_experiment(config, dataset, plan, out_dir=tmp_path / "a")
    run_experiment(config, dataset, plan, out_dir=tmp_path / "b")
    names = ["metrics.csv", "per_cancer.csv", "hazard_ratios.csv", "km_curves.csv"]
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@criterion("prompt fidelity: golden request fixture byte-for-byte, temp 0 / 1024 tokens")
def test_prompt_fidelity():
    golden = (DATA / "golden_request.json").read_text(encoding="utf-8")
    body = build_request_body(
        "Final diagnosis: invasive ductal carcinoma, grade 2. "
        "Microscopic description: tumor cells arranged in nests. pT2N0.",
        model="example-model",
        params=DecodingParams(seed=1234),
    )
    assert json.dumps(body, indent=2) + "\n" == golden
    assert body["temperature"] == 0
    assert body["max_tokens"] == 1024


@criterion("per-cancer guards: degenerate subsets flagged not computable")
def test_per_cancer_guards():
    # ACC: zero events. BLCA: single event occurring after the other
    # subject was censored (no comparable pair). BRCA: computable.
    time = np.array([10.0, 20.0, 5.0, 50.0, 7.0, 9.0])
    event = np.array([False, False, False, True, True, False])
    risks = np.array([1.0, 2.0, 1.0, 2.0, 3.0, 1.0])
    projects = np.array(["ACC", "ACC", "BLCA", "BLCA", "BRCA", "BRCA"])
    out = evaluate_per_cancer(time, event, risks, projects)
    assert out["ACC"].c_index is None and out["ACC"].n_events == 0
    assert out["BLCA"].c_index is None and out["BLCA"].n_events == 1
    assert out["BRCA"].c_index == 1.0

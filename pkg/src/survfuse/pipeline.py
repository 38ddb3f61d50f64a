"""Experiment orchestration: per-fold unimodal models, late fusion over the
modality power set, PCA sweep, hazard ratios, per-cancer evaluation, and the
CSV output surfaces.

Output files (UTF-8, LF line endings, floats at 17 significant digits so
reruns are byte-identical):
  metrics.csv        fold, modality_combo, pca_dim, c_index, mean_auc, ibs,
                     n_comparable [, train_c_index]
  per_cancer.csv     fold, modality_combo, pca_dim, project, c_index, n, n_events
  hazard_ratios.csv  pca_dim, modality, fold_0..fold_{k-1}, mean
  km_curves.csv      group, time, mean_survival, std_survival
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np
import pandas as pd

from . import coxph, survmetrics, xform
from .cohort import CohortDataset, ModalityMatrix
from .splits import SplitPlan
from .survmetrics import NotComputableError

logger = logging.getLogger(__name__)

DEFAULT_PCA_DIMS = [4, 8, 16, 32, 64, 128, 256]
DEFAULT_EVAL_INTERVAL = (365.0, 1825.0)  # 1 to 5 years, in days
DEFAULT_EVAL_POINTS = 100


@dataclass
class ExperimentConfig:
    modalities: list | None = None  # None = all modalities in the dataset
    pca_dims: list = field(default_factory=lambda: list(DEFAULT_PCA_DIMS))  # ints or None
    alpha: float = 0.1
    k: int = 5
    seed: int = 0
    eval_interval_days: tuple = DEFAULT_EVAL_INTERVAL
    n_eval_points: int = DEFAULT_EVAL_POINTS
    combos: str | list = "all"  # "all" = full power set
    evaluate_on_train: bool = False

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        cfg = cls()
        if "modalities" in data and data["modalities"] != "all":
            cfg.modalities = list(data["modalities"])
        if "pca_dims" in data:
            cfg.pca_dims = [None if d in (None, "none") else int(d) for d in data["pca_dims"]]
        for key in ("alpha", "k", "seed", "n_eval_points", "evaluate_on_train"):
            if key in data:
                setattr(cfg, key, data[key])
        if "eval_interval_days" in data:
            lo, hi = data["eval_interval_days"]
            cfg.eval_interval_days = (float(lo), float(hi))
        if "combos" in data and data["combos"] != "all":
            cfg.combos = [list(c) for c in data["combos"]]
        return cfg


@dataclass
class UnimodalBundle:
    modality_name: str
    standardizer: xform.StandardizerParams | None
    pca: xform.PcaModel | None
    cox: coxph.CoxModel
    train_risks: np.ndarray
    test_risks: np.ndarray


@dataclass
class FusionModel:
    modality_names: list
    risk_means: np.ndarray
    risk_stds: np.ndarray
    cox: coxph.CoxModel


def train_unimodal(
    modality: ModalityMatrix,
    train_idx,
    test_idx,
    time,
    event,
    pca_dim: int | None,
    alpha: float = 0.1,
    fit_config: coxph.FitConfig | None = None,
) -> UnimodalBundle:
    """Fit one modality's CoxPH on the train split and score both splits.

    Embedding modalities are standardized then (optionally) PCA-reduced with
    parameters fit on the train rows only; tabular one-hot modalities are
    used raw and any requested PCA dim is skipped with a warning.
    """
    train_idx = np.asarray(train_idx)
    test_idx = np.asarray(test_idx)
    x_train = modality.values[train_idx]
    x_test = modality.values[test_idx]
    standardizer = None
    pca = None
    if modality.kind == "tabular_onehot":
        if pca_dim is not None:
            logger.warning(
                "modality %s is one-hot tabular; skipping pca_dim=%s", modality.modality_name, pca_dim
            )
    else:
        standardizer = xform.standardize_fit(x_train)
        x_train = xform.standardize_apply(standardizer, x_train)
        x_test = xform.standardize_apply(standardizer, x_test)
        if pca_dim is not None:
            pca = xform.pca_fit(x_train, pca_dim)
            x_train = xform.pca_apply(pca, x_train)
            x_test = xform.pca_apply(pca, x_test)
    try:
        model = coxph.cox_fit(x_train, time[train_idx], event[train_idx], alpha, fit_config)
    except Exception as exc:
        raise RuntimeError(f"modality {modality.modality_name}: {exc}") from exc
    return UnimodalBundle(
        modality_name=modality.modality_name,
        standardizer=standardizer,
        pca=pca,
        cox=model,
        train_risks=coxph.cox_risk(model, x_train),
        test_risks=coxph.cox_risk(model, x_test),
    )


def train_fusion(
    train_risks,
    test_risks,
    train_time,
    train_event,
    alpha: float = 0.1,
    modality_names: list | None = None,
    fit_config: coxph.FitConfig | None = None,
):
    """Late fusion: CoxPH over z-scored unimodal risk columns.

    train_risks/test_risks are n x m matrices of per-modality risk scores.
    Returns (FusionModel, fused_test_risks, fused_train_risks).
    """
    train_risks = np.atleast_2d(np.asarray(train_risks, dtype=np.float64))
    test_risks = np.atleast_2d(np.asarray(test_risks, dtype=np.float64))
    if modality_names is None:
        modality_names = [f"m{i}" for i in range(train_risks.shape[1])]
    std = xform.standardize_fit(train_risks)
    z_train = xform.standardize_apply(std, train_risks)
    z_test = xform.standardize_apply(std, test_risks)
    model = coxph.cox_fit(z_train, train_time, train_event, alpha, fit_config)
    fusion = FusionModel(
        modality_names=list(modality_names),
        risk_means=std.means,
        risk_stds=std.stds,
        cox=model,
    )
    return fusion, coxph.cox_risk(model, z_test), coxph.cox_risk(model, z_train)


def extract_hazard_ratios(fusion: FusionModel) -> dict:
    """Hazard ratio exp(beta) per fused modality (per one-SD risk increase)."""
    return {
        name: float(np.exp(b)) for name, b in zip(fusion.modality_names, fusion.cox.beta)
    }


@dataclass
class PerCancerResult:
    c_index: float | None  # None = not computable
    n: int
    n_events: int


def evaluate_per_cancer(test_time, test_event, test_risks, projects) -> dict:
    """Per-cancer-type C-index with guards for subsets lacking comparable pairs."""
    test_time = np.asarray(test_time, dtype=np.float64)
    test_event = np.asarray(test_event, dtype=bool)
    test_risks = np.asarray(test_risks, dtype=np.float64)
    projects = np.asarray(projects)
    if len(projects) != len(test_time):
        raise ValueError("projects must align with outcomes")
    out = {}
    for project in sorted(set(projects.tolist())):
        mask = projects == project
        try:
            res = survmetrics.concordance_index(test_time[mask], test_event[mask], test_risks[mask])
            c = res.c_index
        except NotComputableError:
            c = None
        out[project] = PerCancerResult(c, int(mask.sum()), int(test_event[mask].sum()))
    return out


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _enumerate_combos(names, combos):
    if combos == "all":
        out = []
        for r in range(1, len(names) + 1):
            out.extend(combinations(names, r))
        return out
    name_set = set(names)
    out = []
    for combo in combos:
        if not set(combo) <= name_set:
            raise ValueError(f"combo references unknown modalities: {combo}")
        out.append(tuple(n for n in names if n in combo))
    return out


def _survival_matrix(fusion: FusionModel, fused_risks, times):
    h0 = np.atleast_1d(fusion.cox.baseline_cumhaz(times))
    return np.exp(-np.outer(np.exp(fused_risks), h0))


def run_experiment(
    config: ExperimentConfig,
    dataset: CohortDataset,
    plan: SplitPlan,
    out_dir=None,
):
    """Run the full cross-validated fusion experiment.

    Returns the metrics table as a DataFrame; when out_dir is given also
    writes metrics.csv, per_cancer.csv, hazard_ratios.csv, and km_curves.csv.
    """
    names = config.modalities if config.modalities is not None else sorted(dataset.modalities)
    for name in names:
        if name not in dataset.modalities:
            raise ValueError(f"unknown modality: {name}")
    combos = _enumerate_combos(names, config.combos)
    full_combo = tuple(names)
    time, event = dataset.outcome_arrays()
    projects = np.asarray(dataset.projects())
    pid_to_row = {pid: i for i, pid in enumerate(dataset.patient_ids)}
    lo, hi = config.eval_interval_days
    grid = np.linspace(lo, hi, config.n_eval_points)
    pca_dims = list(config.pca_dims)
    max_dim = max((d for d in pca_dims if d is not None), default=None)
    km_dim = max_dim if max_dim is not None else None

    metric_rows = []
    per_cancer_rows = []
    hr_values = {}  # (pca_dim, modality) -> list over folds
    km_low_curves, km_high_curves = [], []
    km_max_times = []

    for fold in range(plan.k):
        train_ids, test_ids = plan.train_test_ids(fold)
        train_idx = np.array([pid_to_row[p] for p in train_ids])
        test_idx = np.array([pid_to_row[p] for p in test_ids])
        train_time, train_event = time[train_idx], event[train_idx]
        test_time, test_event = time[test_idx], event[test_idx]
        fold_grid = grid[(grid > test_time.min()) & (grid < test_time.max())]

        # Tabular modalities ignore the PCA sweep; fit them once per fold.
        tabular_cache = {}
        for name in names:
            if dataset.modalities[name].kind == "tabular_onehot":
                tabular_cache[name] = train_unimodal(
                    dataset.modalities[name], train_idx, test_idx, time, event,
                    pca_dim=None, alpha=config.alpha,
                )

        for pca_dim in pca_dims:
            try:
                bundles = {}
                for name in names:
                    if name in tabular_cache:
                        bundles[name] = tabular_cache[name]
                    else:
                        bundles[name] = train_unimodal(
                            dataset.modalities[name], train_idx, test_idx, time, event,
                            pca_dim=pca_dim, alpha=config.alpha,
                        )

                for combo in combos:
                    tr = np.column_stack([bundles[n].train_risks for n in combo])
                    te = np.column_stack([bundles[n].test_risks for n in combo])
                    fusion, fused_test, fused_train = train_fusion(
                        tr, te, train_time, train_event, config.alpha, list(combo)
                    )
                    row = _evaluate_combo(
                        fold, combo, pca_dim, fusion, fused_test, fused_train,
                        train_time, train_event, test_time, test_event,
                        fold_grid, config.evaluate_on_train,
                    )
                    metric_rows.append(row)

                    if len(combo) == 1 or combo == full_combo:
                        per_cancer = evaluate_per_cancer(
                            test_time, test_event, fused_test, projects[test_idx]
                        )
                        for project, res in sorted(per_cancer.items()):
                            per_cancer_rows.append(
                                (fold, "+".join(combo), _dim_label(pca_dim),
                                 project, res.c_index, res.n, res.n_events)
                            )
                    if combo == full_combo:
                        for name, hr in extract_hazard_ratios(fusion).items():
                            hr_values.setdefault((_dim_label(pca_dim), name), {})[fold] = hr
                        if pca_dim == km_dim:
                            try:
                                low, high = survmetrics.risk_stratify(
                                    fused_test, test_time, test_event
                                )
                                km_low_curves.append(low)
                                km_high_curves.append(high)
                                km_max_times.append(test_time.max())
                            except ValueError:
                                logger.warning("fold %d: degenerate risk stratification", fold)
            except Exception as exc:
                raise RuntimeError(f"fold {fold}, pca_dim {pca_dim}: {exc}") from exc

    header = ["fold", "modality_combo", "pca_dim", "c_index", "mean_auc", "ibs", "n_comparable"]
    if config.evaluate_on_train:
        header.append("train_c_index")
    table = pd.DataFrame(metric_rows, columns=header)

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_csv(out_dir / "metrics.csv", header, metric_rows)
        _write_csv(
            out_dir / "per_cancer.csv",
            ["fold", "modality_combo", "pca_dim", "project", "c_index", "n", "n_events"],
            per_cancer_rows,
        )
        hr_rows = []
        for (dim_label, name) in sorted(hr_values, key=lambda key: (str(key[0]), key[1])):
            folds = hr_values[(dim_label, name)]
            vals = [folds.get(f) for f in range(plan.k)]
            mean = float(np.mean([v for v in vals if v is not None]))
            hr_rows.append([dim_label, name, *vals, mean])
        _write_csv(
            out_dir / "hazard_ratios.csv",
            ["pca_dim", "modality", *[f"fold_{f}" for f in range(plan.k)], "mean"],
            hr_rows,
        )
        km_rows = []
        if km_low_curves:
            km_grid = np.linspace(0.0, float(min(km_max_times)), 101)
            for group, curves in (("low", km_low_curves), ("high", km_high_curves)):
                mean, std = survmetrics.average_curves(curves, km_grid)
                for t, m, s in zip(km_grid, mean, std):
                    km_rows.append([group, t, m, s])
        _write_csv(
            out_dir / "km_curves.csv",
            ["group", "time", "mean_survival", "std_survival"],
            km_rows,
        )
    return table


def _dim_label(pca_dim):
    return "none" if pca_dim is None else pca_dim


def _evaluate_combo(
    fold, combo, pca_dim, fusion, fused_test, fused_train,
    train_time, train_event, test_time, test_event, fold_grid, evaluate_on_train,
):
    if fold_grid.size == 0:
        fold_grid = None
    try:
        conc = survmetrics.concordance_index(test_time, test_event, fused_test)
        c_index, n_comparable = conc.c_index, conc.n_comparable
    except NotComputableError:
        c_index, n_comparable = float("nan"), 0
    mean_auc = float("nan")
    ibs = float("nan")
    if fold_grid is not None:
        try:
            _, mean_auc = survmetrics.cumulative_dynamic_auc(
                train_time, train_event, test_time, test_event, fused_test, fold_grid
            )
        except (ValueError, NotComputableError):
            pass
        try:
            surv = _survival_matrix(fusion, fused_test, fold_grid)
            _, ibs = survmetrics.brier_curve(
                train_time, train_event, test_time, test_event, surv, fold_grid
            )
        except ValueError:
            pass
    row = [fold, "+".join(combo), _dim_label(pca_dim), c_index, mean_auc, ibs, n_comparable]
    if evaluate_on_train:
        try:
            train_conc = survmetrics.concordance_index(train_time, train_event, fused_train)
            row.append(train_conc.c_index)
        except NotComputableError:
            row.append(float("nan"))
    return row


def write_report(run_dir, out_path=None):
    """Aggregate metrics.csv into cross-fold means per (combo, pca_dim)."""
    run_dir = Path(run_dir)
    df = pd.read_csv(run_dir / "metrics.csv")
    agg = (
        df.groupby(["modality_combo", "pca_dim"], sort=True)[["c_index", "mean_auc", "ibs"]]
        .mean()
        .reset_index()
    )
    if out_path is None:
        out_path = run_dir / "summary.csv"
    rows = [
        (r.modality_combo, r.pca_dim, r.c_index, r.mean_auc, r.ibs)
        for r in agg.itertuples(index=False)
    ]
    _write_csv(out_path, ["modality_combo", "pca_dim", "c_index", "mean_auc", "ibs"], rows)
    return agg

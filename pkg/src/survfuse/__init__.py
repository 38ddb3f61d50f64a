"""Multimodal cancer survival modeling over precomputed embeddings:
standardization + PCA, ridge CoxPH, late fusion, and censoring-aware metrics."""

from .cohort import (
    CohortDataset,
    ModalityMatrix,
    PatientRecord,
    SurvivalOutcome,
    aggregate_samples,
    compute_survival_outcome,
    encode_tabular,
    load_cohort,
)
from .coxph import CoxModel, FitConfig, breslow_baseline, cox_fit, cox_risk, cox_survival, partial_loglik
from .pipeline import ExperimentConfig, FusionModel, extract_hazard_ratios, run_experiment, train_fusion, train_unimodal
from .splits import SplitPlan, StratumKey, build_stratum_key, stratified_kfold
from .stepfn import StepFunction
from .survmetrics import (
    NotComputableError,
    average_curves,
    brier_curve,
    censoring_km,
    concordance_index,
    cumulative_dynamic_auc,
    kaplan_meier,
    risk_stratify,
)
from .synthetic import make_cohort, write_cohort_files
from .xform import PcaModel, StandardizerParams, pca_apply, pca_fit, standardize_apply, standardize_fit

__version__ = "0.1.0"

"""Synthetic cohorts with known hazard structure, for tests and demos.

Each embedding modality carries an independent standard-normal latent signal
spread across its features (the first feature is the signal itself); the true
log-hazard is a weighted sum of the modality signals. Event times are
exponential given the hazard and censoring times are independent exponential,
so informative modalities are genuinely additive.
"""

from __future__ import annotations

import numpy as np

from .cohort import (
    CohortDataset,
    ModalityMatrix,
    PatientRecord,
    SurvivalOutcome,
    AGE_BINS,
    ETHNICITY_CATEGORIES,
    PROJECT_CATEGORIES,
    RACE_CATEGORIES,
    SEX_CATEGORIES,
    encode_tabular,
    DEMOGRAPHICS_MODALITY,
    CANCER_TYPE_MODALITY,
)


def make_outcomes(n, log_hazard, rng, baseline_scale=1500.0, censor_scale=2500.0):
    """Exponential event times under the given log-hazard, with independent
    exponential censoring; durations are whole days >= 1."""
    log_hazard = np.asarray(log_hazard, dtype=np.float64)
    event_times = rng.exponential(baseline_scale, size=n) * np.exp(-log_hazard)
    censor_times = rng.exponential(censor_scale, size=n)
    time = np.maximum(np.ceil(np.minimum(event_times, censor_times)), 1.0)
    event = event_times <= censor_times
    return time, event


def make_modality_features(n, n_features, signal, rng, noise=0.5):
    """Feature matrix spreading the latent signal across all columns.

    The first column is the signal itself; the rest are random positive
    loadings of it plus Gaussian noise, so the leading principal component
    of the (standardized) matrix recovers the signal, as with real
    embedding modalities.
    """
    loadings = rng.uniform(0.3, 0.9, size=n_features)
    loadings[0] = 1.0
    x = signal[:, None] * loadings + noise * rng.standard_normal((n, n_features))
    x[:, 0] = signal
    return x


def make_cohort(
    n=600,
    seed=0,
    modality_specs=None,
    n_projects=4,
    include_tabular=False,
    feature_noise=0.5,
) -> CohortDataset:
    """Synthetic CohortDataset with known additive hazard structure.

    modality_specs: {name: (n_features, hazard_coefficient)}; defaults to
    three informative 8-feature modalities.
    """
    if modality_specs is None:
        modality_specs = {"alpha": (8, 0.7), "bravo": (8, 0.7), "charlie": (8, 0.7)}
    rng = np.random.default_rng(seed)
    patient_ids = [f"P{idx:05d}" for idx in range(n)]

    signals = {}
    log_hazard = np.zeros(n)
    for name in sorted(modality_specs):
        _, coef = modality_specs[name]
        g = rng.standard_normal(n)
        signals[name] = g
        log_hazard += coef * g
    time, event = make_outcomes(n, log_hazard, rng)

    projects = rng.choice(PROJECT_CATEGORIES[:n_projects], size=n)
    patients = []
    for i, pid in enumerate(patient_ids):
        age_days = int(rng.integers(20, 90) * 365.25)
        patients.append(
            PatientRecord(
                patient_id=pid,
                project=str(projects[i]),
                sex=str(rng.choice(SEX_CATEGORIES)),
                race=str(rng.choice(RACE_CATEGORIES[:3])),
                ethnicity=str(rng.choice(ETHNICITY_CATEGORIES[:2])),
                age_at_diagnosis_days=age_days,
                outcome=SurvivalOutcome(int(time[i]), bool(event[i])),
            )
        )

    modalities = {}
    for name in sorted(modality_specs):
        n_features, _ = modality_specs[name]
        values = make_modality_features(n, n_features, signals[name], rng, noise=feature_noise)
        modalities[name] = ModalityMatrix(name, "embedding", list(patient_ids), values)

    if include_tabular:
        demo_rows, cancer_rows = zip(*(encode_tabular(p) for p in patients))
        modalities[DEMOGRAPHICS_MODALITY] = ModalityMatrix(
            DEMOGRAPHICS_MODALITY, "tabular_onehot", list(patient_ids), np.vstack(demo_rows)
        )
        modalities[CANCER_TYPE_MODALITY] = ModalityMatrix(
            CANCER_TYPE_MODALITY, "tabular_onehot", list(patient_ids), np.vstack(cancer_rows)
        )
    return CohortDataset(patients=patients, modalities=modalities)


def write_cohort_files(dataset: CohortDataset, out_dir):
    """Write a CohortDataset as clinical.csv + per-modality embedding CSVs
    plus a manifest.json, in the on-disk format accepted by load_cohort.
    Returns the manifest path."""
    import json
    from pathlib import Path

    import pandas as pd

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for p in dataset.patients:
        end_age = p.age_at_diagnosis_days + p.outcome.duration_days
        rows.append(
            {
                "patient_id": p.patient_id,
                "project": p.project,
                "sex": p.sex,
                "race": p.race,
                "ethnicity": p.ethnicity,
                "age_at_diagnosis_days": p.age_at_diagnosis_days,
                "age_at_last_followup_days": "" if p.outcome.event else end_age,
                "age_at_death_days": end_age if p.outcome.event else "",
                "vital_status": "Dead" if p.outcome.event else "Alive",
            }
        )
    pd.DataFrame(rows).to_csv(out_dir / "clinical.csv", index=False, lineterminator="\n")

    manifest = {"clinical": "clinical.csv", "modalities": {}}
    for name in sorted(dataset.modalities):
        mod = dataset.modalities[name]
        if mod.kind != "embedding":
            continue  # tabular modalities are rebuilt from the clinical table
        df = pd.DataFrame(mod.values, columns=[f"e{j}" for j in range(mod.dim)])
        df.insert(0, "sample_id", "s1")
        df.insert(0, "patient_id", mod.patient_ids)
        filename = f"{name}.csv"
        df.to_csv(out_dir / filename, index=False, lineterminator="\n")
        manifest["modalities"][name] = filename
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest_path


def random_censored_sample(rng, n_max=30, allow_ties=True):
    """Small random censored dataset for metric oracles."""
    n = int(rng.integers(4, n_max + 1))
    if allow_ties:
        time = rng.integers(1, max(4, n), size=n).astype(float)
    else:
        time = rng.permutation(np.arange(1, n + 1)).astype(float)
    event = rng.random(n) < 0.6
    if not event.any():
        event[int(rng.integers(0, n))] = True
    risks = np.round(rng.standard_normal(n), 1)  # rounding induces risk ties
    return time, event, risks

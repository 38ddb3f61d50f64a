"""Cohort ingestion: clinical table parsing, survival outcome derivation,
per-patient embedding aggregation, and one-hot tabular encoding.

Input files (all UTF-8 CSV with header rows):
  - clinical.csv: patient_id, project, sex, race, ethnicity,
    age_at_diagnosis_days, age_at_last_followup_days, age_at_death_days,
    vital_status. Empty string means missing.
  - one embedding CSV per modality: patient_id, sample_id, e0 ... e{d-1}.
  - manifest.json: {"clinical": path, "modalities": {name: path, ...}}.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

DAYS_PER_YEAR = 365.25

AGE_BINS = ["[0-20)", "[20-40)", "[40-60)", "[60-80)", "80+"]
SEX_CATEGORIES = ["Female", "Male"]
RACE_CATEGORIES = [
    "White",
    "Black or African American",
    "Asian",
    "American Indian or Alaska Native",
    "Native Hawaiian or Pacific Islander",
    "Unknown",
    "Not Reported",
]
ETHNICITY_CATEGORIES = [
    "Not Hispanic or Latino",
    "Hispanic or Latino",
    "Unknown",
    "Not Reported",
]
PROJECT_CATEGORIES = [
    "ACC", "BLCA", "BRCA", "CESC", "CHOL", "COAD", "DLBC", "ESCA",
    "GBM", "HNSC", "KICH", "KIRC", "KIRP", "LGG", "LIHC", "LUAD",
    "LUSC", "MESO", "OV", "PAAD", "PCPG", "PRAD", "READ", "SARC",
    "SKCM", "STAD", "TGCT", "THCA", "THYM", "UCEC", "UCS", "UVM",
]

DEMO_DIM = len(AGE_BINS) + len(SEX_CATEGORIES) + len(RACE_CATEGORIES) + len(ETHNICITY_CATEGORIES)
CANCER_DIM = len(PROJECT_CATEGORIES)

DEMOGRAPHICS_MODALITY = "demographics"
CANCER_TYPE_MODALITY = "cancer_type"


class RecordRejected(ValueError):
    """A patient record failed validation; .reason carries the cause."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class CohortError(ValueError):
    """Fatal cohort construction failure."""


@dataclass(frozen=True)
class SurvivalOutcome:
    duration_days: int
    event: bool


@dataclass(frozen=True)
class PatientRecord:
    patient_id: str
    project: str
    sex: str
    race: str
    ethnicity: str
    age_at_diagnosis_days: int
    outcome: SurvivalOutcome


@dataclass
class ModalityMatrix:
    modality_name: str
    kind: str  # "embedding" or "tabular_onehot"
    patient_ids: list
    values: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass
class CohortDataset:
    patients: list
    modalities: dict = field(default_factory=dict)

    @property
    def patient_ids(self) -> list:
        return [p.patient_id for p in self.patients]

    def outcome_arrays(self):
        time = np.array([p.outcome.duration_days for p in self.patients], dtype=np.float64)
        event = np.array([p.outcome.event for p in self.patients], dtype=bool)
        return time, event

    def projects(self) -> list:
        return [p.project for p in self.patients]


def compute_survival_outcome(
    age_at_diagnosis_days: int,
    age_at_followup_days: int | None,
    age_at_death_days: int | None,
    vital_status: str,
) -> SurvivalOutcome:
    """Duration from diagnosis to death (event) or last followup (censored).

    Records with neither endpoint, nonpositive duration, or a death age
    while marked Alive are rejected.
    """
    if age_at_followup_days is None and age_at_death_days is None:
        raise RecordRejected("no endpoint")
    if age_at_death_days is not None:
        if vital_status != "Dead":
            raise RecordRejected("inconsistent vital status")
        duration = age_at_death_days - age_at_diagnosis_days
        event = True
    else:
        duration = age_at_followup_days - age_at_diagnosis_days
        event = False
    if duration <= 0:
        raise RecordRejected("nonpositive duration")
    return SurvivalOutcome(duration_days=int(duration), event=event)


def aggregate_samples(sample_vectors) -> np.ndarray:
    """Elementwise mean across a patient's per-sample embedding vectors."""
    if len(sample_vectors) == 0:
        raise ValueError("no samples")
    arrs = [np.asarray(v, dtype=np.float64) for v in sample_vectors]
    length = arrs[0].shape
    if any(a.shape != length for a in arrs):
        raise ValueError("ragged samples")
    stacked = np.vstack(arrs)
    if not np.all(np.isfinite(stacked)):
        raise ValueError("non-finite sample values")
    return stacked.mean(axis=0)


def age_bin(age_at_diagnosis_days: int) -> str:
    """20-year age bin label from an age in days."""
    years = age_at_diagnosis_days / DAYS_PER_YEAR
    if years < 20:
        return AGE_BINS[0]
    if years < 40:
        return AGE_BINS[1]
    if years < 60:
        return AGE_BINS[2]
    if years < 80:
        return AGE_BINS[3]
    return AGE_BINS[4]


def _one_hot(value: str, categories: list, what: str) -> np.ndarray:
    if value not in categories:
        raise ValueError(f"unknown category: {what}={value!r}")
    vec = np.zeros(len(categories))
    vec[categories.index(value)] = 1.0
    return vec


def encode_tabular(record: PatientRecord):
    """One-hot demographic (age bin + sex + race + ethnicity blocks) and
    cancer-type (32-d) vectors; the demographic vector sums to exactly 4."""
    if record.age_at_diagnosis_days < 0:
        raise ValueError("negative age at diagnosis")
    demo = np.concatenate(
        [
            _one_hot(age_bin(record.age_at_diagnosis_days), AGE_BINS, "age_bin"),
            _one_hot(record.sex, SEX_CATEGORIES, "sex"),
            _one_hot(record.race, RACE_CATEGORIES, "race"),
            _one_hot(record.ethnicity, ETHNICITY_CATEGORIES, "ethnicity"),
        ]
    )
    cancer = _one_hot(record.project, PROJECT_CATEGORIES, "project")
    return demo, cancer


def _parse_optional_int(value) -> int | None:
    if value is None or (isinstance(value, float) and np.isnan(value)) or value == "":
        return None
    return int(value)


def _not_reported_if_missing(value) -> str:
    if value is None or (isinstance(value, float) and np.isnan(value)) or value == "":
        return "Not Reported"
    return str(value)


def load_clinical(path):
    """Parse clinical.csv into (records, rejects).

    rejects is a list of (patient_id, reason). Duplicate patient ids are fatal.
    """
    df = pd.read_csv(path, dtype=str, keep_default_na=False)
    required = [
        "patient_id", "project", "sex", "race", "ethnicity",
        "age_at_diagnosis_days", "age_at_last_followup_days",
        "age_at_death_days", "vital_status",
    ]
    missing_cols = [c for c in required if c not in df.columns]
    if missing_cols:
        raise CohortError(f"clinical table missing columns: {missing_cols}")
    if df["patient_id"].duplicated().any():
        dupes = sorted(df.loc[df["patient_id"].duplicated(), "patient_id"])
        raise CohortError(f"duplicate patient_id in clinical table: {dupes}")

    records = {}
    rejects = []
    for row in df.itertuples(index=False):
        pid = row.patient_id
        try:
            outcome = compute_survival_outcome(
                int(row.age_at_diagnosis_days),
                _parse_optional_int(row.age_at_last_followup_days),
                _parse_optional_int(row.age_at_death_days),
                row.vital_status,
            )
            record = PatientRecord(
                patient_id=pid,
                project=row.project,
                sex=row.sex,
                race=_not_reported_if_missing(row.race),
                ethnicity=_not_reported_if_missing(row.ethnicity),
                age_at_diagnosis_days=int(row.age_at_diagnosis_days),
                outcome=outcome,
            )
            encode_tabular(record)  # validates categories
        except RecordRejected as exc:
            rejects.append((pid, exc.reason))
            continue
        except ValueError as exc:
            rejects.append((pid, str(exc)))
            continue
        records[pid] = record
    return records, rejects


def load_embedding_file(path, modality_name: str) -> dict:
    """Read a per-sample embedding CSV and average samples per patient."""
    df = pd.read_csv(path)
    if "patient_id" not in df.columns or "sample_id" not in df.columns:
        raise CohortError(f"{modality_name}: embedding file needs patient_id and sample_id columns")
    feature_cols = [c for c in df.columns if c not in ("patient_id", "sample_id")]
    if not feature_cols:
        raise CohortError(f"{modality_name}: embedding file has no feature columns")
    values = df[feature_cols].to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise CohortError(f"{modality_name}: non-finite embedding values")
    out = {}
    for pid, group in df.groupby("patient_id", sort=True):
        out[str(pid)] = aggregate_samples(group[feature_cols].to_numpy(dtype=np.float64))
    return out


def load_cohort(manifest_path) -> CohortDataset:
    """Build an aligned cohort from a manifest of clinical + embedding files.

    Patients must appear in the clinical table and every listed modality;
    everyone else is dropped with a logged reason. Patient order is sorted
    by patient_id. Tabular demographic and cancer-type modalities are built
    from the clinical table.
    """
    manifest_path = Path(manifest_path)
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    base = manifest_path.parent

    def resolve(p):
        p = Path(p)
        return p if p.is_absolute() else base / p

    clinical_path = resolve(manifest["clinical"])
    if not clinical_path.exists():
        raise CohortError(f"missing file: {clinical_path}")
    records, rejects = load_clinical(clinical_path)
    for pid, reason in rejects:
        logger.info("rejected %s: %s", pid, reason)

    embeddings = {}
    for name in sorted(manifest.get("modalities", {})):
        path = resolve(manifest["modalities"][name])
        if not path.exists():
            raise CohortError(f"missing file: {path}")
        embeddings[name] = load_embedding_file(path, name)

    retained = sorted(records)
    for name, emb in embeddings.items():
        kept = []
        for pid in retained:
            if pid in emb:
                kept.append(pid)
            else:
                logger.info("rejected %s: missing modality %s", pid, name)
        retained = kept
    if not retained:
        raise CohortError("empty cohort")

    patients = [records[pid] for pid in retained]
    modalities = {}
    for name, emb in embeddings.items():
        values = np.vstack([emb[pid] for pid in retained])
        modalities[name] = ModalityMatrix(name, "embedding", list(retained), values)

    demo_rows, cancer_rows = [], []
    for rec in patients:
        demo, cancer = encode_tabular(rec)
        demo_rows.append(demo)
        cancer_rows.append(cancer)
    modalities[DEMOGRAPHICS_MODALITY] = ModalityMatrix(
        DEMOGRAPHICS_MODALITY, "tabular_onehot", list(retained), np.vstack(demo_rows)
    )
    modalities[CANCER_TYPE_MODALITY] = ModalityMatrix(
        CANCER_TYPE_MODALITY, "tabular_onehot", list(retained), np.vstack(cancer_rows)
    )
    return CohortDataset(patients=patients, modalities=modalities)

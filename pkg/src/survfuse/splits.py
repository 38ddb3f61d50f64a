"""Deterministic stratified k-fold assignment over joint patient strata.

Strata are the joint categories of (age bin, sex, race, ethnicity, event,
project). Because the joint strata are sparse, assignment is greedy:
strata are processed from smallest to largest; within a stratum members are
shuffled with a seeded PCG64 generator and dealt round-robin starting at
the currently least-filled fold (ties broken by lowest fold index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .cohort import CohortDataset, PatientRecord, age_bin


@dataclass(frozen=True)
class StratumKey:
    age_bin: str
    sex: str
    race: str
    ethnicity: str
    event: bool
    project: str

    def as_tuple(self):
        return (self.age_bin, self.sex, self.race, self.ethnicity, self.event, self.project)


@dataclass
class SplitPlan:
    k: int
    assignment: dict  # patient_id -> fold index
    seed: int

    def fold_ids(self, fold: int) -> list:
        return sorted(pid for pid, f in self.assignment.items() if f == fold)

    def train_test_ids(self, fold: int):
        test = self.fold_ids(fold)
        train = sorted(pid for pid, f in self.assignment.items() if f != fold)
        return train, test


def build_stratum_key(record: PatientRecord) -> StratumKey:
    return StratumKey(
        age_bin=age_bin(record.age_at_diagnosis_days),
        sex=record.sex,
        race=record.race,
        ethnicity=record.ethnicity,
        event=record.outcome.event,
        project=record.project,
    )


def stratified_kfold(dataset: CohortDataset, k: int, seed: int) -> SplitPlan:
    """Greedy iterative stratification; deterministic given (dataset, k, seed)."""
    if k < 2:
        raise ValueError("k must be >= 2")
    n = len(dataset.patients)
    if n == 0:
        raise ValueError("empty cohort")
    if k > n:
        raise ValueError(f"k={k} exceeds cohort size {n}")

    strata = {}
    for rec in dataset.patients:
        strata.setdefault(build_stratum_key(rec).as_tuple(), []).append(rec.patient_id)

    rng = np.random.default_rng(seed)
    fold_counts = np.zeros(k, dtype=int)
    assignment = {}
    # Smallest strata first so singletons land on the least-filled folds.
    for key in sorted(strata, key=lambda key: (len(strata[key]), key)):
        members = sorted(strata[key])
        perm = rng.permutation(len(members))
        start = int(np.argmin(fold_counts))
        for i, j in enumerate(perm):
            fold = (start + i) % k
            assignment[members[j]] = fold
            fold_counts[fold] += 1
    return SplitPlan(k=k, assignment=assignment, seed=seed)


def save_plan(plan: SplitPlan, path) -> None:
    """Write splits.csv (patient_id, fold), sorted by patient_id."""
    rows = sorted(plan.assignment.items())
    df = pd.DataFrame(rows, columns=["patient_id", "fold"])
    df.to_csv(path, index=False, lineterminator="\n")


def load_plan(path, seed: int = 0) -> SplitPlan:
    """Reload a splits.csv written by save_plan."""
    df = pd.read_csv(path, dtype={"patient_id": str, "fold": int})
    assignment = dict(zip(df["patient_id"], df["fold"]))
    k = int(df["fold"].max()) + 1
    return SplitPlan(k=k, assignment=assignment, seed=seed)

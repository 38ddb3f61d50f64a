"""Right-continuous step functions used for survival and hazard curves."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class StepFunction:
    """Right-continuous step function: f(t) = values[i] for times[i] <= t < times[i+1].

    Before the first time the function equals ``initial`` (1.0 for survival
    curves, 0.0 for cumulative hazards); after the last time the final value
    is carried forward.
    """

    times: np.ndarray
    values: np.ndarray
    initial: float = 1.0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have equal length")
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def _eval(self, t, side):
        t = np.asarray(t, dtype=np.float64)
        if self.times.size == 0:
            out = np.full(t.shape, self.initial)
            return out if out.ndim else float(out)
        idx = np.searchsorted(self.times, t, side=side)
        out = np.where(idx > 0, self.values[np.maximum(idx - 1, 0)], self.initial)
        return out if out.ndim else float(out)

    def __call__(self, t) -> np.ndarray:
        return self._eval(t, "right")

    def before(self, t) -> np.ndarray:
        """Left limit f(t-): the value just before t."""
        return self._eval(t, "left")

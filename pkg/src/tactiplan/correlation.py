"""Per-sensor Pearson correlation between presence bits and success rate.

Each site gets a weight in [-1, 1] measuring how strongly its presence
tracks task success across the ablation records. Sites whose presence
column never varies carry no information and are flagged undefined
instead of being silently zeroed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import AllUndefined, TooFewRecords


@dataclass(frozen=True)
class CorrelationReport:
    """Per-site correlation weights; NaN entries are listed in undefined_sites."""

    weights: np.ndarray
    undefined_sites: frozenset[int]

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "undefined_sites", frozenset(int(i) for i in self.undefined_sites))

    @property
    def n_sites(self) -> int:
        return self.weights.shape[0]

    def defined_mask(self) -> np.ndarray:
        mask = np.ones(self.n_sites, dtype=bool)
        mask[list(self.undefined_sites)] = False
        return mask

    def to_json_dict(self) -> dict:
        return {
            "weights": [None if i in self.undefined_sites else float(w) for i, w in enumerate(self.weights)],
            "undefined_sites": sorted(self.undefined_sites),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "CorrelationReport":
        raw = data["weights"]
        weights = np.array([np.nan if w is None else float(w) for w in raw])
        return cls(weights=weights, undefined_sites=frozenset(int(i) for i in data["undefined_sites"]))


def pearson_weights(dataset: Dataset) -> CorrelationReport:
    """Correlation weight W_i for every site, two-pass formulation.

    W_i = sum((X_i - mean(X_i)) * (Y - mean(Y)))
          / (sqrt(sum((X_i - mean(X_i))^2)) * sqrt(sum((Y - mean(Y))^2)))

    Raises:
        TooFewRecords: fewer than 2 records.
        AllUndefined: the success column is constant, so no W_i exists.
    """
    if dataset.n_records < 2:
        raise TooFewRecords(f"correlation needs at least 2 records, got {dataset.n_records}")
    X = dataset.design_matrix()
    y = dataset.targets()
    if np.all(y == y[0]):
        raise AllUndefined("success rate is constant across the dataset; every correlation is undefined")
    y_dev = y - y.mean()
    ss_y = float(np.dot(y_dev, y_dev))

    n, n_sites = X.shape
    weights = np.full(n_sites, np.nan)
    undefined = set()
    for i in range(n_sites):
        col = X[:, i]
        if np.all(col == col[0]):
            undefined.add(i)
            continue
        # n*col - sum(col) is exact for 0/1 columns (integer-valued floats),
        # equals n * (col - mean); the scale cancels in the ratio and makes
        # the flip 1-col negate W_i exactly
        x_dev = n * col - col.sum()
        ss_x = float(np.dot(x_dev, x_dev))
        w = float(np.dot(x_dev, y_dev)) / (np.sqrt(ss_x) * np.sqrt(ss_y))
        # rounding can push a perfect correlation a few ulp past +-1
        weights[i] = min(1.0, max(-1.0, w))
    return CorrelationReport(weights=weights, undefined_sites=frozenset(undefined))

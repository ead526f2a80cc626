"""Ordinary-least-squares fit of success rate on configuration bits.

The linear model y = b0 + sum(b_n * X_n) is deliberately simple: with
~15 ablation records over 21 sites the system is rank-deficient, so the
fit is the minimum-norm least-squares solution (SVD) and is used as a
direction hint for fine-tuning, not as the final predictor.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import Dataset, SensorConfiguration
from .errors import DimensionMismatch, ParseError, TooFewRecords


@dataclass(frozen=True)
class RegressionFit:
    """Intercept + per-site coefficients with training diagnostics."""

    intercept: float
    coefficients: np.ndarray
    training_rmse: float
    rank_deficient: bool

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=float)
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)

    @property
    def n_sites(self) -> int:
        return self.coefficients.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "intercept": self.intercept,
            "coefficients": [float(c) for c in self.coefficients],
            "training_rmse": self.training_rmse,
            "rank_deficient": self.rank_deficient,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RegressionFit":
        try:
            return cls(
                intercept=float(data["intercept"]),
                coefficients=np.asarray(data["coefficients"], dtype=float),
                training_rmse=float(data["training_rmse"]),
                rank_deficient=bool(data["rank_deficient"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed regression fit: {exc}") from exc


def fit_ols(dataset: Dataset, ridge: float = 0.0) -> RegressionFit:
    """Minimum-norm least squares of y on [1, X]; optional ridge penalty.

    With ridge > 0 the coefficient block (not the intercept) is penalized
    by stacking sqrt(ridge) * I rows, still solved by lstsq.

    Raises:
        TooFewRecords: fewer than 2 records.
    """
    if dataset.n_records < 2:
        raise TooFewRecords(f"OLS needs at least 2 records, got {dataset.n_records}")
    if ridge < 0:
        raise ValueError(f"ridge must be >= 0, got {ridge}")
    X = dataset.design_matrix()
    y = dataset.targets()
    n, n_sites = X.shape
    A = np.hstack([np.ones((n, 1)), X])
    rank = int(np.linalg.matrix_rank(A))
    if ridge > 0:
        penalty = np.hstack([np.zeros((n_sites, 1)), np.sqrt(ridge) * np.eye(n_sites)])
        A_solve = np.vstack([A, penalty])
        y_solve = np.concatenate([y, np.zeros(n_sites)])
    else:
        A_solve, y_solve = A, y
    beta, _, _, _ = np.linalg.lstsq(A_solve, y_solve, rcond=None)
    residuals = A @ beta - y
    rmse = float(np.sqrt(np.mean(residuals**2)))
    return RegressionFit(
        intercept=float(beta[0]),
        coefficients=beta[1:],
        training_rmse=rmse,
        rank_deficient=rank < n_sites + 1,
    )


def predict_ols(fit: RegressionFit, config: SensorConfiguration) -> float:
    """b0 + sum(b_n * X_n); deliberately not clamped (diagnostic model)."""
    if len(config) != fit.n_sites:
        raise DimensionMismatch(
            f"configuration has {len(config)} bits, fit expects {fit.n_sites}"
        )
    return float(fit.intercept + np.dot(fit.coefficients, config.as_array()))


def save_fit(fit: RegressionFit, path) -> None:
    Path(path).write_text(json.dumps(fit.to_json_dict(), indent=2) + "\n", encoding="utf-8")


def load_fit(path) -> RegressionFit:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON: {exc}") from exc
    return RegressionFit.from_json_dict(data)

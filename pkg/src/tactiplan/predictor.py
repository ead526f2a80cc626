"""Anchored per-sensor importance model with sum-preserving fine-tuning.

The predictor maps a configuration to

    P = p0 + (p_full - p0) * sum(T_n * X_n),   clamped to [0, 1]

where p0 / p_full are measured success rates with no sensors and with the
full original sensor set. T is initialized from correlation weights and
refined by coordinate descent: raising one coefficient is compensated by
proportionally lowering the others, so sum(T) is conserved at every step.
The regression coefficients only order the search direction; acceptance
is decided purely by validation error.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .correlation import CorrelationReport, pearson_weights
from .data import Dataset, SensorConfiguration
from .errors import (
    DegenerateAnchors,
    DimensionMismatch,
    EmptyValidation,
    InvariantError,
    ParseError,
    UndefinedWeights,
)
from .layout import SensorLayout, SensorSite
from .regression import RegressionFit, fit_ols


@dataclass(frozen=True)
class PredictorAnchors:
    """Measured endpoint success rates: p0 (no sensors), p_full (all sensors)."""

    p0: float
    p_full: float

    def __post_init__(self):
        object.__setattr__(self, "p0", float(self.p0))
        object.__setattr__(self, "p_full", float(self.p_full))
        for label, v in (("p0", self.p0), ("p_full", self.p_full)):
            if not (0.0 <= v <= 1.0):
                raise InvariantError(f"anchor {label} must be in [0, 1], got {v}")
        if self.p0 == self.p_full:
            raise DegenerateAnchors(f"anchors coincide (p0 == p_full == {self.p0}); predictor has no span")

    @property
    def span(self) -> float:
        return self.p_full - self.p0

    def interpolate(self, s: float) -> float:
        # two-product form is exact at s=0 and s=1, unlike p0 + span*s
        return self.p0 * (1.0 - s) + self.p_full * s


class Metric(str, enum.Enum):
    MAE = "mae"
    RMSE = "rmse"


@dataclass(frozen=True)
class TuningSettings:
    """Fine-tuning knobs; defaults match the data's 3-decimal resolution."""

    step_delta: float = 0.01
    max_passes: int = 50
    validation_metric: Metric = Metric.MAE

    def __post_init__(self):
        if self.step_delta <= 0:
            raise InvariantError(f"step_delta must be > 0, got {self.step_delta}")
        if self.max_passes < 1:
            raise InvariantError(f"max_passes must be >= 1, got {self.max_passes}")
        object.__setattr__(self, "validation_metric", Metric(self.validation_metric))


@dataclass(frozen=True)
class TuningStep:
    """One accepted coordinate update."""

    pass_index: int
    site_id: int
    delta: float
    val_before: float
    val_after: float


@dataclass(frozen=True)
class TunedPredictor:
    """Anchors plus per-site coefficients T (and the accepted-update log)."""

    anchors: PredictorAnchors
    weights: np.ndarray
    layout_name: str = ""
    tuning_log: tuple[TuningStep, ...] = field(default=())

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "tuning_log", tuple(self.tuning_log))

    @property
    def n_sites(self) -> int:
        return self.weights.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "p0": self.anchors.p0,
            "p92": self.anchors.p_full,
            "weights": [float(w) for w in self.weights],
            "layout_name": self.layout_name,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "TunedPredictor":
        try:
            return cls(
                anchors=PredictorAnchors(float(data["p0"]), float(data["p92"])),
                weights=np.asarray(data["weights"], dtype=float),
                layout_name=str(data.get("layout_name", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed predictor: {exc}") from exc


def predict(predictor: TunedPredictor, config: SensorConfiguration) -> float:
    """Anchored affine prediction, clamped to [0, 1]."""
    if len(config) != predictor.n_sites:
        raise DimensionMismatch(
            f"configuration has {len(config)} bits, predictor expects {predictor.n_sites}"
        )
    s = float(np.dot(predictor.weights, config.as_array()))
    return min(1.0, max(0.0, predictor.anchors.interpolate(s)))


def initialize(
    correlations: CorrelationReport,
    anchors: PredictorAnchors,
    train: Dataset,
) -> TunedPredictor:
    """Seed coefficients from correlation weights.

    T_i = s * W_i / sum(|W_j|). The scale s makes the all-ones prediction
    match the mean measured success of all-ones records in `train` when
    such records exist (and the match is achievable); otherwise s = 1.

    Raises:
        UndefinedWeights: any site undefined, or sum(|W|) == 0.
    """
    if correlations.undefined_sites:
        raise UndefinedWeights(
            f"sites {sorted(correlations.undefined_sites)} have undefined correlation; "
            "resolve them (drop sites or supply varied data) before initializing"
        )
    W = correlations.weights
    norm = float(np.abs(W).sum())
    if norm == 0.0:
        raise UndefinedWeights("all correlation weights are zero; normalizer is degenerate")
    unit = W / norm

    scale = 1.0
    ones_rates = [rec.success_rate for rec in train.records if all(b == 1 for b in rec.config.bits)]
    if ones_rates:
        target_sum = (float(np.mean(ones_rates)) - anchors.p0) / anchors.span
        unit_sum = float(unit.sum())
        if abs(unit_sum) > 1e-12:
            scale = target_sum / unit_sum
        # else: mixed-sign weights cancel; no scale can hit the target, keep s=1
    return TunedPredictor(anchors=anchors, weights=scale * unit, layout_name=train.layout.name)


def _validation_error(weights: np.ndarray, anchors: PredictorAnchors, X: np.ndarray, y: np.ndarray, metric: Metric) -> float:
    sums = X @ weights
    preds = np.clip(anchors.p0 * (1.0 - sums) + anchors.p_full * sums, 0.0, 1.0)
    err = preds - y
    if metric is Metric.MAE:
        return float(np.mean(np.abs(err)))
    return float(np.sqrt(np.mean(err**2)))


def _compensated(weights: np.ndarray, site: int, delta: float) -> np.ndarray:
    """Apply T[site] += delta, redistributing -delta over the other sites.

    Redistribution is proportional to |T_j| (uniform when the others are
    all ~zero), which keeps sum(T) unchanged.
    """
    out = weights.copy()
    out[site] += delta
    others = np.arange(len(weights)) != site
    mags = np.abs(weights[others])
    total = mags.sum()
    if total < 1e-12:
        out[others] -= delta / others.sum()
    else:
        out[others] -= delta * mags / total
    return out


def fine_tune(
    initial: TunedPredictor,
    regression: RegressionFit,
    validation: Dataset,
    settings: TuningSettings = TuningSettings(),
) -> TunedPredictor:
    """Coordinate-descent refinement under the sum-preserving update rule.

    Sites are visited in id order each pass. For site i the candidates
    T_i +- step_delta are tried, the sign of the regression coefficient
    first; a candidate is kept only if the validation metric strictly
    improves. Stops after a pass with no accepted update, or max_passes.
    """
    if regression.n_sites != initial.n_sites:
        raise DimensionMismatch(
            f"regression has {regression.n_sites} coefficients, predictor has {initial.n_sites}"
        )
    if validation.layout.n_sites != initial.n_sites:
        raise DimensionMismatch(
            f"validation layout has {validation.layout.n_sites} sites, predictor has {initial.n_sites}"
        )
    if validation.n_records == 0:  # unreachable via Dataset, kept for clarity
        raise EmptyValidation("fine_tune needs a nonempty validation dataset")

    X = validation.design_matrix()
    y = validation.targets()
    metric = settings.validation_metric
    anchors = initial.anchors
    weights = initial.weights.copy()
    current = _validation_error(weights, anchors, X, y, metric)
    log: list[TuningStep] = list(initial.tuning_log)

    for pass_index in range(settings.max_passes):
        improved = False
        for site in range(initial.n_sites):
            beta = regression.coefficients[site]
            preferred = settings.step_delta if beta >= 0 else -settings.step_delta
            for delta in (preferred, -preferred):
                candidate = _compensated(weights, site, delta)
                err = _validation_error(candidate, anchors, X, y, metric)
                if err < current:
                    log.append(TuningStep(pass_index, site, delta, current, err))
                    weights = candidate
                    current = err
                    improved = True
                    break
        if not improved:
            break

    return TunedPredictor(
        anchors=anchors,
        weights=weights,
        layout_name=initial.layout_name,
        tuning_log=tuple(log),
    )


def rank_sites(predictor: TunedPredictor, layout: SensorLayout) -> list[tuple[SensorSite, float]]:
    """Sites sorted by descending coefficient, ties by ascending id."""
    if layout.n_sites != predictor.n_sites:
        raise DimensionMismatch(
            f"layout {layout.name!r} has {layout.n_sites} sites, predictor has {predictor.n_sites}"
        )
    order = sorted(range(layout.n_sites), key=lambda i: (-predictor.weights[i], i))
    return [(layout.sites[i], float(predictor.weights[i])) for i in order]


def fit_pipeline(
    train: Dataset,
    anchors: PredictorAnchors,
    validation: Dataset | None = None,
    settings: TuningSettings = TuningSettings(),
    ridge: float = 0.0,
) -> tuple[TunedPredictor, CorrelationReport, RegressionFit]:
    """Full fitting chain: correlation -> OLS -> initialize -> fine_tune.

    When no separate validation dataset is given, fine-tuning measures
    improvement on the training records themselves.
    """
    report = pearson_weights(train)
    fit = fit_ols(train, ridge=ridge)
    seeded = initialize(report, anchors, train)
    tuned = fine_tune(seeded, fit, validation if validation is not None else train, settings)
    return tuned, report, fit


def save_predictor(predictor: TunedPredictor, path) -> None:
    Path(path).write_text(json.dumps(predictor.to_json_dict(), indent=2) + "\n", encoding="utf-8")


def load_predictor(path) -> TunedPredictor:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON: {exc}") from exc
    return TunedPredictor.from_json_dict(data)


def tuning_log_rows(predictor: TunedPredictor) -> list[list]:
    """Rows for the tuning-log CSV: pass,site_id,delta,val_before,val_after."""
    return [
        [step.pass_index, step.site_id, step.delta, step.val_before, step.val_after]
        for step in predictor.tuning_log
    ]

"""tactiplan: tactile sensor layout analysis and optimization.

Predicts robotic-manipulation task success from binary sensor
configurations, quantifies per-sensor importance, searches for
cost-optimal layouts, and evaluates robustness to bit-flip noise.
"""

from .correlation import CorrelationReport, pearson_weights
from .data import (
    Dataset,
    ExperimentRecord,
    SensorConfiguration,
    load_dataset,
    random_configurations,
    save_dataset,
    split,
)
from .errors import TactiplanError
from .fnn import (
    FnnModel,
    TrainSettings,
    fnn_forward,
    fnn_gradient_check,
    fnn_init,
    fnn_train,
)
from .layout import (
    Finger,
    Region,
    SensorLayout,
    SensorSite,
    builtin_shadow21,
    load_layout,
    save_layout,
    total_cost,
)
from .noise import (
    DEFAULT_LEVELS,
    NoiseLevel,
    NoiseSweepResult,
    expected_under_flips,
    monte_carlo_flips,
    noise_sweep,
)
from .predictor import (
    Metric,
    PredictorAnchors,
    TunedPredictor,
    TuningSettings,
    fine_tune,
    fit_pipeline,
    initialize,
    load_predictor,
    predict,
    rank_sites,
    save_predictor,
)
from .regression import RegressionFit, fit_ols, predict_ols
from .search import (
    ParetoFrontier,
    SearchResult,
    best_k_subset,
    exhaustive_search,
    pareto_frontier,
)
from .synthetic import (
    HiddenModel,
    generate_dataset,
    load_hidden_model,
    random_hidden_model,
    save_hidden_model,
)

__version__ = "0.1.0"

__all__ = [
    "CorrelationReport",
    "DEFAULT_LEVELS",
    "Dataset",
    "ExperimentRecord",
    "Finger",
    "FnnModel",
    "HiddenModel",
    "Metric",
    "NoiseLevel",
    "NoiseSweepResult",
    "ParetoFrontier",
    "PredictorAnchors",
    "Region",
    "RegressionFit",
    "SearchResult",
    "SensorConfiguration",
    "SensorLayout",
    "SensorSite",
    "TactiplanError",
    "TrainSettings",
    "TunedPredictor",
    "TuningSettings",
    "best_k_subset",
    "builtin_shadow21",
    "exhaustive_search",
    "expected_under_flips",
    "fine_tune",
    "fit_ols",
    "fit_pipeline",
    "fnn_forward",
    "fnn_gradient_check",
    "fnn_init",
    "fnn_train",
    "generate_dataset",
    "initialize",
    "load_dataset",
    "load_hidden_model",
    "load_layout",
    "load_predictor",
    "monte_carlo_flips",
    "noise_sweep",
    "pareto_frontier",
    "pearson_weights",
    "predict",
    "predict_ols",
    "random_configurations",
    "random_hidden_model",
    "rank_sites",
    "save_dataset",
    "save_hidden_model",
    "save_layout",
    "save_predictor",
    "split",
    "total_cost",
]

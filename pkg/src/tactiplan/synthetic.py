"""Synthetic ground-truth generators for end-to-end pipeline verification.

A hidden model plays the role of the expensive simulation: it assigns a
known success rate to any configuration, optionally with a pairwise
interaction term (to probe how the linear pipeline degrades on nonlinear
truth) and gaussian measurement noise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import Dataset, ExperimentRecord, SensorConfiguration
from .errors import InvariantError, ParseError
from .layout import SensorLayout
from .predictor import PredictorAnchors


@dataclass(frozen=True)
class HiddenModel:
    """Known ground truth: anchors, true weights, optional interactions, noise."""

    anchors: PredictorAnchors
    true_weights: np.ndarray
    interaction: np.ndarray | None = None
    noise_stddev: float = 0.0
    seed: int = 0

    def __post_init__(self):
        weights = np.asarray(self.true_weights, dtype=float)
        if not np.all(np.isfinite(weights)):
            raise InvariantError("true_weights must be finite")
        weights.setflags(write=False)
        object.__setattr__(self, "true_weights", weights)
        if self.interaction is not None:
            inter = np.asarray(self.interaction, dtype=float)
            n = weights.shape[0]
            if inter.shape != (n, n):
                raise InvariantError(f"interaction must be {n}x{n}, got {inter.shape}")
            inter.setflags(write=False)
            object.__setattr__(self, "interaction", inter)
        object.__setattr__(self, "noise_stddev", float(self.noise_stddev))
        if self.noise_stddev < 0:
            raise InvariantError(f"noise_stddev must be >= 0, got {self.noise_stddev}")

    @property
    def n_sites(self) -> int:
        return self.true_weights.shape[0]

    def true_value(self, config: SensorConfiguration) -> float:
        """Noiseless success rate of a configuration under this model."""
        x = config.as_array()
        s = float(np.dot(self.true_weights, x))
        if self.interaction is not None:
            s += float(x @ self.interaction @ x)
        return min(1.0, max(0.0, self.anchors.interpolate(s)))

    def to_json_dict(self) -> dict:
        return {
            "p0": self.anchors.p0,
            "p92": self.anchors.p_full,
            "true_weights": [float(w) for w in self.true_weights],
            "interaction": None if self.interaction is None else self.interaction.tolist(),
            "noise_stddev": self.noise_stddev,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "HiddenModel":
        try:
            inter = data.get("interaction")
            return cls(
                anchors=PredictorAnchors(float(data["p0"]), float(data["p92"])),
                true_weights=np.asarray(data["true_weights"], dtype=float),
                interaction=None if inter is None else np.asarray(inter, dtype=float),
                noise_stddev=float(data.get("noise_stddev", 0.0)),
                seed=int(data.get("seed", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed hidden model: {exc}") from exc


def random_hidden_model(
    layout: SensorLayout,
    seed: int,
    total_weight: float = 1.0,
    noise_stddev: float = 0.0,
    anchors: PredictorAnchors = PredictorAnchors(0.28, 0.392),
) -> HiddenModel:
    """Positive random weights normalized to sum to `total_weight`."""
    rng = np.random.Generator(np.random.PCG64(seed))
    raw = rng.random(layout.n_sites) + 0.05  # keep every site relevant
    weights = total_weight * raw / raw.sum()
    return HiddenModel(anchors=anchors, true_weights=weights, noise_stddev=noise_stddev, seed=seed)


def generate_dataset(
    hidden: HiddenModel,
    layout: SensorLayout,
    num_records: int,
    seed: int,
    task: str = "synthetic",
) -> Dataset:
    """Sample Bernoulli(0.5) configurations and score them with the hidden model.

    y = clamp(p0 + span * (sum(T*_n x_n) + x' M x) + N(0, noise_stddev), 0, 1),
    all draws from one PCG64(seed) stream (configs first, then noise).
    """
    if num_records < 1:
        raise InvariantError(f"num_records must be >= 1, got {num_records}")
    if hidden.n_sites != layout.n_sites:
        raise InvariantError(
            f"hidden model has {hidden.n_sites} weights, layout {layout.name!r} has {layout.n_sites} sites"
        )
    rng = np.random.Generator(np.random.PCG64(seed))
    bits = rng.random((num_records, layout.n_sites)) < 0.5
    noise = rng.normal(0.0, hidden.noise_stddev, size=num_records)
    records = []
    for i in range(num_records):
        config = SensorConfiguration(tuple(int(b) for b in bits[i]))
        x = config.as_array()
        s = float(np.dot(hidden.true_weights, x))
        if hidden.interaction is not None:
            s += float(x @ hidden.interaction @ x)
        y = hidden.anchors.interpolate(s) + noise[i]
        records.append(
            ExperimentRecord(
                config_id=f"G_{i + 1}",
                config=config,
                task=task,
                success_rate=min(1.0, max(0.0, y)),
            )
        )
    return Dataset(layout=layout, records=tuple(records))


def save_hidden_model(hidden: HiddenModel, path) -> None:
    Path(path).write_text(json.dumps(hidden.to_json_dict(), indent=2) + "\n", encoding="utf-8")


def load_hidden_model(path) -> HiddenModel:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON: {exc}") from exc
    return HiddenModel.from_json_dict(data)

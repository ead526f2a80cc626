"""Feedforward comparison network: N -> 10 -> 10 -> 1 with ReLU.

Everything is plain numpy: forward pass, backprop, full-batch gradient
descent, and a central-finite-difference gradient check. Full batch keeps
training bit-deterministic for a given (seed, data, settings); datasets
here are ~15 rows, so there is nothing to gain from mini-batching.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import Dataset, ExperimentRecord, SensorConfiguration
from .errors import DimensionMismatch, DivergenceError, EmptyDataset, InvariantError, ParseError

HIDDEN = 10
KINK_TOL = 1e-6


@dataclass(frozen=True)
class FnnModel:
    """Two-hidden-layer network parameters (widths fixed at 10)."""

    w1: np.ndarray  # (10, N)
    b1: np.ndarray  # (10,)
    w2: np.ndarray  # (10, 10)
    b2: np.ndarray  # (10,)
    w3: np.ndarray  # (1, 10)
    b3: float
    seed: int

    def __post_init__(self):
        for name, arr, shape in (
            ("w1", self.w1, (HIDDEN, self.w1.shape[1] if self.w1.ndim == 2 else -1)),
            ("b1", self.b1, (HIDDEN,)),
            ("w2", self.w2, (HIDDEN, HIDDEN)),
            ("b2", self.b2, (HIDDEN,)),
            ("w3", self.w3, (1, HIDDEN)),
        ):
            arr = np.asarray(arr, dtype=float)
            if arr.shape != shape:
                raise InvariantError(f"{name} must have shape {shape}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise InvariantError(f"{name} contains non-finite values")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "b3", float(self.b3))
        if not np.isfinite(self.b3):
            raise InvariantError("b3 is non-finite")

    @property
    def n_inputs(self) -> int:
        return self.w1.shape[1]

    def to_json_dict(self) -> dict:
        return {
            "w1": self.w1.tolist(),
            "b1": self.b1.tolist(),
            "w2": self.w2.tolist(),
            "b2": self.b2.tolist(),
            "w3": self.w3.tolist(),
            "b3": self.b3,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "FnnModel":
        try:
            return cls(
                w1=np.asarray(data["w1"], dtype=float),
                b1=np.asarray(data["b1"], dtype=float),
                w2=np.asarray(data["w2"], dtype=float),
                b2=np.asarray(data["b2"], dtype=float),
                w3=np.asarray(data["w3"], dtype=float),
                b3=float(data["b3"]),
                seed=int(data["seed"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed network model: {exc}") from exc


@dataclass(frozen=True)
class TrainSettings:
    learning_rate: float = 0.01
    epochs: int = 5000

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise InvariantError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise InvariantError(f"epochs must be >= 1, got {self.epochs}")


def fnn_init(layout_size: int, seed: int) -> FnnModel:
    """He-style init: weights ~ N(0, 2/fan_in), biases zero, per-seed deterministic."""
    if layout_size < 1:
        raise InvariantError(f"layout_size must be >= 1, got {layout_size}")
    rng = np.random.Generator(np.random.PCG64(seed))
    w1 = rng.normal(0.0, np.sqrt(2.0 / layout_size), size=(HIDDEN, layout_size))
    w2 = rng.normal(0.0, np.sqrt(2.0 / HIDDEN), size=(HIDDEN, HIDDEN))
    w3 = rng.normal(0.0, np.sqrt(2.0 / HIDDEN), size=(1, HIDDEN))
    return FnnModel(
        w1=w1, b1=np.zeros(HIDDEN), w2=w2, b2=np.zeros(HIDDEN), w3=w3, b3=0.0, seed=seed
    )


def _forward_batch(model: FnnModel, X: np.ndarray):
    z1 = X @ model.w1.T + model.b1
    a1 = np.maximum(z1, 0.0)
    z2 = a1 @ model.w2.T + model.b2
    a2 = np.maximum(z2, 0.0)
    yhat = a2 @ model.w3[0] + model.b3
    return z1, a1, z2, a2, yhat


def fnn_forward(model: FnnModel, config: SensorConfiguration) -> float:
    """w3 . relu(w2 . relu(w1 x + b1) + b2) + b3; no clamping."""
    if len(config) != model.n_inputs:
        raise DimensionMismatch(f"configuration has {len(config)} bits, network expects {model.n_inputs}")
    *_, yhat = _forward_batch(model, config.as_array()[None, :])
    return float(yhat[0])


def _gradients(model: FnnModel, X: np.ndarray, y: np.ndarray):
    """MSE loss and its gradient wrt every parameter (full batch)."""
    m = X.shape[0]
    z1, a1, z2, a2, yhat = _forward_batch(model, X)
    err = yhat - y
    loss = float(np.mean(err**2))

    g = 2.0 * err / m  # dL/dyhat
    dw3 = (g @ a2)[None, :]
    db3 = float(g.sum())
    da2 = np.outer(g, model.w3[0])
    dz2 = da2 * (z2 > 0)  # relu'(0) taken as 0
    dw2 = dz2.T @ a1
    db2 = dz2.sum(axis=0)
    da1 = dz2 @ model.w2
    dz1 = da1 * (z1 > 0)
    dw1 = dz1.T @ X
    db1 = dz1.sum(axis=0)
    return loss, (dw1, db1, dw2, db2, dw3, db3)


def fnn_train(model: FnnModel, train: Dataset, settings: TrainSettings = TrainSettings()) -> tuple[FnnModel, list[float]]:
    """Full-batch gradient descent on MSE.

    Returns the final model and the loss trace (entry e is the MSE after
    e updates; length epochs + 1, so trace[-1] is the final training MSE).

    Raises:
        DivergenceError: loss became non-finite (learning rate too large).
    """
    if train.layout.n_sites != model.n_inputs:
        raise DimensionMismatch(
            f"dataset layout has {train.layout.n_sites} sites, network expects {model.n_inputs}"
        )
    X = train.design_matrix()
    y = train.targets()
    if X.shape[0] == 0:  # unreachable via Dataset, kept for clarity
        raise EmptyDataset("training needs at least one record")

    trace: list[float] = []
    current = model
    for _ in range(settings.epochs):
        loss, (dw1, db1, dw2, db2, dw3, db3) = _gradients(current, X, y)
        if not np.isfinite(loss):
            raise DivergenceError(f"training loss became non-finite (learning_rate={settings.learning_rate})")
        trace.append(loss)
        lr = settings.learning_rate
        w1 = current.w1 - lr * dw1
        b1 = current.b1 - lr * db1
        w2 = current.w2 - lr * dw2
        b2 = current.b2 - lr * db2
        w3 = current.w3 - lr * dw3
        b3 = current.b3 - lr * db3
        if not all(np.all(np.isfinite(a)) for a in (w1, b1, w2, b2, w3)) or not np.isfinite(b3):
            raise DivergenceError(f"parameters became non-finite (learning_rate={settings.learning_rate})")
        current = FnnModel(w1=w1, b1=b1, w2=w2, b2=b2, w3=w3, b3=float(b3), seed=model.seed)
    final_loss, _ = _gradients(current, X, y)
    if not np.isfinite(final_loss):
        raise DivergenceError("final training loss is non-finite")
    trace.append(final_loss)
    return current, trace


def _param_views(model: FnnModel):
    return [
        ("w1", model.w1),
        ("b1", model.b1),
        ("w2", model.w2),
        ("b2", model.b2),
        ("w3", model.w3),
        ("b3", np.asarray([model.b3])),
    ]


def _with_param(model: FnnModel, name: str, value: np.ndarray) -> FnnModel:
    parts = {k: v for k, v in _param_views(model)}
    parts[name] = value
    return FnnModel(
        w1=parts["w1"], b1=parts["b1"], w2=parts["w2"], b2=parts["b2"],
        w3=parts["w3"], b3=float(np.asarray(parts["b3"]).reshape(-1)[0]),
        seed=model.seed,
    )


def fnn_gradient_check(model: FnnModel, record: ExperimentRecord, h: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients.

    Parameters whose +-h perturbation changes the ReLU activation pattern
    (or that sit within 1e-6 of a kink) are excluded: finite differences
    are invalid across a nondifferentiable point.
    """
    if len(record.config) != model.n_inputs:
        raise DimensionMismatch(
            f"record has {len(record.config)} bits, network expects {model.n_inputs}"
        )
    X = record.config.as_array()[None, :]
    y = np.asarray([record.success_rate])
    _, grads = _gradients(model, X, y)
    analytic = {name: np.asarray(g, dtype=float).reshape(-1) for name, g in zip(
        ("w1", "b1", "w2", "b2", "w3", "b3"), [*grads[:5], np.asarray([grads[5]])]
    )}

    def loss_and_pattern(m: FnnModel):
        z1, _, z2, _, yhat = _forward_batch(m, X)
        loss = float(np.mean((yhat - y) ** 2))
        pattern = (z1 > 0, z2 > 0)
        near_kink = min(np.abs(z1).min(), np.abs(z2).min()) < KINK_TOL
        return loss, pattern, near_kink

    max_rel = 0.0
    for name, base in _param_views(model):
        flat = np.asarray(base, dtype=float).reshape(-1)
        for idx in range(flat.size):
            bumped = flat.copy()
            bumped[idx] = flat[idx] + h
            plus, pat_p, kink_p = loss_and_pattern(_with_param(model, name, bumped.reshape(base.shape)))
            bumped[idx] = flat[idx] - h
            minus, pat_m, kink_m = loss_and_pattern(_with_param(model, name, bumped.reshape(base.shape)))
            if kink_p or kink_m or not all(np.array_equal(a, b) for a, b in zip(pat_p, pat_m)):
                continue
            numeric = (plus - minus) / (2.0 * h)
            a = analytic[name][idx]
            rel = abs(a - numeric) / max(abs(a) + abs(numeric), 1e-8)
            max_rel = max(max_rel, rel)
    return max_rel


def save_model(model: FnnModel, path) -> None:
    Path(path).write_text(json.dumps(model.to_json_dict(), indent=2) + "\n", encoding="utf-8")


def load_model(path) -> FnnModel:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON: {exc}") from exc
    return FnnModel.from_json_dict(data)


def loss_trace_rows(trace: list[float]) -> list[list]:
    """Rows for the loss-trace CSV: epoch,mse."""
    return [[epoch, mse] for epoch, mse in enumerate(trace)]

"""Predicted success under per-sensor bit-flip interference.

Each sensor bit is independently flipped with probability p before
prediction. Because the predictor is affine in the bits, the expectation
has a closed form; the Monte Carlo path exists to validate it and to
capture the clamping behaviour the closed form averages over.

Monte Carlo trials are generated in fixed-size chunks whose PCG64 streams
derive from (seed, chunk index), so results are bit-identical for any
worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import SensorConfiguration
from .errors import DimensionMismatch, EmptyLevels, InvariantError
from .predictor import TunedPredictor, predict

DEFAULT_LEVELS = (0.0, 0.01, 0.03, 0.05, 0.10, 0.20, 0.30, 0.40)
_CHUNK_TRIALS = 8192


@dataclass(frozen=True)
class NoiseLevel:
    """Per-sensor flip probability; capped at 0.5 (beyond, bits anti-correlate)."""

    flip_probability: float

    def __post_init__(self):
        if not (0.0 <= self.flip_probability <= 0.5):
            raise InvariantError(f"flip probability must be in [0, 0.5], got {self.flip_probability}")

    @classmethod
    def of(cls, p) -> "NoiseLevel":
        return p if isinstance(p, NoiseLevel) else cls(float(p))


@dataclass(frozen=True)
class NoiseSweepResult:
    """Analytic and Monte Carlo expected predictions per noise level."""

    levels: tuple[NoiseLevel, ...]
    analytic: tuple[float, ...]
    monte_carlo: tuple[tuple[float, float], ...]  # (mean, 95% CI half-width)
    trials_per_level: int
    seed: int

    def __post_init__(self):
        if not (len(self.levels) == len(self.analytic) == len(self.monte_carlo)):
            raise InvariantError("levels, analytic, and monte_carlo must have equal length")
        if any(ci < 0 for _, ci in self.monte_carlo):
            raise InvariantError("CI half-widths must be >= 0")

    def csv_rows(self) -> list[list]:
        """Rows for the sweep CSV: flip_probability,analytic,mc_mean,mc_ci."""
        return [
            [lvl.flip_probability, a, mc[0], mc[1]]
            for lvl, a, mc in zip(self.levels, self.analytic, self.monte_carlo)
        ]


def _check_config(predictor: TunedPredictor, config: SensorConfiguration) -> None:
    if len(config) != predictor.n_sites:
        raise DimensionMismatch(
            f"configuration has {len(config)} bits, predictor expects {predictor.n_sites}"
        )


def expected_under_flips(predictor: TunedPredictor, config: SensorConfiguration, p) -> float:
    """Closed-form expectation: each bit contributes X_n(1-2p) + p."""
    _check_config(predictor, config)
    level = NoiseLevel.of(p).flip_probability
    x = config.as_array()
    expected_bits = x * (1.0 - 2.0 * level) + level
    s = float(np.dot(predictor.weights, expected_bits))
    return min(1.0, max(0.0, predictor.anchors.interpolate(s)))


def monte_carlo_flips(
    predictor: TunedPredictor,
    config: SensorConfiguration,
    p,
    trials: int,
    seed: int,
    workers: int = 1,
) -> tuple[float, float]:
    """(mean, 1.96 * stddev / sqrt(trials)) of predictions over flipped configs."""
    _check_config(predictor, config)
    if trials < 1:
        raise InvariantError(f"trials must be >= 1, got {trials}")
    level = NoiseLevel.of(p).flip_probability
    if level == 0.0:
        # point mass: every trial is the noiseless prediction
        return predict(predictor, config), 0.0
    return _mc_sample(predictor, config, level, trials, (int(seed),), workers)


def _mc_sample(
    predictor: TunedPredictor,
    config: SensorConfiguration,
    level: float,
    trials: int,
    seed_material: tuple[int, ...],
    workers: int,
) -> tuple[float, float]:
    x = config.as_array()
    weights = predictor.weights
    anchors = predictor.anchors
    chunks = [
        (ci, min(_CHUNK_TRIALS, trials - ci * _CHUNK_TRIALS))
        for ci in range((trials + _CHUNK_TRIALS - 1) // _CHUNK_TRIALS)
    ]

    def run_chunk(chunk) -> tuple[float, float]:
        chunk_index, m = chunk
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((*seed_material, chunk_index))))
        flips = rng.random((m, x.shape[0])) < level
        flipped = np.where(flips, 1.0 - x, x)
        sums = flipped @ weights
        vals = np.clip(anchors.p0 * (1.0 - sums) + anchors.p_full * sums, 0.0, 1.0)
        return float(vals.sum()), float(np.dot(vals, vals))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(run_chunk, chunks))
    else:
        partials = [run_chunk(c) for c in chunks]

    total = 0.0
    total_sq = 0.0
    for s, ssq in partials:  # fixed chunk order keeps the reduction deterministic
        total += s
        total_sq += ssq
    mean = total / trials
    if trials == 1:
        return mean, 0.0
    var = max(0.0, (total_sq - trials * mean * mean) / (trials - 1))
    return mean, float(1.96 * np.sqrt(var) / np.sqrt(trials))


def noise_sweep(
    predictor: TunedPredictor,
    config: SensorConfiguration,
    trials: int,
    seed: int,
    levels=None,
    workers: int = 1,
) -> NoiseSweepResult:
    """Analytic + Monte Carlo evaluation at each level (default: the 8-level grid)."""
    _check_config(predictor, config)
    if levels is None:
        levels = DEFAULT_LEVELS
    levels = tuple(NoiseLevel.of(p) for p in levels)
    if not levels:
        raise EmptyLevels("noise sweep needs at least one level")
    if trials < 1:
        raise InvariantError(f"trials must be >= 1, got {trials}")
    analytic = []
    monte_carlo = []
    for i, level in enumerate(levels):
        analytic.append(expected_under_flips(predictor, config, level))
        if level.flip_probability == 0.0:
            monte_carlo.append((predict(predictor, config), 0.0))
        else:
            monte_carlo.append(
                _mc_sample(predictor, config, level.flip_probability, trials, (int(seed), i), workers)
            )
    return NoiseSweepResult(
        levels=levels,
        analytic=tuple(analytic),
        monte_carlo=tuple(monte_carlo),
        trials_per_level=trials,
        seed=int(seed),
    )

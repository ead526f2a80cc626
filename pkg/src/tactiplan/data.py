"""Binary sensor configurations and ablation experiment records.

A configuration is a 0/1 vector over a layout's sites; a record pairs a
configuration with the measured task success rate of a policy trained
with it. Datasets are immutable after construction and every operation
here is a pure function of (inputs, seed). Randomness uses numpy's PCG64
generator so outputs are reproducible across platforms.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyDataset,
    InvariantError,
    ParseError,
    RangeError,
    TooFewRecords,
)
from .layout import SensorLayout


@dataclass(frozen=True)
class SensorConfiguration:
    """Ordered binary presence vector, one bit per layout site (1 = sensor)."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise InvariantError(f"configuration bits must be 0 or 1, got {self.bits}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_bitstring(cls, s: str) -> "SensorConfiguration":
        if not s or any(c not in "01" for c in s):
            raise InvariantError(f"bitstring must be nonempty and contain only 0/1, got {s!r}")
        return cls(tuple(int(c) for c in s))

    @classmethod
    def all_ones(cls, n: int) -> "SensorConfiguration":
        return cls((1,) * n)

    @classmethod
    def all_zeros(cls, n: int) -> "SensorConfiguration":
        return cls((0,) * n)

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def count(self) -> int:
        """Number of sensors present."""
        return sum(self.bits)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.bits, dtype=float)

    def bitstring(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class ExperimentRecord:
    """One ablation data point: (configuration, task, measured success rate)."""

    config_id: str
    config: SensorConfiguration
    task: str
    success_rate: float

    def __post_init__(self):
        object.__setattr__(self, "success_rate", float(self.success_rate))
        if not (0.0 <= self.success_rate <= 1.0):
            raise RangeError(
                f"record {self.config_id!r}: success_rate must be in [0, 1], got {self.success_rate}"
            )


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of records over one layout."""

    layout: SensorLayout
    records: tuple[ExperimentRecord, ...] = field(default=())

    def __post_init__(self):
        records = tuple(self.records)
        object.__setattr__(self, "records", records)
        if not records:
            raise EmptyDataset("a dataset must contain at least one record")
        for rec in records:
            if len(rec.config) != self.layout.n_sites:
                raise DimensionMismatch(
                    f"record {rec.config_id!r} has {len(rec.config)} bits, "
                    f"layout {self.layout.name!r} has {self.layout.n_sites} sites"
                )

    @property
    def n_records(self) -> int:
        return len(self.records)

    def design_matrix(self) -> np.ndarray:
        """(n_records, n_sites) float matrix of configuration bits."""
        return np.asarray([rec.config.bits for rec in self.records], dtype=float)

    def targets(self) -> np.ndarray:
        """(n_records,) vector of success rates."""
        return np.asarray([rec.success_rate for rec in self.records], dtype=float)


def _bit_columns(n: int) -> list[str]:
    return [f"s{i}" for i in range(n)]


def load_dataset(path, layout: SensorLayout) -> Dataset:
    """Load records from CSV with header config_id,task,success_rate,s0..s{N-1}."""
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows:
        raise ParseError(f"{path}: empty dataset file")
    header = rows[0]
    fixed = ["config_id", "task", "success_rate"]
    if header[:3] != fixed or header[3:] != _bit_columns(len(header) - 3):
        raise ParseError(
            f"{path}: bad header; expected 'config_id,task,success_rate,s0,...', got {','.join(header)!r}"
        )
    if len(header) - 3 != layout.n_sites:
        raise DimensionMismatch(
            f"{path}: {len(header) - 3} bit columns, layout {layout.name!r} has {layout.n_sites} sites"
        )
    expected_header = fixed + _bit_columns(layout.n_sites)
    if len(rows) == 1:
        raise ParseError(f"{path}: dataset has a header but no records")
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(expected_header):
            raise ParseError(f"{path}:{lineno}: expected {len(expected_header)} columns, got {len(row)}")
        config_id, task, rate_text = row[0], row[1], row[2]
        try:
            rate = float(rate_text)
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: success_rate {rate_text!r} is not a number") from exc
        bits = []
        for col, cell in zip(expected_header[3:], row[3:]):
            if cell not in ("0", "1"):
                raise ParseError(f"{path}:{lineno}: column {col} must be literal 0 or 1, got {cell!r}")
            bits.append(int(cell))
        records.append(
            ExperimentRecord(
                config_id=config_id,
                config=SensorConfiguration(tuple(bits)),
                task=task,
                success_rate=rate,
            )
        )
    return Dataset(layout=layout, records=tuple(records))


def save_dataset(dataset: Dataset, path) -> None:
    """Write CSV (LF endings); load_dataset round-trips bit-exactly."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["config_id", "task", "success_rate"] + _bit_columns(dataset.layout.n_sites))
    for rec in dataset.records:
        writer.writerow([rec.config_id, rec.task, repr(float(rec.success_rate)), *rec.config.bits])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def split(dataset: Dataset, validation_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic shuffled (train, validation) partition.

    The validation side gets max(1, round(fraction * n)) records (half-up
    rounding, capped at n-1 so both sides stay nonempty). Record order
    within each side follows the original dataset order.
    """
    n = dataset.n_records
    if n < 2:
        raise TooFewRecords(f"split needs at least 2 records, dataset has {n}")
    if not (0.0 < validation_fraction < 1.0):
        raise InvariantError(f"validation_fraction must be in (0, 1), got {validation_fraction}")
    n_val = max(1, int(np.floor(validation_fraction * n + 0.5)))
    n_val = min(n_val, n - 1)
    rng = np.random.Generator(np.random.PCG64(seed))
    perm = rng.permutation(n)
    val_idx = sorted(int(i) for i in perm[:n_val])
    train_idx = sorted(int(i) for i in perm[n_val:])
    train = Dataset(dataset.layout, tuple(dataset.records[i] for i in train_idx))
    val = Dataset(dataset.layout, tuple(dataset.records[i] for i in val_idx))
    return train, val


def random_configurations(layout: SensorLayout, count: int, seed: int) -> list[SensorConfiguration]:
    """`count` configurations with i.i.d. Bernoulli(0.5) bits (PCG64(seed))."""
    if count < 1:
        raise InvariantError(f"count must be >= 1, got {count}")
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.random((count, layout.n_sites)) < 0.5
    return [SensorConfiguration(tuple(int(b) for b in row)) for row in draws]

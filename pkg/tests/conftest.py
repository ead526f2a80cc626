import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from tactiplan.data import Dataset, ExperimentRecord, SensorConfiguration
from tactiplan.layout import Finger, Region, SensorLayout, SensorSite, builtin_shadow21

# enough distinct (finger, region) pairs for layouts up to 30 sites
_PLACEMENTS = [(f, r) for f in Finger for r in Region]


def make_layout(n: int, costs=None, name: str = "test") -> SensorLayout:
    """Small generic layout for tests; unit costs unless given."""
    if costs is None:
        costs = [1.0] * n
    sites = tuple(
        SensorSite(id=i, name=f"{f.value}.{r.value}", finger=f, region=r, cost=costs[i])
        for i, (f, r) in enumerate(_PLACEMENTS[:n])
    )
    return SensorLayout(name=name, sites=sites)


def make_dataset(layout: SensorLayout, bit_rows, rates, task="block", prefix="B") -> Dataset:
    records = tuple(
        ExperimentRecord(
            config_id=f"{prefix}_{i}",
            config=SensorConfiguration(tuple(bits)),
            task=task,
            success_rate=rate,
        )
        for i, (bits, rate) in enumerate(zip(bit_rows, rates))
    )
    return Dataset(layout=layout, records=records)


def random_dataset(layout: SensorLayout, n: int, seed: int, ensure_varied=False) -> Dataset:
    """Arbitrary records: Bernoulli bits, uniform success rates."""
    rng = np.random.Generator(np.random.PCG64(seed))
    rows = (rng.random((n, layout.n_sites)) < 0.5).astype(int)
    if ensure_varied:  # force every column to vary so no site is undefined
        rows[0, :] = 0
        rows[1, :] = 1
    rates = rng.random(n)
    return make_dataset(layout, [tuple(r) for r in rows], rates)


@pytest.fixture
def shadow21():
    return builtin_shadow21()


@pytest.fixture
def placement_study(shadow21):
    """15-row ablation-style dataset: all-ones baseline + 14 knockouts.

    Every site is removed in at least one knockout so no presence column
    is constant.
    """
    rng = np.random.Generator(np.random.PCG64(2024))
    rows = [(1,) * 21]
    rates = [0.365]
    for i in range(14):
        bits = [1] * 21
        for j in (3 * i, 3 * i + 1, 3 * i + 2):
            bits[j % 21] = 0
        rows.append(tuple(bits))
        rates.append(float(np.clip(0.36 + 0.05 * rng.standard_normal(), 0.25, 0.42)))
    return make_dataset(shadow21, rows, rates, prefix="B")

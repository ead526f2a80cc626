from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_dataset, make_layout, random_dataset
from tactiplan.data import (
    Dataset,
    ExperimentRecord,
    SensorConfiguration,
    load_dataset,
    random_configurations,
    save_dataset,
    split,
)
from tactiplan.errors import (
    DimensionMismatch,
    EmptyDataset,
    InvariantError,
    ParseError,
    RangeError,
    TooFewRecords,
)


class TestConfiguration:
    def test_rejects_non_binary(self):
        with pytest.raises(InvariantError):
            SensorConfiguration((0, 2, 1))

    @given(st.lists(st.integers(0, 1), min_size=1, max_size=30))
    def test_bitstring_round_trip(self, bits):
        config = SensorConfiguration(tuple(bits))
        assert SensorConfiguration.from_bitstring(config.bitstring()) == config

    def test_count(self):
        assert SensorConfiguration((1, 0, 1, 1)).count == 3


class TestRecordsAndDataset:
    def test_rate_out_of_range(self):
        with pytest.raises(RangeError):
            ExperimentRecord("x", SensorConfiguration((1,)), "block", 1.2)

    def test_empty_dataset_rejected(self):
        with pytest.raises(EmptyDataset):
            Dataset(make_layout(3), ())

    def test_config_length_checked(self):
        rec = ExperimentRecord("x", SensorConfiguration((1, 0)), "block", 0.5)
        with pytest.raises(DimensionMismatch):
            Dataset(make_layout(3), (rec,))


class TestCsvRoundTrip:
    def test_round_trip_bit_exact(self, tmp_path):
        layout = make_layout(5)
        ds = random_dataset(layout, 12, seed=3)
        path = tmp_path / "data.csv"
        save_dataset(ds, path)
        assert load_dataset(path, layout) == ds

    def test_fifteen_row_placement_file(self, tmp_path, shadow21, placement_study):
        path = tmp_path / "placement.csv"
        save_dataset(placement_study, path)
        loaded = load_dataset(path, shadow21)
        assert loaded.n_records == 15
        assert loaded == placement_study

    def test_out_of_range_rate_rejected(self, tmp_path):
        layout = make_layout(2)
        path = tmp_path / "bad.csv"
        path.write_text("config_id,task,success_rate,s0,s1\nB_1,block,1.2,0,1\n")
        with pytest.raises(RangeError):
            load_dataset(path, layout)

    def test_empty_file_rejected(self, tmp_path):
        layout = make_layout(2)
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ParseError):
            load_dataset(path, layout)

    def test_header_only_rejected(self, tmp_path):
        layout = make_layout(2)
        path = tmp_path / "header.csv"
        path.write_text("config_id,task,success_rate,s0,s1\n")
        with pytest.raises(ParseError):
            load_dataset(path, layout)

    def test_wrong_bit_count_is_dimension_mismatch(self, tmp_path):
        layout = make_layout(3)
        path = tmp_path / "narrow.csv"
        path.write_text("config_id,task,success_rate,s0,s1\nB_1,block,0.5,0,1\n")
        with pytest.raises(DimensionMismatch):
            load_dataset(path, layout)

    def test_non_binary_cell_rejected(self, tmp_path):
        layout = make_layout(2)
        path = tmp_path / "cell.csv"
        path.write_text("config_id,task,success_rate,s0,s1\nB_1,block,0.5,0,2\n")
        with pytest.raises(ParseError):
            load_dataset(path, layout)


class TestSplit:
    def test_fifteen_records_fraction_point_two(self, placement_study):
        train, val = split(placement_study, 0.2, seed=7)
        assert (train.n_records, val.n_records) == (12, 3)
        train_ids = {r.config_id for r in train.records}
        val_ids = {r.config_id for r in val.records}
        assert train_ids.isdisjoint(val_ids)

    def test_deterministic(self, placement_study):
        assert split(placement_study, 0.2, seed=7) == split(placement_study, 0.2, seed=7)

    def test_seeds_give_different_exact_partitions(self):
        layout = make_layout(4)
        ds = random_dataset(layout, 10, seed=1)
        all_ids = Counter(r.config_id for r in ds.records)
        partitions = []
        for seed in (1, 2):
            train, val = split(ds, 0.3, seed=seed)
            assert val.n_records == 3
            # exact partition: the two sides re-concatenate to the input multiset
            combined = Counter(r.config_id for r in train.records + val.records)
            assert combined == all_ids
            partitions.append(frozenset(r.config_id for r in val.records))
        assert partitions[0] != partitions[1]

    def test_too_few_records(self):
        layout = make_layout(2)
        ds = make_dataset(layout, [(0, 1)], [0.5])
        with pytest.raises(TooFewRecords):
            split(ds, 0.5, seed=0)

    def test_bad_fraction(self, placement_study):
        with pytest.raises(InvariantError):
            split(placement_study, 1.0, seed=0)

    @settings(max_examples=30, deadline=None)
    @given(
        n=st.integers(2, 40),
        fraction=st.floats(0.01, 0.99),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_partition_property(self, n, fraction, seed):
        layout = make_layout(3)
        ds = random_dataset(layout, n, seed=11)
        train, val = split(ds, fraction, seed=seed)
        assert train.n_records + val.n_records == n
        assert val.n_records >= 1 and train.n_records >= 1
        combined = Counter((r.config_id, r.config.bits, r.success_rate) for r in train.records + val.records)
        original = Counter((r.config_id, r.config.bits, r.success_rate) for r in ds.records)
        assert combined == original


class TestRandomConfigurations:
    def test_count_and_length(self, shadow21):
        configs = random_configurations(shadow21, 5, seed=13)
        assert len(configs) == 5
        assert all(len(c) == 21 for c in configs)

    def test_single(self, shadow21):
        (config,) = random_configurations(shadow21, 1, seed=99)
        assert set(config.bits) <= {0, 1}

    def test_deterministic(self, shadow21):
        assert random_configurations(shadow21, 10, seed=5) == random_configurations(shadow21, 10, seed=5)

    def test_bad_count(self, shadow21):
        with pytest.raises(InvariantError):
            random_configurations(shadow21, 0, seed=5)

    def test_per_bit_mean_near_half(self, shadow21):
        configs = random_configurations(shadow21, 10000, seed=77)
        bits = np.array([c.bits for c in configs], dtype=float)
        means = bits.mean(axis=0)
        assert np.all(means >= 0.47) and np.all(means <= 0.53)

import numpy as np
import pytest

from conftest import make_dataset, make_layout, random_dataset
from oracles import manual_fnn_forward
from tactiplan.data import ExperimentRecord, SensorConfiguration
from tactiplan.errors import DimensionMismatch, DivergenceError, InvariantError
from tactiplan.fnn import (
    HIDDEN,
    FnnModel,
    TrainSettings,
    fnn_forward,
    fnn_gradient_check,
    fnn_init,
    fnn_train,
    load_model,
    loss_trace_rows,
    save_model,
)


def params_equal(a: FnnModel, b: FnnModel) -> bool:
    return (
        all(np.array_equal(getattr(a, n), getattr(b, n)) for n in ("w1", "b1", "w2", "b2", "w3"))
        and a.b3 == b.b3
    )


def random_model(n_inputs: int, seed: int, scale: float = 0.5) -> FnnModel:
    """Model with nonzero biases so gradient checks exercise every parameter."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return FnnModel(
        w1=scale * rng.normal(size=(HIDDEN, n_inputs)),
        b1=scale * rng.normal(size=HIDDEN),
        w2=scale * rng.normal(size=(HIDDEN, HIDDEN)),
        b2=scale * rng.normal(size=HIDDEN),
        w3=scale * rng.normal(size=(1, HIDDEN)),
        b3=float(scale * rng.normal()),
        seed=seed,
    )


class TestInit:
    def test_deterministic(self):
        assert params_equal(fnn_init(21, 7), fnn_init(21, 7))

    def test_seed_sensitivity(self):
        assert not np.array_equal(fnn_init(21, 7).w1, fnn_init(21, 8).w1)

    def test_zero_input_passes_through_to_output_bias(self):
        model = fnn_init(21, 3)
        assert fnn_forward(model, SensorConfiguration.all_zeros(21)) == model.b3 == 0.0

    def test_bad_size(self):
        with pytest.raises(InvariantError):
            fnn_init(0, 1)

    def test_he_scaling(self):
        model = fnn_init(1000, 5)
        assert np.std(model.w1) == pytest.approx(np.sqrt(2.0 / 1000), rel=0.1)


class TestForward:
    def test_matches_manual_composition(self):
        for seed in range(10):
            model = random_model(4, seed)
            bits = tuple(int(b) for b in np.random.Generator(np.random.PCG64(seed + 40)).integers(0, 2, 4))
            expected = manual_fnn_forward(
                model.w1, model.b1, model.w2, model.b2, model.w3, model.b3, [float(b) for b in bits]
            )
            assert fnn_forward(model, SensorConfiguration(bits)) == pytest.approx(expected, abs=1e-12)

    def test_all_zero_weights_give_output_bias(self):
        model = FnnModel(
            w1=np.zeros((HIDDEN, 3)), b1=np.zeros(HIDDEN),
            w2=np.zeros((HIDDEN, HIDDEN)), b2=np.zeros(HIDDEN),
            w3=np.zeros((1, HIDDEN)), b3=0.7, seed=0,
        )
        assert fnn_forward(model, SensorConfiguration((1, 0, 1))) == 0.7

    def test_relu_kills_negative_preactivations(self):
        model = FnnModel(
            w1=-np.ones((HIDDEN, 2)), b1=-np.ones(HIDDEN),
            w2=np.ones((HIDDEN, HIDDEN)), b2=-np.ones(HIDDEN),
            w3=np.ones((1, HIDDEN)), b3=0.25, seed=0,
        )
        assert fnn_forward(model, SensorConfiguration((1, 1))) == 0.25

    def test_piecewise_linear_with_zero_biases(self):
        # fnn_init has zero biases, so a fixed activation pattern scales linearly
        model = fnn_init(5, 11)
        x = np.array([1.0, 0.0, 1.0, 1.0, 0.0])

        def forward_raw(vec):
            z1 = np.maximum(model.w1 @ vec + model.b1, 0.0)
            z2 = np.maximum(model.w2 @ z1 + model.b2, 0.0)
            return float(model.w3[0] @ z2 + model.b3)

        assert forward_raw(2.0 * x) == pytest.approx(2.0 * forward_raw(x), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            fnn_forward(fnn_init(3, 1), SensorConfiguration((1, 0)))


class TestTrain:
    def test_memorizes_single_record(self):
        layout = make_layout(5)
        ds = make_dataset(layout, [(1, 0, 1, 1, 0)], [0.4])
        model, trace = fnn_train(fnn_init(5, 7), ds, TrainSettings(learning_rate=0.01, epochs=5000))
        assert trace[-1] < 1e-6
        assert fnn_forward(model, ds.records[0].config) == pytest.approx(0.4, abs=1e-3)

    def test_divergence_raises(self):
        layout = make_layout(4)
        ds = random_dataset(layout, 6, seed=2)
        with pytest.raises(DivergenceError):
            fnn_train(fnn_init(4, 1), ds, TrainSettings(learning_rate=1e6, epochs=50))

    def test_deterministic(self):
        layout = make_layout(6)
        ds = random_dataset(layout, 10, seed=5)
        a, trace_a = fnn_train(fnn_init(6, 3), ds, TrainSettings(epochs=200))
        b, trace_b = fnn_train(fnn_init(6, 3), ds, TrainSettings(epochs=200))
        assert params_equal(a, b)
        assert trace_a == trace_b

    def test_trace_has_epochs_plus_one_entries(self):
        layout = make_layout(3)
        ds = random_dataset(layout, 5, seed=9)
        _, trace = fnn_train(fnn_init(3, 2), ds, TrainSettings(epochs=17))
        assert len(trace) == 18
        assert all(np.isfinite(v) for v in trace)

    def test_trace_rows(self):
        rows = loss_trace_rows([0.5, 0.25])
        assert rows == [[0, 0.5], [1, 0.25]]

    def test_bad_settings(self):
        with pytest.raises(InvariantError):
            TrainSettings(learning_rate=0.0)
        with pytest.raises(InvariantError):
            TrainSettings(epochs=0)


class TestGradientCheck:
    def test_random_pairs_pass(self):
        rng = np.random.Generator(np.random.PCG64(123))
        worst = 0.0
        for seed in range(20):
            model = random_model(6, seed)
            bits = tuple(int(b) for b in rng.integers(0, 2, 6))
            record = ExperimentRecord("g", SensorConfiguration(bits), "t", float(rng.random()))
            worst = max(worst, fnn_gradient_check(model, record))
        assert worst < 1e-4

    def test_zero_gradient_at_perfect_prediction(self):
        base = random_model(4, 3)
        config = SensorConfiguration((1, 0, 1, 1))
        # shift the output bias so the prediction is exactly 0.5
        shift = 0.5 - fnn_forward(base, config)
        model = FnnModel(
            w1=base.w1, b1=base.b1, w2=base.w2, b2=base.b2, w3=base.w3,
            b3=base.b3 + shift, seed=base.seed,
        )
        record = ExperimentRecord("p", config, "t", fnn_forward(model, config))
        assert record.success_rate == 0.5
        assert fnn_gradient_check(model, record) < 1e-6

    def test_kink_sitting_unit_is_excluded(self):
        # first hidden unit has exactly zero preactivation for every input
        model = random_model(3, 8)
        w1 = np.array(model.w1)
        b1 = np.array(model.b1)
        w1[0, :] = 0.0
        b1[0] = 0.0
        kinked = FnnModel(w1=w1, b1=b1, w2=model.w2, b2=model.b2, w3=model.w3, b3=model.b3, seed=0)
        record = ExperimentRecord("k", SensorConfiguration((1, 1, 0)), "t", 0.3)
        assert fnn_gradient_check(kinked, record) < 1e-4

    def test_dimension_mismatch(self):
        record = ExperimentRecord("d", SensorConfiguration((1, 0)), "t", 0.5)
        with pytest.raises(DimensionMismatch):
            fnn_gradient_check(fnn_init(3, 1), record)


class TestSerialization:
    def test_json_round_trip(self, tmp_path):
        model = random_model(5, 21)
        path = tmp_path / "model.json"
        save_model(model, path)
        assert params_equal(load_model(path), model)

import numpy as np
import pytest

from conftest import make_dataset, make_layout, random_dataset
from oracles import normal_equations_ols, pinv_ols
from tactiplan.data import SensorConfiguration
from tactiplan.errors import DimensionMismatch, TooFewRecords
from tactiplan.regression import RegressionFit, fit_ols, load_fit, predict_ols, save_fit


class TestFitOls:
    def test_two_point_anchor_interpolation(self):
        layout = make_layout(1)
        ds = make_dataset(layout, [(0,), (1,)], [0.28, 0.392])
        fit = fit_ols(ds)
        assert fit.intercept == pytest.approx(0.28, abs=1e-12)
        assert fit.coefficients[0] == pytest.approx(0.112, abs=1e-12)
        assert fit.training_rmse == pytest.approx(0.0, abs=1e-12)
        assert not fit.rank_deficient

    def test_constant_target_full_rank(self):
        layout = make_layout(2)
        ds = make_dataset(layout, [(0, 0), (1, 0), (0, 1), (1, 1)], [0.3, 0.3, 0.3, 0.3])
        fit = fit_ols(ds)
        assert fit.intercept == pytest.approx(0.3, abs=1e-12)
        assert np.allclose(fit.coefficients, 0.0, atol=1e-12)
        assert fit.training_rmse == pytest.approx(0.0, abs=1e-12)

    def test_rank_deficient_matches_pinv_oracle(self, shadow21):
        ds = random_dataset(shadow21, 15, seed=4)
        fit = fit_ols(ds)
        assert fit.rank_deficient
        X = ds.design_matrix()
        beta = pinv_ols(X, ds.targets())
        fitted = fit.intercept + X @ fit.coefficients
        oracle_fitted = np.hstack([np.ones((15, 1)), X]) @ beta
        assert np.allclose(fitted, oracle_fitted, atol=1e-8)

    def test_full_rank_matches_normal_equations(self):
        layout = make_layout(4)
        ds = random_dataset(layout, 30, seed=8, ensure_varied=True)
        fit = fit_ols(ds)
        beta = normal_equations_ols(ds.design_matrix(), ds.targets())
        assert fit.intercept == pytest.approx(beta[0], abs=1e-9)
        assert np.allclose(fit.coefficients, beta[1:], atol=1e-9)

    def test_too_few_records(self):
        layout = make_layout(2)
        ds = make_dataset(layout, [(0, 1)], [0.5])
        with pytest.raises(TooFewRecords):
            fit_ols(ds)


class TestPredictOls:
    def test_interpolates_training_points(self):
        layout = make_layout(1)
        fit = fit_ols(make_dataset(layout, [(0,), (1,)], [0.28, 0.392]))
        assert predict_ols(fit, SensorConfiguration((1,))) == pytest.approx(0.392, abs=1e-12)
        assert predict_ols(fit, SensorConfiguration((0,))) == pytest.approx(fit.intercept, abs=0)

    def test_matches_dot_product_oracle(self):
        rng = np.random.Generator(np.random.PCG64(17))
        for _ in range(20):
            n = int(rng.integers(1, 12))
            fit = RegressionFit(
                intercept=float(rng.normal()),
                coefficients=rng.normal(size=n),
                training_rmse=0.0,
                rank_deficient=False,
            )
            bits = tuple(int(b) for b in rng.integers(0, 2, n))
            expected = fit.intercept + sum(c * b for c, b in zip(fit.coefficients, bits))
            assert predict_ols(fit, SensorConfiguration(bits)) == pytest.approx(expected, abs=1e-12)

    def test_dimension_mismatch(self):
        fit = RegressionFit(0.0, np.array([0.1, 0.2]), 0.0, False)
        with pytest.raises(DimensionMismatch):
            predict_ols(fit, SensorConfiguration((1,)))


class TestProperties:
    def test_residual_orthogonality_full_rank(self):
        layout = make_layout(5)
        ds = random_dataset(layout, 40, seed=12, ensure_varied=True)
        fit = fit_ols(ds)
        X = ds.design_matrix()
        A = np.hstack([np.ones((40, 1)), X])
        residual = ds.targets() - (fit.intercept + X @ fit.coefficients)
        assert np.all(np.abs(A.T @ residual) < 1e-8)

    def test_duplicated_rows_same_coefficients(self):
        layout = make_layout(6)
        ds = random_dataset(layout, 9, seed=30)
        doubled = make_dataset(
            layout,
            [r.config.bits for r in ds.records] * 2,
            [r.success_rate for r in ds.records] * 2,
        )
        fit, fit2 = fit_ols(ds), fit_ols(doubled)
        assert fit.intercept == pytest.approx(fit2.intercept, abs=1e-10)
        assert np.allclose(fit.coefficients, fit2.coefficients, atol=1e-10)

    def test_rmse_never_beats_constant_model_backwards(self):
        for seed in range(10):
            layout = make_layout(4)
            ds = random_dataset(layout, 12, seed=seed + 50)
            fit = fit_ols(ds)
            assert fit.training_rmse <= np.std(ds.targets()) + 1e-12


class TestRidge:
    def test_zero_ridge_equals_plain(self):
        layout = make_layout(3)
        ds = random_dataset(layout, 20, seed=9, ensure_varied=True)
        assert np.allclose(fit_ols(ds).coefficients, fit_ols(ds, ridge=0.0).coefficients)

    def test_ridge_shrinks_coefficients(self):
        layout = make_layout(3)
        ds = random_dataset(layout, 20, seed=9, ensure_varied=True)
        plain = np.linalg.norm(fit_ols(ds).coefficients)
        shrunk = np.linalg.norm(fit_ols(ds, ridge=10.0).coefficients)
        assert shrunk < plain

    def test_intercept_not_penalized(self):
        layout = make_layout(2)
        ds = make_dataset(layout, [(0, 0), (1, 0), (0, 1), (1, 1)], [0.3, 0.3, 0.3, 0.3])
        fit = fit_ols(ds, ridge=5.0)
        assert fit.intercept == pytest.approx(0.3, abs=1e-10)
        assert np.allclose(fit.coefficients, 0.0, atol=1e-10)

    def test_negative_ridge_rejected(self):
        layout = make_layout(2)
        ds = random_dataset(layout, 5, seed=1)
        with pytest.raises(ValueError):
            fit_ols(ds, ridge=-1.0)


class TestSerialization:
    def test_json_round_trip(self, tmp_path):
        layout = make_layout(3)
        fit = fit_ols(random_dataset(layout, 10, seed=2))
        path = tmp_path / "fit.json"
        save_fit(fit, path)
        restored = load_fit(path)
        assert restored.intercept == fit.intercept
        assert np.array_equal(restored.coefficients, fit.coefficients)
        assert restored.training_rmse == fit.training_rmse
        assert restored.rank_deficient == fit.rank_deficient

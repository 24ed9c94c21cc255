"""α 估計、成本模型公式、查詢難度與 Pareto 分析。"""

import io
import logging
import math

import numpy as np
import pytest
from scipy import integrate

from tailbound.analytics import (
    dkw_confidence,
    effective_alpha,
    empirical_constant,
    estimate_alpha,
    expected_cost_fraction,
    expected_speedup,
    margin,
    mean_tail_curve,
    normal_quantile,
    pareto_denoise,
    pareto_frontier,
    pruning_dimension,
    recall_at_k,
    relative_contrast,
    speedup_at_recall,
    threshold_bounds,
    uniform_epsilon,
)
from tailbound.bounds.levels import LevelSpec
from tailbound.bounds.tails import TransformedDataset
from tailbound.exceptions import DimensionMismatchError, InvalidParameterError, NoUsableVectorsError


def _exponential_tail_rows(d: int, alpha: float, n: int = 3) -> np.ndarray:
    """尾部能量比例恰為 exp(−αℓ/d) 的向量。"""
    tail = np.exp(-alpha * np.arange(d + 1) / d)
    energy = tail[:-1] - tail[1:]
    energy[-1] += tail[-1]
    return np.tile(np.sqrt(energy), (n, 1))


class TestEstimateAlpha:
    def test_exponential_decay_recovers_alpha(self):
        report = estimate_alpha(_exponential_tail_rows(100, 8.0))
        for p, a in report.alpha_p.items():
            assert a == pytest.approx(8.0, abs=1e-6), p
        assert report.alpha_hat == pytest.approx(8.0, abs=1e-6)
        assert report.predicted_fraction == pytest.approx(0.125, abs=1e-6)

    @pytest.mark.parametrize("alpha", [0.5, 2.0, 8.0, 30.0])
    def test_recovers_alpha_across_decay_rates(self, alpha):
        report = estimate_alpha(_exponential_tail_rows(100, alpha))
        assert report.alpha_hat == pytest.approx(alpha, rel=1e-6)
        assert report.mean_tail_ratio[50] == pytest.approx(math.exp(-alpha / 2), rel=1e-9)

    def test_white_noise_has_no_compaction(self):
        data = np.random.default_rng(0).standard_normal((4000, 64))
        report = estimate_alpha(data, p_values=[0.5])
        assert report.alpha_p[0.5] == pytest.approx(2 * math.log(2), abs=0.05)

    def test_accepts_transformed_dataset(self, gaussian_data):
        ds = TransformedDataset.from_vectors(gaussian_data, LevelSpec.default(16))
        report = estimate_alpha(ds)
        assert report.n_vectors == 600
        assert report.dim == 16

    def test_curve_is_monotone_with_fixed_ends(self, compact_data):
        curve = mean_tail_curve(compact_data)
        assert curve[0] == 1.0
        assert curve[-1] == 0.0
        assert np.all(np.diff(curve) <= 0)

    def test_fully_compacted_p_is_excluded(self, caplog):
        data = np.zeros((4, 10))
        data[:, :2] = 1.0
        with caplog.at_level(logging.WARNING, logger="tailbound"):
            report = estimate_alpha(data)
        assert math.isinf(report.alpha_p[0.25])
        assert math.isinf(report.alpha_p[0.5])
        assert report.excluded_p == [0.25, 0.5]
        assert report.alpha_hat == pytest.approx(-math.log(0.5) / 0.1)
        assert "α_p = +∞" in caplog.text

    def test_zero_rows_are_skipped(self):
        data = np.vstack([_exponential_tail_rows(20, 4.0, n=2), np.zeros((3, 20))])
        assert estimate_alpha(data).n_vectors == 2
        with pytest.raises(NoUsableVectorsError):
            estimate_alpha(np.zeros((3, 20)))

    def test_invalid_p(self):
        with pytest.raises(InvalidParameterError):
            estimate_alpha(np.ones((2, 4)), p_values=[1.0])
        with pytest.raises(InvalidParameterError):
            estimate_alpha(np.ones((2, 4)), p_values=[])

    def test_csv_output(self):
        buf = io.StringIO()
        estimate_alpha(_exponential_tail_rows(10, 3.0)).to_csv(buf)
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == "ell,mean_tail_ratio"
        assert len(lines) == 1 + 11 + 1
        assert lines[-1].startswith("# alpha_0.1=")
        assert "alpha_hat=" in lines[-1]


class TestTheory:
    def test_speedup_table(self):
        assert expected_speedup(1.0, 0.1) == pytest.approx(10.0)
        assert expected_speedup(0.8, 0.1) == pytest.approx(3.5714, abs=1e-4)
        assert expected_speedup(0.0, 0.3) == pytest.approx(1.0)
        with pytest.raises(InvalidParameterError):
            expected_speedup(0.5, 0.0)

    def test_effective_alpha(self):
        assert effective_alpha(0.0, 8.0) == 4.0
        assert effective_alpha(3.0, 5.0) == 4.0
        with pytest.raises(InvalidParameterError):
            effective_alpha(-1.0, 2.0)

    def test_cost_fraction_and_constant(self):
        assert expected_cost_fraction(8.0) == pytest.approx(0.125)
        assert empirical_constant(0.25, 4.0) == pytest.approx(1.0)
        with pytest.raises(InvalidParameterError):
            expected_cost_fraction(0.0)

    def test_margin(self):
        assert margin(9, 5, 2.0, 0.0) == pytest.approx(0.0, abs=1e-12)
        assert margin(9, 1, 1.0, 0.0586553) == pytest.approx(1.0, abs=1e-5)
        assert margin(9, 1, 0.0, 0.2) == 0.0
        with pytest.raises(InvalidParameterError):
            margin(3, 4, 1.0, 0.0)

    def test_pruning_dimension(self):
        assert pruning_dimension(4 / math.e, 4.0, 5.0, 100) == pytest.approx(20.0)
        assert pruning_dimension(8.0, 4.0, 5.0, 100) == 0.0
        assert pruning_dimension(1e-30, 4.0, 1.0, 10) == 10.0

    @pytest.mark.parametrize("x", [-2.5, -1.0, 0.3, 1.7])
    def test_normal_quantile_against_integral(self, x):
        prob, _ = integrate.quad(
            lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi), -np.inf, x, epsabs=1e-14, epsrel=1e-13
        )
        assert normal_quantile(prob) == pytest.approx(x, abs=1e-8)

    def test_threshold_bounds(self):
        assert threshold_bounds(99, 10, 3.0, 0.0, 0.05) == (3.0, 3.0)
        lo, hi = threshold_bounds(99, 10, 0.0, 1.0, 0.05)
        assert lo == pytest.approx(-1.6449, abs=1e-4)
        assert hi == pytest.approx(-1.0364, abs=1e-4)
        lo, hi = threshold_bounds(9, 5, 0.0, 1.0, 0.6)
        assert lo == -math.inf
        assert hi == math.inf

    def test_dkw_confidence(self):
        assert dkw_confidence(100, 0.1) == pytest.approx(1.0 - 2.0 * math.exp(-2.0), abs=1e-12)
        assert dkw_confidence(1000, 0.05) == pytest.approx(0.986524, abs=1e-6)
        # ε 太小時下限截到 0
        assert dkw_confidence(10, 0.01) == 0.0
        assert dkw_confidence(50, 0.2) > dkw_confidence(10, 0.2)
        with pytest.raises(InvalidParameterError):
            dkw_confidence(0, 0.1)
        with pytest.raises(InvalidParameterError):
            dkw_confidence(10, 0.0)

    def test_uniform_epsilon(self):
        assert uniform_epsilon(1000, 100, 0.05) == pytest.approx(math.sqrt(math.log(4000) / 2000))
        with pytest.raises(InvalidParameterError):
            uniform_epsilon(1000, 100, 1.0)


class TestQueryMetrics:
    def setup_method(self):
        self.points = np.arange(4, dtype=np.float64).reshape(4, 1)

    def test_relative_contrast(self):
        assert relative_contrast([0.0], self.points, 2) == pytest.approx(1.5)
        assert math.isinf(relative_contrast([0.0], self.points, 1))

    def test_relative_contrast_invalid(self):
        with pytest.raises(InvalidParameterError):
            relative_contrast([0.0], self.points, 4)
        with pytest.raises(DimensionMismatchError):
            relative_contrast([0.0, 1.0], self.points, 1)

    def test_recall(self):
        assert recall_at_k([1, 2, 3], [3, 2, 9]) == pytest.approx(2 / 3)
        assert recall_at_k(np.array([5]), np.array([5])) == 1.0
        with pytest.raises(InvalidParameterError):
            recall_at_k([1], [])


class TestPareto:
    def test_frontier(self):
        points = [(0.9, 100.0), (0.9, 90.0), (0.8, 80.0), (0.7, 150.0)]
        assert pareto_frontier(points) == [(0.9, 100.0), (0.7, 150.0)]

    def test_denoise(self):
        points = [(0.9, 100.0), (0.8, 110.0), (0.7, 130.0)]
        assert pareto_denoise(points, 1.2) == [(0.9, 100.0), (0.7, 130.0)]
        with pytest.raises(InvalidParameterError):
            pareto_denoise(points, 1.0)

    def test_speedup_at_recall(self):
        base = [(0.5, 100.0), (0.9, 50.0)]
        pruned = [(0.5, 200.0), (0.9, 100.0)]
        samples = speedup_at_recall(base, pruned, n_samples=5)
        assert [r for r, _ in samples] == pytest.approx([0.5, 0.6, 0.7, 0.8, 0.9])
        assert all(s == pytest.approx(2.0) for _, s in samples)

    def test_speedup_needs_overlap(self):
        with pytest.raises(InvalidParameterError):
            speedup_at_recall([(0.1, 10.0), (0.2, 5.0)], [(0.5, 10.0), (0.6, 5.0)])
        with pytest.raises(InvalidParameterError):
            speedup_at_recall([(0.5, 10.0)], [(0.5, 10.0), (0.6, 5.0)])

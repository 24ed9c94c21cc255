"""Flat 索引測試。"""

import numpy as np
import pytest

from tailbound.bench.groundtruth import ground_truth
from tailbound.config.constants import EngineVariant, IndexKind, SearchMode
from tailbound.config.settings import EngineConfig
from tailbound.exceptions import EmptyIndexError, InvalidParameterError
from tailbound.index.flat import build_flat, flat_search


class TestFlatIndex:
    def test_kind_and_size(self, gaussian_data):
        index = build_flat(gaussian_data)
        assert index.kind == IndexKind.FLAT
        assert len(index) == 600
        assert index.levels.n_levels == 16

    @pytest.mark.parametrize("variant", list(EngineVariant))
    def test_modes_agree_with_ground_truth(self, gaussian_data, gaussian_queries, variant):
        batch = 1 if variant == EngineVariant.POINT_CENTRIC else 128
        index = build_flat(gaussian_data, engine=EngineConfig(variant=variant, batch_size=batch))
        truth = ground_truth(gaussian_data, gaussian_queries, 10)
        for i, q in enumerate(gaussian_queries):
            progressive = flat_search(index, q, 10, SearchMode.PROGRESSIVE)
            baseline = flat_search(index, q, 10, SearchMode.BASELINE)
            assert set(progressive.ids.tolist()) == set(truth[i].tolist())
            np.testing.assert_array_equal(np.sort(baseline.ids), np.sort(truth[i]))

    def test_learned_transform_keeps_exactness(self, compact_data, pca_model):
        index = build_flat(compact_data[:600], model=pca_model)
        truth = ground_truth(compact_data[:600], compact_data[600:], 10)
        for i, q in enumerate(compact_data[600:]):
            assert set(index.search(q, 10).ids.tolist()) == set(truth[i].tolist())

    def test_baseline_phi_is_one(self, gaussian_data):
        result = flat_search(build_flat(gaussian_data), gaussian_data[3], 5, SearchMode.BASELINE)
        assert result.counter.phi == pytest.approx(1.0)
        assert result.ids[0] == 3

    def test_invalid_k(self, gaussian_data):
        with pytest.raises(InvalidParameterError):
            flat_search(build_flat(gaussian_data), gaussian_data[0], 0)

    def test_empty(self):
        with pytest.raises(EmptyIndexError):
            build_flat(np.empty((0, 4)))

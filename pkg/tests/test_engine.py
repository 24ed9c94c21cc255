"""結果堆與 refinement 引擎測試。"""

import math
import importlib

import numpy as np
import pytest

from tailbound.bench.groundtruth import exact_knn
from tailbound.bounds.levels import LevelSpec
from tailbound.bounds.tails import TransformedDataset, precompute_tails, transform_query
from tailbound.config.constants import EngineVariant
from tailbound.config.settings import EngineConfig
from tailbound.engine.counters import WorkCounter
from tailbound.engine.heap import EntryKind, ResultHeap
from tailbound.engine.refine import (
    iter_candidates,
    refine,
    refine_batches,
    refine_candidate,
    refine_point_centric,
    work_counter,
)
from tailbound.exceptions import DimensionMismatchError, EmptyCandidateSetError, InvalidParameterError
from tailbound.storage.layout import build_batches

VARIANTS = [
    EngineConfig(variant=EngineVariant.POINT_CENTRIC, batch_size=1),
    EngineConfig(variant=EngineVariant.BATCH_NOUB, batch_size=64),
    EngineConfig(variant=EngineVariant.BATCH_UB, batch_size=64),
]


class TestResultHeap:
    def setup_method(self):
        self.heap = ResultHeap(3)

    def test_threshold_infinite_until_full(self):
        self.heap.push_exact(1, 5.0)
        self.heap.push_exact(2, 1.0)
        assert self.heap.threshold == math.inf
        self.heap.push_exact(3, 3.0)
        assert self.heap.threshold == 5.0

    def test_keeps_k_smallest(self):
        for i, d in enumerate([9.0, 1.0, 7.0, 3.0, 5.0]):
            self.heap.push_exact(i, d)
        assert self.heap.results() == [(1, 1.0), (3, 3.0), (4, 5.0)]

    def test_tie_prefers_smaller_id(self):
        for i in (4, 2, 8, 6):
            self.heap.push_exact(i, 1.0)
        assert [i for i, _ in self.heap.results()] == [2, 4, 6]

    def test_upper_superseded_by_exact(self):
        self.heap.push_upper(7, 4.0)
        assert self.heap.kind_of(7) == EntryKind.UPPER
        self.heap.push_exact(7, 2.5)
        assert self.heap.kind_of(7) == EntryKind.EXACT
        assert self.heap.results() == [(7, 2.5)]

    def test_evict_upper_only(self):
        self.heap.push_upper(1, 4.0)
        self.heap.push_exact(2, 3.0)
        assert self.heap.evict(1)
        assert not self.heap.evict(2)
        assert 1 not in self.heap
        assert len(self.heap) == 1

    def test_results_reject_pending_upper(self):
        self.heap.push_upper(1, 4.0)
        with pytest.raises(InvalidParameterError):
            self.heap.results()

    def test_invalid_k(self):
        with pytest.raises(InvalidParameterError):
            ResultHeap(0)


class TestWorkCounter:
    def test_phi(self):
        counter = WorkCounter(dim=10)
        counter.charge(4, 10)
        counter.charge(6, 2)
        counter.candidates = 10
        assert counter.phi == pytest.approx(0.52)

    def test_record_pruned(self):
        counter = WorkCounter(dim=4, record_pruned=True)
        counter.mark_pruned(np.array([3, 5]))
        assert counter.pruned == 2
        assert counter.pruned_ids == [3, 5]


class TestRefineCandidate:
    def setup_method(self):
        self.spec = LevelSpec.equal_width(8, 4)
        rng = np.random.default_rng(0)
        self.q = precompute_tails(rng.standard_normal(8), self.spec)
        self.x = precompute_tails(rng.standard_normal(8) + 3.0, self.spec)
        self.exact = float(np.sum((self.q.coeffs - self.x.coeffs) ** 2))

    def test_infinite_threshold_runs_all_levels(self):
        state, consumed = refine_candidate(self.q, self.x, self.spec, math.inf)
        assert not state.pruned
        assert consumed == 8
        assert state.lb == pytest.approx(self.exact)

    def test_zero_threshold_prunes_at_level_zero(self):
        state, consumed = refine_candidate(self.q, self.x, self.spec, 0.0)
        assert state.pruned
        assert state.level == 0
        assert consumed == 0


def _oracle(data, q, k):
    ids, _ = exact_knn(data, q, k)
    return set(ids.tolist())


class TestRefineExactness:
    @pytest.mark.parametrize("config", VARIANTS, ids=lambda c: c.variant.value)
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_brute_force(self, config, seed):
        rng = np.random.default_rng(seed)
        data = rng.standard_normal((400, 16)) * np.exp(-np.arange(16) / 4)
        queries = rng.standard_normal((5, 16)) * np.exp(-np.arange(16) / 4)
        spec = LevelSpec.equal_width(16, 8)
        ds = TransformedDataset.from_vectors(data, spec)
        batches = build_batches(ds, config.batch_size)
        for q in queries:
            result = refine(transform_query(q, spec), batches, 10, config, record_pruned=True)
            assert set(result.ids.tolist()) == _oracle(ds.coeffs, q, 10)
            assert np.all(np.diff(result.distances) >= 0)
            # 真正的近鄰從未被剪枝
            assert not set(result.counter.pruned_ids) & set(result.ids.tolist())

    def test_distances_are_exact(self, gaussian_data, levels16):
        ds = TransformedDataset.from_vectors(gaussian_data, levels16)
        q = gaussian_data[0] + 0.01
        result = refine(transform_query(q, levels16), build_batches(ds, 32), 5)
        expected = np.sum((ds.coeffs[result.ids].astype(np.float64) - q) ** 2, axis=1)
        np.testing.assert_allclose(result.distances, expected, rtol=1e-6)

    def test_k_larger_than_candidates(self, gaussian_data, levels16):
        ds = TransformedDataset.from_vectors(gaussian_data[:7], levels16)
        result = refine(transform_query(gaussian_data[10], levels16), build_batches(ds, 4), 10)
        assert sorted(result.ids.tolist()) == list(range(7))

    def test_variants_agree_on_ids(self, compact_data, pca_model):
        spec = LevelSpec.default(32)
        ds = TransformedDataset.from_vectors(compact_data[:600], spec, pca_model)
        qv = transform_query(compact_data[605], spec, pca_model)
        ids = [refine(qv, build_batches(ds, c.batch_size), 10, c).ids.tolist() for c in VARIANTS]
        assert ids[0] == ids[1] == ids[2]


class _RecordingHeap(ResultHeap):
    """每次更新後記錄 d_k。"""

    created: list["_RecordingHeap"] = []

    def __init__(self, k: int):
        super().__init__(k)
        self.trace: list[float] = []
        _RecordingHeap.created.append(self)

    def push_exact(self, cand_id: int, dist: float) -> bool:
        kept = super().push_exact(cand_id, dist)
        self.trace.append(self.threshold)
        return kept

    def push_upper(self, cand_id: int, bound: float) -> bool:
        kept = super().push_upper(cand_id, bound)
        self.trace.append(self.threshold)
        return kept

    def evict(self, cand_id: int) -> bool:
        removed = super().evict(cand_id)
        self.trace.append(self.threshold)
        return removed


class TestIntegerGridTies:
    """整數格點資料：距離全為整數、大量重複點，第 k 名常有同距離。"""

    def setup_method(self):
        rng = np.random.default_rng(13)
        base = rng.integers(-1, 2, size=(80, 6)).astype(np.float64)
        self.data = np.vstack([base, base[:40], base[:20]])
        self.queries = rng.integers(-1, 2, size=(12, 6)).astype(np.float64)
        self.spec = LevelSpec.equal_width(6, 3)
        self.ds = TransformedDataset.from_vectors(self.data, self.spec)
        _RecordingHeap.created = []

    @pytest.mark.parametrize("config", VARIANTS, ids=lambda c: c.variant.value)
    @pytest.mark.parametrize("k", [1, 5, 10])
    def test_ties_broken_by_id(self, config, k):
        batches = build_batches(self.ds, config.batch_size)
        for q in self.queries:
            expected_ids, expected_dists = exact_knn(self.data, q, k)
            result = refine(transform_query(q, self.spec), batches, k, config)
            assert result.ids.tolist() == expected_ids.tolist()
            np.testing.assert_array_equal(result.distances, expected_dists)

    def test_kth_distance_is_tied(self):
        # 確認資料確實在第 k 名產生同距離
        tied = 0
        for q in self.queries:
            dists = np.sort(((self.data - q) ** 2).sum(axis=1))
            tied += int(dists[4] == dists[5])
        assert tied > 0

    @pytest.mark.parametrize("config", VARIANTS, ids=lambda c: c.variant.value)
    def test_threshold_never_increases(self, config, mocker):
        mocker.patch.object(importlib.import_module("tailbound.engine.refine"), "ResultHeap", _RecordingHeap)
        batches = build_batches(self.ds, config.batch_size)
        for q in self.queries:
            refine(transform_query(q, self.spec), batches, 5, config)
        assert len(_RecordingHeap.created) == len(self.queries)
        for heap in _RecordingHeap.created:
            assert heap.trace
            assert all(later <= earlier for earlier, later in zip(heap.trace, heap.trace[1:]))
            assert heap.trace[-1] < math.inf


class TestWorkAccounting:
    def test_seed_candidates_charged_fully(self, levels16):
        ds = TransformedDataset.from_vectors(np.eye(16)[:3], levels16)
        result = refine_batches(transform_query(np.zeros(16), levels16), build_batches(ds, 8), 3)
        terms, phi = work_counter(result)
        assert terms == 3 * 16
        assert phi == pytest.approx(1.0)

    def test_compacted_data_prunes(self, compact_data, pca_model):
        spec = LevelSpec.default(32)
        ds = TransformedDataset.from_vectors(compact_data[:600], spec, pca_model)
        qv = transform_query(compact_data[610], spec, pca_model)
        result = refine(qv, build_batches(ds, 64), 10)
        assert result.counter.candidates == 600
        assert 0.0 < result.counter.phi < 1.0
        assert result.counter.pruned > 0

    def test_point_centric_stream(self, gaussian_data, levels16):
        ds = TransformedDataset.from_vectors(gaussian_data[:100], levels16)
        stream = iter_candidates(build_batches(ds, 1))
        result = refine_point_centric(transform_query(gaussian_data[150], levels16), stream, 5, levels16)
        assert set(result.ids.tolist()) == _oracle(ds.coeffs, gaussian_data[150], 5)


class TestRefineErrors:
    def test_empty_candidates(self, levels16):
        with pytest.raises(EmptyCandidateSetError):
            refine(transform_query(np.zeros(16), levels16), [], 3)
        with pytest.raises(EmptyCandidateSetError):
            refine_point_centric(transform_query(np.zeros(16), levels16), iter([]), 3, levels16)

    def test_dimension_mismatch(self, gaussian_data, levels16):
        ds = TransformedDataset.from_vectors(gaussian_data[:10], levels16)
        q = transform_query(np.zeros(8), LevelSpec.equal_width(8, 4))
        with pytest.raises(DimensionMismatchError):
            refine(q, build_batches(ds, 4), 3)

"""k-means 與 IVFFlat 測試。"""

import numpy as np
import pytest

from tailbound.analytics.metrics import recall_at_k
from tailbound.bench.groundtruth import ground_truth
from tailbound.bench.synthetic import gaussian_blobs, rotated_gaussian
from tailbound.config.constants import IndexKind, SearchMode
from tailbound.exceptions import InvalidParameterError
from tailbound.index import ivf
from tailbound.index.flat import build_flat, flat_search
from tailbound.index.ivf import build_ivfflat, kmeans, search_ivfflat


class TestKMeans:
    def setup_method(self):
        self.data = gaussian_blobs(400, 8, n_centers=4, spread=0.05, seed=1)

    def test_deterministic(self):
        c1, a1 = kmeans(self.data, 4, seed=3)
        c2, a2 = kmeans(self.data, 4, seed=3)
        np.testing.assert_array_equal(c1, c2)
        np.testing.assert_array_equal(a1, a2)

    def test_assignments_are_nearest_centroid(self):
        centroids, assign = kmeans(self.data, 4, seed=0)
        d = ((self.data[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        assert assign.dtype == np.int64
        assert np.all((assign >= 0) & (assign < 4))
        assert np.all(d[np.arange(400), assign] <= d.min(axis=1) + 1e-9)

    def test_duplicate_points_do_not_crash(self):
        data = np.repeat(np.eye(3), 10, axis=0)
        centroids, assign = kmeans(data, 5, seed=0)
        assert centroids.shape == (5, 3)
        assert np.all(np.isfinite(centroids))
        assert assign.shape == (30,)

    def test_every_cluster_nonempty_with_duplicates(self):
        data = np.vstack([np.zeros((10, 4)), np.ones((10, 4))])
        centroids, assign = kmeans(data, 3, seed=0)
        assert np.all(np.bincount(assign, minlength=3) > 0)
        assert np.all(np.isfinite(centroids))
        index = build_ivfflat(data, n_list=3, seed=0)
        assert all(len(rows) > 0 for rows in index.lists)

    def test_two_blobs_are_separated(self):
        rng = np.random.default_rng(8)
        labels = np.repeat([0, 1], 200)
        data = np.where(labels[:, None] == 0, -5.0, 5.0) + rng.standard_normal((400, 8))
        _, assign = kmeans(data, 2, seed=0)
        purity = max(np.mean(assign == labels), np.mean(assign != labels))
        assert purity >= 0.99

    def test_delegates_to_scipy(self, mocker):
        spy = mocker.spy(ivf, "kmeans2")
        kmeans(self.data, 4, seed=0, iterations=5)
        assert spy.call_count >= 1
        assert spy.call_args_list[0].kwargs["iter"] == 5

    def test_invalid_iterations(self):
        with pytest.raises(InvalidParameterError):
            kmeans(self.data, 4, iterations=0)

    def test_invalid_cluster_count(self):
        with pytest.raises(InvalidParameterError):
            kmeans(self.data[:3], 4)


class TestIVFFlat:
    def setup_method(self):
        self.data = gaussian_blobs(800, 16, n_centers=8, spread=0.3, seed=2)
        self.queries = gaussian_blobs(15, 16, n_centers=8, spread=0.3, seed=5)
        self.index = build_ivfflat(self.data, n_list=8, seed=0)
        self.truth = ground_truth(self.data, self.queries, 10)

    def test_structure(self):
        assert self.index.kind == IndexKind.IVF
        assert self.index.n_list == 8
        sizes = sum(len(rows) for rows in self.index.lists)
        assert sizes == 800

    @pytest.mark.parametrize("mode", list(SearchMode))
    def test_full_probe_is_exact(self, mode):
        for i, q in enumerate(self.queries):
            result = search_ivfflat(self.index, q, 10, n_probe=8, mode=mode)
            assert recall_at_k(result.ids, self.truth[i]) == 1.0

    def test_modes_agree_at_partial_probe(self):
        for q in self.queries:
            base = search_ivfflat(self.index, q, 10, n_probe=2, mode=SearchMode.BASELINE)
            prog = search_ivfflat(self.index, q, 10, n_probe=2, mode=SearchMode.PROGRESSIVE)
            assert set(base.ids.tolist()) == set(prog.ids.tolist())
            assert prog.counter.phi <= 1.0

    def test_probe_order_ties_by_list_id(self):
        self.index.centroids[:] = 0.0
        order = self.index.probe_order(np.ones(16))
        np.testing.assert_array_equal(order, np.arange(8))

    def test_invalid_nprobe(self):
        with pytest.raises(InvalidParameterError):
            search_ivfflat(self.index, self.queries[0], 10, n_probe=9)
        with pytest.raises(InvalidParameterError):
            build_ivfflat(self.data[:5], n_list=6)

    def test_single_list_equals_flat_scan(self):
        single = build_ivfflat(self.data, n_list=1, seed=0)
        flat = build_flat(self.data)
        assert len(single.lists[0]) == 800
        for q in self.queries:
            expected = flat_search(flat, q, 10)
            result = search_ivfflat(single, q, 10, n_probe=1)
            np.testing.assert_array_equal(result.ids, expected.ids)
            np.testing.assert_allclose(result.distances, expected.distances, rtol=1e-6)


class TestRecallVsProbes:
    def setup_method(self):
        points = rotated_gaussian(1240, 32, decay=6.0, seed=9)
        self.data, self.queries = points[:1200], points[1200:]
        self.index = build_ivfflat(self.data, n_list=16, seed=1)
        self.truth = ground_truth(self.data, self.queries, 10)

    def test_recall_nondecreasing_in_nprobe(self):
        curve = []
        for n_probe in range(1, 17):
            recalls = [
                recall_at_k(search_ivfflat(self.index, q, 10, n_probe=n_probe).ids, self.truth[i])
                for i, q in enumerate(self.queries)
            ]
            assert all(0.0 <= r <= 1.0 for r in recalls)
            curve.append(np.mean(recalls))
        assert np.all(np.diff(curve) >= -1e-12)
        assert curve[-1] == 1.0

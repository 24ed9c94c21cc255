"""Level-major 批次儲存測試。"""

import numpy as np
import pytest

from tailbound.bounds.levels import LevelSpec
from tailbound.bounds.tails import TransformedDataset
from tailbound.exceptions import InvalidParameterError
from tailbound.storage.layout import build_batches, level_block, level_slice, reconstruct, reconstruct_batches


class TestLevelMajorBatch:
    def setup_method(self):
        self.spec = LevelSpec((0, 1, 3, 6))
        coeffs = np.arange(30, dtype=np.float32).reshape(5, 6)
        self.ds = TransformedDataset.from_coeffs(coeffs, self.spec)

    def test_batch_sizes(self):
        batches = build_batches(self.ds, 2)
        assert [b.size for b in batches] == [2, 2, 1]
        assert all(b.capacity == 2 for b in batches)

    def test_level_major_order(self):
        batch = build_batches(self.ds, 2)[0]
        # 第 1 層 (寬 1)：row0[0], row1[0]；第 2 層 (寬 2)：row0[1:3], row1[1:3] ...
        np.testing.assert_array_equal(batch.data[:6], [0, 6, 1, 2, 7, 8])

    def test_offsets(self):
        batch = build_batches(self.ds, 2)[0]
        for level in range(1, 4):
            start, stop = self.spec.span(level)
            for i in range(batch.size):
                off = batch.offset(level, i)
                assert off == batch.size * start + i * (stop - start)
                np.testing.assert_array_equal(batch.data[off:off + stop - start], self.ds.coeffs[i, start:stop])

    def test_slice_is_zero_copy_view(self):
        batch = build_batches(self.ds, 4)[0]
        view = level_slice(batch, 2)
        assert np.shares_memory(view, batch.data)
        assert view.shape == (4 * 2,)
        assert level_block(batch, 3).shape == (4, 3)

    def test_immutable(self):
        batch = build_batches(self.ds, 4)[0]
        with pytest.raises(ValueError):
            batch.data[0] = 1.0

    def test_invalid_level(self):
        with pytest.raises(InvalidParameterError):
            level_slice(build_batches(self.ds, 4)[0], 0)

    def test_invalid_batch_size(self):
        with pytest.raises(InvalidParameterError):
            build_batches(self.ds, 0)


class TestRoundTrip:
    @pytest.mark.parametrize("batch_size", [1, 3, 7, 64])
    def test_bit_exact(self, gaussian_data, levels16, batch_size):
        ds = TransformedDataset.from_vectors(gaussian_data[:50], levels16)
        coeffs, ids = reconstruct_batches(build_batches(ds, batch_size))
        assert coeffs.tobytes() == ds.coeffs.tobytes()
        np.testing.assert_array_equal(ids, ds.ids)

    def test_row_subset_keeps_order(self, gaussian_data, levels16):
        ds = TransformedDataset.from_vectors(gaussian_data[:20], levels16)
        rows = np.array([7, 2, 11])
        batch = build_batches(ds, 8, rows)[0]
        np.testing.assert_array_equal(batch.ids, rows)
        np.testing.assert_array_equal(reconstruct(batch), ds.coeffs[rows])
        np.testing.assert_array_equal(batch.tails, ds.tails[rows])

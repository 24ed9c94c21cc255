"""Level-major 批次儲存。

一個批次 n 個向量的資料依層排列：先放所有向量的第 1 層係數，再放第 2 層……
同一層內依向量順序、每個向量放該層的連續係數。(ℓ, i) 的 offset 為
n·m_{ℓ−1} + i·w_ℓ。
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tailbound.bounds.levels import LevelSpec
from tailbound.bounds.tails import TransformedDataset
from tailbound.exceptions import DimensionMismatchError, InvalidParameterError


@dataclass(frozen=True, eq=False)
class LevelMajorBatch:
    """不可變的 level-major 批次；最後一批可能未滿 capacity（不補齊）。"""

    capacity: int
    levels: LevelSpec
    data: np.ndarray      # float32, 長度 size·d
    ids: np.ndarray       # int64, 長度 size
    tails: np.ndarray     # float64, (size, L+1)

    def __post_init__(self) -> None:
        n = self.ids.shape[0]
        if not 1 <= n <= self.capacity:
            raise InvalidParameterError(f"批次大小 {n} 不在 [1, {self.capacity}]")
        if self.data.shape != (n * self.levels.d,):
            raise DimensionMismatchError(f"批次資料長度 {self.data.shape} 與 {n}×{self.levels.d} 不符")
        if self.tails.shape != (n, self.levels.n_levels + 1):
            raise DimensionMismatchError(f"批次尾部能量表 shape 錯誤: {self.tails.shape}")
        self.data.flags.writeable = False

    @property
    def size(self) -> int:
        return int(self.ids.shape[0])

    def offset(self, level: int, i: int) -> int:
        """第 level 層、批次內第 i 個向量的起始 offset。"""
        start, stop = self.levels.span(level)
        return self.size * start + i * (stop - start)


def _pack(coeffs: np.ndarray, levels: LevelSpec) -> np.ndarray:
    parts = [coeffs[:, a:b].ravel() for a, b in zip(levels.thresholds, levels.thresholds[1:])]
    return np.ascontiguousarray(np.concatenate(parts), dtype=np.float32)


def build_batches(
    dataset: TransformedDataset,
    batch_size: int,
    rows: np.ndarray | None = None,
) -> list[LevelMajorBatch]:
    """將 dataset（或其 rows 子集，保持給定順序）切成 level-major 批次。"""
    if batch_size < 1:
        raise InvalidParameterError(f"batch_size 必須 >= 1，收到 {batch_size}")
    rows = np.arange(len(dataset)) if rows is None else np.asarray(rows, dtype=np.int64)

    batches = []
    for start in range(0, rows.shape[0], batch_size):
        chunk = rows[start:start + batch_size]
        batches.append(
            LevelMajorBatch(
                capacity=batch_size,
                levels=dataset.levels,
                data=_pack(dataset.coeffs[chunk], dataset.levels),
                ids=dataset.ids[chunk].astype(np.int64),
                tails=dataset.tails[chunk],
            )
        )
    return batches


def level_slice(batch: LevelMajorBatch, level: int) -> np.ndarray:
    """第 level 層所有候選係數的零拷貝 view，長度 size·w_ℓ。"""
    if not 1 <= level <= batch.levels.n_levels:
        raise InvalidParameterError(f"level 必須落在 [1, {batch.levels.n_levels}]，收到 {level}")
    start, stop = batch.levels.span(level)
    n = batch.size
    return batch.data[n * start:n * stop]


def level_block(batch: LevelMajorBatch, level: int) -> np.ndarray:
    """level_slice 的 (size, w_ℓ) 形狀 view。"""
    start, stop = batch.levels.span(level)
    return level_slice(batch, level).reshape(batch.size, stop - start)


def reconstruct(batch: LevelMajorBatch) -> np.ndarray:
    """還原為 row-major (size, d) 係數。"""
    blocks = [level_block(batch, level) for level in range(1, batch.levels.n_levels + 1)]
    return np.concatenate(blocks, axis=1)


def reconstruct_batches(batches: list[LevelMajorBatch]) -> tuple[np.ndarray, np.ndarray]:
    """依序還原所有批次，回傳 (係數, ids)。"""
    if not batches:
        return np.empty((0, 0), dtype=np.float32), np.empty(0, dtype=np.int64)
    coeffs = np.concatenate([reconstruct(b) for b in batches], axis=0)
    ids = np.concatenate([b.ids for b in batches])
    return coeffs, ids

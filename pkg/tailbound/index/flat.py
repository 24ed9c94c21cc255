"""Flat（暴力掃描）索引。"""

from __future__ import annotations

import numpy as np

from tailbound.bounds.levels import LevelSpec
from tailbound.bounds.tails import TransformedDataset
from tailbound.config.constants import IndexKind, SearchMode
from tailbound.config.settings import EngineConfig
from tailbound.engine.refine import refine
from tailbound.index.base import BaseIndex, SearchResult, check_k, full_scan
from tailbound.logging_config import get_logger
from tailbound.storage.layout import build_batches
from tailbound.transform.model import TransformModel
from tailbound.utils.helpers import as_matrix

logger = get_logger("index.flat")


class FlatIndex(BaseIndex):
    """所有向量依序放進 level-major 批次。"""

    def __init__(
        self,
        dataset: TransformedDataset,
        model: TransformModel | None = None,
        engine: EngineConfig | None = None,
    ) -> None:
        super().__init__(dataset, model, engine)
        self.batches = build_batches(dataset, self.engine.batch_size)

    @property
    def kind(self) -> IndexKind:
        return IndexKind.FLAT

    def search(self, q, k: int, mode: SearchMode = SearchMode.PROGRESSIVE, **params) -> SearchResult:
        return flat_search(self, q, k, mode, **params)


def build_flat(
    data,
    levels: LevelSpec | None = None,
    model: TransformModel | None = None,
    engine: EngineConfig | None = None,
) -> FlatIndex:
    x = as_matrix(data, dtype=np.float64)
    levels = levels or LevelSpec.default(x.shape[1])
    index = FlatIndex(TransformedDataset.from_vectors(x, levels, model), model, engine)
    logger.info("Flat 索引建立完成: N=%d d=%d L=%d", len(index), index.dim, levels.n_levels)
    return index


def flat_search(
    index: FlatIndex,
    q,
    k: int,
    mode: SearchMode = SearchMode.PROGRESSIVE,
    record_pruned: bool = False,
) -> SearchResult:
    """掃描全部批次；兩種模式都回傳精確 top-k。"""
    check_k(k)
    qv = index.prepare_query(q)
    if SearchMode(mode) == SearchMode.BASELINE:
        return full_scan(qv, index.dataset, np.arange(len(index)), k)
    return refine(qv, index.batches, k, index.engine, record_pruned=record_pruned)

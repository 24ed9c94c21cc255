"""索引抽象基底類別。"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from tailbound.bounds.levels import LevelSpec
from tailbound.bounds.tails import TransformedDataset, TransformedVector, transform_query
from tailbound.config.constants import IndexKind, SearchMode
from tailbound.config.settings import EngineConfig
from tailbound.engine.counters import WorkCounter
from tailbound.engine.refine import RefineResult
from tailbound.exceptions import EmptyCandidateSetError, EmptyIndexError, InvalidParameterError
from tailbound.transform.model import TransformModel
from tailbound.utils.helpers import squared_distances, topk_by_distance

# 搜尋結果與 refinement 結果同型：ids / distances 依 (距離, id) 遞增，附工作量計數
SearchResult = RefineResult


class BaseIndex(ABC):
    """所有索引共用：轉換後資料集、LevelSpec、可選的轉換模型與引擎設定。"""

    def __init__(
        self,
        dataset: TransformedDataset,
        model: TransformModel | None = None,
        engine: EngineConfig | None = None,
    ) -> None:
        if len(dataset) == 0:
            raise EmptyIndexError("無法對空資料集建立索引")
        self.dataset = dataset
        self.model = model
        self.engine = engine or EngineConfig()

    @property
    @abstractmethod
    def kind(self) -> IndexKind:
        """索引類型。"""

    @abstractmethod
    def search(self, q, k: int, mode: SearchMode = SearchMode.PROGRESSIVE, **params) -> SearchResult:
        """搜尋 k 個最近鄰。"""

    @property
    def levels(self) -> LevelSpec:
        return self.dataset.levels

    @property
    def dim(self) -> int:
        return self.dataset.dim

    def __len__(self) -> int:
        return len(self.dataset)

    def prepare_query(self, q) -> TransformedVector:
        """套用索引的轉換並預計算查詢的尾部能量。"""
        return transform_query(q, self.levels, self.model)


def check_k(k: int) -> None:
    if k < 1:
        raise InvalidParameterError(f"k 必須 >= 1，收到 {k}")


def full_scan(qv: TransformedVector, dataset: TransformedDataset, rows: np.ndarray, k: int) -> SearchResult:
    """baseline：對 rows 全部計算完整距離，每個候選計 d 維。"""
    if rows.size == 0:
        raise EmptyCandidateSetError("候選集合為空")
    dists = squared_distances(dataset.coeffs[rows], qv.coeffs)
    ids, top = topk_by_distance(dists, dataset.ids[rows], k)
    counter = WorkCounter(dim=dataset.dim, terms=int(rows.size) * dataset.dim, candidates=int(rows.size))
    return SearchResult(ids=ids.astype(np.int64), distances=top, counter=counter)

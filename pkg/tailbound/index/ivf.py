"""IVFFlat 索引：k-means 粗量化 + 每個 list 各自的 level-major 批次。"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.cluster.vq import kmeans2, vq

from tailbound.bounds.levels import LevelSpec
from tailbound.bounds.tails import TransformedDataset
from tailbound.config.constants import KMEANS_ITERATIONS, KMEANS_REPAIR_ROUNDS, IndexKind, SearchMode
from tailbound.config.settings import EngineConfig
from tailbound.engine.refine import refine
from tailbound.exceptions import EmptyCandidateSetError, InvalidParameterError
from tailbound.index.base import BaseIndex, SearchResult, check_k, full_scan
from tailbound.logging_config import get_logger
from tailbound.storage.layout import build_batches
from tailbound.transform.model import TransformModel
from tailbound.utils.decorators import log_elapsed
from tailbound.utils.helpers import as_matrix, squared_distances

logger = get_logger("index.ivf")


def _lloyd(x: np.ndarray, k, **kwargs) -> np.ndarray:
    """scipy kmeans2；空群的 UserWarning 交給 _reseed_empty 處理。"""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        centroids, _ = kmeans2(x, k, missing="warn", check_finite=False, **kwargs)
    return centroids


def _reseed_empty(x: np.ndarray, centroids: np.ndarray, assign: np.ndarray, attempt: int) -> int:
    """空群以「最大群中離其中心最遠的點」重新播種（就地修改），回傳播種數。"""
    counts = np.bincount(assign, minlength=centroids.shape[0])
    reseeded = 0
    for empty in np.flatnonzero(counts == 0):
        largest = int(np.argmax(counts))
        if counts[largest] < 2:
            break
        members = np.flatnonzero(assign == largest)
        far = members[np.argmax(squared_distances(x[members], centroids[largest]))]
        centroids[empty] = x[far]
        assign[far] = empty
        counts[largest] -= 1
        counts[empty] = 1
        reseeded += 1
        logger.warning("k-means 修補第 %d 輪: 群 %d 為空，以群 %d 的最遠點重新播種", attempt, empty, largest)
    return reseeded


def kmeans(
    data,
    n_clusters: int,
    seed: int = 0,
    iterations: int = KMEANS_ITERATIONS,
) -> tuple[np.ndarray, np.ndarray]:
    """scipy.cluster.vq 的 k-means++ + Lloyd，回傳 (centroids, assignments)。

    Lloyd 結束後若仍有空群，重新播種並再跑一次 Lloyd；最多 KMEANS_REPAIR_ROUNDS 輪，
    之後再補一次不重跑的播種，保證每群非空。
    結果只由 seed 決定。
    """
    x = as_matrix(data, dtype=np.float64)
    n = x.shape[0]
    if not 1 <= n_clusters <= n:
        raise InvalidParameterError(f"n_list 必須落在 [1, N={n}]，收到 {n_clusters}")
    if iterations < 1:
        raise InvalidParameterError(f"k-means 迭代次數必須 >= 1，收到 {iterations}")

    rng = np.random.default_rng(seed)
    if len(np.unique(x, axis=0)) < n_clusters:
        # 相異點不足時 k-means++ 的抽樣機率會退化
        init = x[np.sort(rng.choice(n, n_clusters, replace=False))]
        centroids = _lloyd(x, init, iter=iterations, minit="matrix")
    else:
        centroids = _lloyd(x, n_clusters, iter=iterations, minit="++", rng=rng)
    assign = vq(x, centroids, check_finite=False)[0].astype(np.int64)

    for attempt in range(KMEANS_REPAIR_ROUNDS):
        if not _reseed_empty(x, centroids, assign, attempt):
            break
        centroids = _lloyd(x, centroids, iter=iterations, minit="matrix")
        assign = vq(x, centroids, check_finite=False)[0].astype(np.int64)
    else:
        _reseed_empty(x, centroids, assign, KMEANS_REPAIR_ROUNDS)

    return centroids, assign


class IVFFlatIndex(BaseIndex):
    """每個向量屬於唯一一個 list；list 內依原始順序排成批次。"""

    def __init__(
        self,
        dataset: TransformedDataset,
        centroids: np.ndarray,
        assignments: np.ndarray,
        model: TransformModel | None = None,
        engine: EngineConfig | None = None,
        seed: int = 0,
    ) -> None:
        super().__init__(dataset, model, engine)
        if assignments.shape != (len(dataset),):
            raise InvalidParameterError("assignments 長度必須等於向量數")
        if not np.all(np.isfinite(centroids)):
            raise InvalidParameterError("centroids 含非有限值")
        self.centroids = np.asarray(centroids, dtype=np.float64)
        self.assignments = np.asarray(assignments, dtype=np.int64)
        self.seed = seed
        self.lists = [np.flatnonzero(self.assignments == c) for c in range(self.n_list)]
        self.list_batches = [build_batches(dataset, self.engine.batch_size, rows) for rows in self.lists]

    @property
    def kind(self) -> IndexKind:
        return IndexKind.IVF

    @property
    def n_list(self) -> int:
        return int(self.centroids.shape[0])

    def search(self, q, k: int, mode: SearchMode = SearchMode.PROGRESSIVE, n_probe: int = 1, **params) -> SearchResult:
        return search_ivfflat(self, q, k, n_probe, mode, **params)

    def probe_order(self, q_coeffs: np.ndarray) -> np.ndarray:
        """依 (centroid 距離, list id) 排序的 list 順序。"""
        dists = squared_distances(self.centroids, q_coeffs)
        return np.lexsort((np.arange(self.n_list), dists))


@log_elapsed("IVFFlat 建立")
def build_ivfflat(
    data,
    n_list: int,
    seed: int = 0,
    levels: LevelSpec | None = None,
    model: TransformModel | None = None,
    engine: EngineConfig | None = None,
    iterations: int = KMEANS_ITERATIONS,
) -> IVFFlatIndex:
    """在轉換後的空間做 k-means（正交轉換保距離）並建立 IVFFlat。"""
    x = as_matrix(data, dtype=np.float64)
    if not 1 <= n_list <= x.shape[0]:
        raise InvalidParameterError(f"n_list ({n_list}) 不可大於資料量 N ({x.shape[0]})")
    levels = levels or LevelSpec.default(x.shape[1])
    dataset = TransformedDataset.from_vectors(x, levels, model)
    centroids, assign = kmeans(dataset.coeffs, n_list, seed, iterations)
    index = IVFFlatIndex(dataset, centroids, assign, model, engine, seed)
    sizes = np.bincount(assign, minlength=n_list)
    logger.info("IVFFlat 建立完成: N=%d n_list=%d list 大小 min=%d max=%d", len(index), n_list, sizes.min(), sizes.max())
    return index


def search_ivfflat(
    index: IVFFlatIndex,
    q,
    k: int,
    n_probe: int,
    mode: SearchMode = SearchMode.PROGRESSIVE,
    record_pruned: bool = False,
) -> SearchResult:
    """掃描最近的 n_probe 個 list；兩種模式都回傳候選集合的精確 top-k。"""
    check_k(k)
    if not 1 <= n_probe <= index.n_list:
        raise InvalidParameterError(f"n_probe 必須落在 [1, {index.n_list}]，收到 {n_probe}")
    qv = index.prepare_query(q)
    probed = index.probe_order(qv.coeffs)[:n_probe]

    if SearchMode(mode) == SearchMode.BASELINE:
        rows = np.concatenate([index.lists[c] for c in probed])
        return full_scan(qv, index.dataset, rows, k)

    batches = [b for c in probed for b in index.list_batches[c]]
    if not batches:
        raise EmptyCandidateSetError(f"探測的 {n_probe} 個 list 皆為空")
    return refine(qv, batches, k, index.engine, record_pruned=record_pruned)

"""HNSW 圖索引與兩種 layer-0 搜尋：baseline（精確距離）與逐層界限（lazy exactness）。

建圖採標準做法：層級 ~ floor(−ln U / ln M)、鄰居以最近者簡單選取，
上層每點最多 M 條邊、layer 0 最多 2M 條。
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from tailbound.bounds.levels import LevelSpec
from tailbound.bounds.tails import TransformedDataset, TransformedVector
from tailbound.config.constants import IndexKind, SearchMode
from tailbound.config.settings import EngineConfig
from tailbound.engine.counters import WorkCounter
from tailbound.engine.heap import ResultHeap
from tailbound.engine.refine import refine_candidate
from tailbound.exceptions import EmptyIndexError, InvalidParameterError
from tailbound.index.base import BaseIndex, SearchResult, check_k
from tailbound.logging_config import get_logger
from tailbound.transform.model import TransformModel
from tailbound.utils.decorators import log_elapsed
from tailbound.utils.helpers import as_matrix, squared_distances

logger = get_logger("index.hnsw")

Layer = dict[int, list[int]]


def _search_layer(
    vectors: np.ndarray,
    q: np.ndarray,
    entry_points: list[tuple[float, int]],
    ef: int,
    layer: Layer,
    counter: WorkCounter | None = None,
) -> list[tuple[float, int]]:
    """標準 ef 搜尋，回傳依 (距離, id) 遞增的至多 ef 個節點。"""
    visited = {i for _, i in entry_points}
    candidates = list(entry_points)
    heapq.heapify(candidates)
    best = [(-d, -i) for d, i in entry_points]
    heapq.heapify(best)
    while len(best) > ef:
        heapq.heappop(best)

    while candidates:
        dist, node = heapq.heappop(candidates)
        if len(best) >= ef and dist > -best[0][0]:
            break
        fresh = [u for u in layer.get(node, ()) if u not in visited]
        if not fresh:
            continue
        visited.update(fresh)
        dists = squared_distances(vectors[fresh], q)
        if counter is not None:
            counter.candidates += len(fresh)
            counter.charge(len(fresh), vectors.shape[1])
        for u, du in zip(fresh, dists):
            du = float(du)
            if len(best) < ef or (du, u) < (-best[0][0], -best[0][1]):
                heapq.heappush(candidates, (du, u))
                heapq.heappush(best, (-du, -u))
                if len(best) > ef:
                    heapq.heappop(best)

    return sorted((-d, -i) for d, i in best)


class HnswIndex(BaseIndex):
    """多層鄰接表；layer 0 含所有節點。"""

    def __init__(
        self,
        dataset: TransformedDataset,
        layers: list[Layer],
        entry_point: int,
        m: int = 16,
        ef_construction: int = 40,
        seed: int = 0,
        model: TransformModel | None = None,
        engine: EngineConfig | None = None,
    ) -> None:
        super().__init__(dataset, model, engine)
        if not layers or len(layers[0]) != len(dataset):
            raise InvalidParameterError("layer 0 必須包含所有節點")
        self.layers = layers
        self.entry_point = entry_point
        self.m = m
        self.ef_construction = ef_construction
        self.seed = seed
        self.vectors = dataset.coeffs.astype(np.float64)

    @property
    def kind(self) -> IndexKind:
        return IndexKind.HNSW

    @property
    def max_level(self) -> int:
        return len(self.layers) - 1

    def search(
        self, q, k: int, mode: SearchMode = SearchMode.PROGRESSIVE, ef_search: int = 64, **params
    ) -> SearchResult:
        if SearchMode(mode) == SearchMode.BASELINE:
            return search_hnsw_baseline(self, q, k, ef_search)
        return search_hnsw_progressive(self, q, k, ef_search, **params)

    def descend(self, qv: TransformedVector, counter: WorkCounter) -> tuple[float, int]:
        """上層以精確距離貪婪下降，回傳 layer 0 的入口 (距離, id)。"""
        q = np.asarray(qv.coeffs, dtype=np.float64)
        ep = self.entry_point
        best = [(float(squared_distances(self.vectors[[ep]], q)[0]), ep)]
        counter.candidates += 1
        counter.charge(1, self.dim)
        for level in range(self.max_level, 0, -1):
            best = _search_layer(self.vectors, q, best, 1, self.layers[level], counter)
        return best[0]


def _select_levels(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    mult = 1.0 / math.log(m)
    u = 1.0 - rng.random(n)    # (0, 1]
    return np.floor(-np.log(u) * mult).astype(np.int64)


@log_elapsed("HNSW 建立")
def build_hnsw(
    data,
    m: int = 16,
    ef_construction: int = 40,
    seed: int = 0,
    levels: LevelSpec | None = None,
    model: TransformModel | None = None,
    engine: EngineConfig | None = None,
) -> HnswIndex:
    """依 0..N−1 順序插入建立 HNSW（在轉換後的空間，距離不變）。"""
    if m < 2:
        raise InvalidParameterError(f"M 必須 >= 2，收到 {m}")
    x = as_matrix(data, dtype=np.float64)
    if x.shape[0] == 0:
        raise EmptyIndexError("無法對空資料集建立索引")
    levels = levels or LevelSpec.default(x.shape[1])
    dataset = TransformedDataset.from_vectors(x, levels, model)
    vectors = dataset.coeffs.astype(np.float64)
    node_levels = _select_levels(len(dataset), m, np.random.default_rng(seed))

    layers: list[Layer] = []
    entry, top = -1, -1
    for i in range(len(dataset)):
        lvl = int(node_levels[i])
        while len(layers) <= lvl:
            layers.append({})
        for layer in layers[:lvl + 1]:
            layer[i] = []
        if entry < 0:
            entry, top = i, lvl
            continue

        v = vectors[i]
        ep = [(float(squared_distances(vectors[[entry]], v)[0]), entry)]
        for layer_no in range(top, lvl, -1):
            ep = _search_layer(vectors, v, ep, 1, layers[layer_no])
        for layer_no in range(min(lvl, top), -1, -1):
            layer = layers[layer_no]
            found = _search_layer(vectors, v, ep, ef_construction, layer)
            cap = 2 * m if layer_no == 0 else m
            chosen = [u for _, u in found[:m]]
            layer[i] = chosen
            for u in chosen:
                adj = layer[u]
                adj.append(i)
                if len(adj) > cap:
                    d_u = squared_distances(vectors[adj], vectors[u])
                    keep = np.lexsort((np.asarray(adj), d_u))[:cap]
                    layer[u] = [adj[j] for j in keep]
            ep = found
        if lvl > top:
            entry, top = i, lvl

    index = HnswIndex(dataset, layers, entry, m, ef_construction, seed, model, engine)
    logger.info("HNSW 建立完成: N=%d 層數=%d M=%d ef_construction=%d", len(index), len(layers), m, ef_construction)
    return index


def _check_ef(ef_search: int, k: int) -> None:
    check_k(k)
    if ef_search < k:
        raise InvalidParameterError(f"ef_search ({ef_search}) 不可小於 k ({k})")


def search_hnsw_baseline(index: HnswIndex, q, k: int, ef_search: int) -> SearchResult:
    """標準 HNSW：每個造訪節點都計算精確距離。"""
    _check_ef(ef_search, k)
    qv = index.prepare_query(q)
    counter = WorkCounter(dim=index.dim)
    ep = index.descend(qv, counter)
    found = _search_layer(index.vectors, np.asarray(qv.coeffs, dtype=np.float64), [ep], ef_search, index.layers[0], counter)
    top = found[:k]
    return SearchResult(
        ids=np.array([i for _, i in top], dtype=np.int64),
        distances=np.array([d for d, _ in top], dtype=np.float64),
        counter=counter,
    )


def search_hnsw_progressive(
    index: HnswIndex,
    q,
    k: int,
    ef_search: int,
    record_pruned: bool = False,
) -> SearchResult:
    """layer 0 以逐層界限處理鄰居，只對通過剪枝的節點算出精確距離。

    - 結果堆只收精確距離；τ 為目前第 k 個精確距離（未滿時 +∞）。
    - 存活節點以精確距離進 beam；被剪枝節點以 (LB+UB)/2 進 beam。
    - beam 另以「目前最佳 ef 個 key」作為終止與收錄門檻。
    - 出 beam 的節點不論精確或近似都展開鄰居；被剪枝節點的 LB
      已超過當時（只會變小）的 τ，精確距離永不計算。
    """
    _check_ef(ef_search, k)
    qv = index.prepare_query(q)
    levels = index.levels
    slack = index.engine.prune_slack
    layer0 = index.layers[0]
    counter = WorkCounter(dim=index.dim, record_pruned=record_pruned)

    ep_dist, ep = index.descend(qv, counter)
    results = ResultHeap(k)
    results.push_exact(ep, ep_dist)

    beam = [(ep_dist, ep)]
    top = [(-ep_dist, -ep)]
    visited = {ep}

    def beam_bound() -> float:
        return -top[0][0] if len(top) >= ef_search else math.inf

    while beam:
        key, node = heapq.heappop(beam)
        if key > beam_bound():
            break

        # 被剪枝節點同樣展開鄰居，但永不補算其精確距離
        for u in layer0.get(node, ()):
            if u in visited:
                continue
            visited.add(u)
            state, consumed = refine_candidate(qv, index.dataset.vector(u), levels, results.threshold, slack)
            counter.candidates += 1
            counter.charge(1, consumed)
            if state.pruned:
                key_u = 0.5 * (state.lb + state.ub)
                counter.mark_pruned([u])
            else:
                key_u = max(state.lb, 0.0)
                results.push_exact(u, key_u)

            if len(top) < ef_search or (key_u, u) < (-top[0][0], -top[0][1]):
                heapq.heappush(beam, (key_u, u))
                heapq.heappush(top, (-key_u, -u))
                if len(top) > ef_search:
                    heapq.heappop(top)

    return SearchResult.from_heap(results, counter)

"""暴力精確 kNN，作為 recall 的真值。"""

from __future__ import annotations

import numpy as np

from tailbound.exceptions import DimensionMismatchError, InvalidParameterError
from tailbound.utils.decorators import log_elapsed
from tailbound.utils.helpers import as_matrix, squared_distances, topk_by_distance


def exact_knn(data, q, k: int) -> tuple[np.ndarray, np.ndarray]:
    """單一查詢的 (ids, 平方距離)，依 (距離, id) 遞增。"""
    x = as_matrix(data)
    dists = squared_distances(x, np.asarray(q, dtype=np.float64).ravel())
    return topk_by_distance(dists, np.arange(x.shape[0], dtype=np.int64), k)


@log_elapsed("ground truth")
def ground_truth(data, queries, k: int) -> np.ndarray:
    """(N_q, k) 真值 id 矩陣；同距離時較小 id 優先。"""
    x = as_matrix(data)
    qs = as_matrix(queries)
    if x.shape[1] != qs.shape[1]:
        raise DimensionMismatchError(f"查詢維度 {qs.shape[1]} 與資料維度 {x.shape[1]} 不一致")
    if not 1 <= k <= x.shape[0]:
        raise InvalidParameterError(f"k 必須落在 [1, N={x.shape[0]}]，收到 {k}")
    out = np.empty((qs.shape[0], k), dtype=np.int64)
    for row, q in enumerate(qs):
        out[row], _ = exact_knn(x, q, k)
    return out

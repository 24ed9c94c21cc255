"""查詢難度與召回率。"""

from __future__ import annotations

import math

import numpy as np

from tailbound.bounds.tails import TransformedDataset
from tailbound.exceptions import DimensionMismatchError, InvalidParameterError
from tailbound.utils.helpers import as_matrix, squared_distances


def relative_contrast(q, dataset, k: int) -> float:
    """RC_k(q) = 平均 L2 距離 / 第 k 近鄰的 L2 距離（非平方）。

    dataset 為 TransformedDataset 時，q 須與其係數在同一空間。
    """
    points = dataset.coeffs if isinstance(dataset, TransformedDataset) else as_matrix(dataset)
    q = np.asarray(q, dtype=np.float64).ravel()
    if points.shape[1] != q.shape[0]:
        raise DimensionMismatchError(f"查詢維度 {q.shape[0]} 與資料維度 {points.shape[1]} 不一致")
    if not 1 <= k < points.shape[0]:
        raise InvalidParameterError(f"relative_contrast 需要 1 <= k < N，收到 k={k}, N={points.shape[0]}")

    dists = np.sqrt(squared_distances(points, q))
    kth = float(np.partition(dists, k - 1)[k - 1])
    mean = float(dists.mean())
    if kth == 0.0:
        return math.inf if mean > 0 else 1.0
    return mean / kth


def recall_at_k(result_ids, truth_ids) -> float:
    """|結果 ∩ 真值| / k，k = 真值個數。"""
    truth = {int(i) for i in np.asarray(truth_ids).ravel()}
    if not truth:
        raise InvalidParameterError("真值集合不可為空")
    found = {int(i) for i in np.asarray(result_ids).ravel()}
    return len(found & truth) / len(truth)

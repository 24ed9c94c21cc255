"""共用工具函數。"""

import numpy as np


def as_matrix(data, dtype=np.float64) -> np.ndarray:
    """轉為 2D C-contiguous 陣列；1D 輸入視為單一向量。"""
    arr = np.ascontiguousarray(data, dtype=dtype)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"需要 2D 矩陣，收到 shape={arr.shape}")
    return arr


def squared_distances(points: np.ndarray, q: np.ndarray) -> np.ndarray:
    """以 float64 直接累加 (x - q)² 計算平方歐氏距離。"""
    diff = np.asarray(points, dtype=np.float64) - np.asarray(q, dtype=np.float64)
    return np.einsum("ij,ij->i", diff, diff)


def topk_by_distance(distances: np.ndarray, ids: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """依 (距離, id) 遞增取前 k 個；同距離以較小 id 優先。"""
    order = np.lexsort((ids, distances))[:k]
    return ids[order], distances[order]

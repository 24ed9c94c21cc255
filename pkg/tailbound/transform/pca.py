"""PCA warm start。"""

from __future__ import annotations

import numpy as np
from scipy import linalg

from tailbound.exceptions import InvalidParameterError
from tailbound.utils.helpers import as_matrix


def pca_basis(data) -> np.ndarray:
    """回傳 d×d 正交矩陣，各 row 為中心化共變異數的特徵向量，依特徵值遞減排列。

    中心化只用於估計基底；套用到向量時不減平均（保持純線性、保範數）。
    每個 row 的最大絕對值分量取正號，使結果可重現。
    """
    x = as_matrix(data, dtype=np.float64)
    n, d = x.shape
    if n < 2:
        raise InvalidParameterError(f"PCA 至少需要 2 個向量，收到 {n}")

    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    eigvals, eigvecs = linalg.eigh(cov)

    order = np.argsort(-eigvals, kind="stable")
    basis = eigvecs[:, order].T

    pivot = np.argmax(np.abs(basis), axis=1)
    signs = np.sign(basis[np.arange(d), pivot])
    signs[signs == 0] = 1.0
    return basis * signs[:, None]

"""能量壓縮 loss 與其對 skew 參數的解析梯度。

loss = (1/N) Σ_x (1/d) Σ_{ℓ=0}^{d−1} (R^{(ℓ)}/R^{(0)} − e^{−αℓ/d})²，
R^{(ℓ)} 為轉換後係數第 ℓ 維（含）之後的平方和。
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from scipy import linalg

from tailbound.exceptions import DimensionMismatchError, NoUsableVectorsError, NumericalBreakdownError
from tailbound.transform.cayley import SkewParams, cayley_map
from tailbound.utils.helpers import as_matrix

if TYPE_CHECKING:
    from tailbound.transform.model import TransformModel


def decay_target(d: int, alpha_target: float) -> np.ndarray:
    """e^{−αℓ/d}，ℓ = 0..d−1。"""
    return np.exp(-alpha_target * np.arange(d, dtype=np.float64) / d)


def usable_rows(data) -> np.ndarray:
    """去除零向量（R^{(0)} = 0 無法正規化）。"""
    x = as_matrix(data, dtype=np.float64)
    keep = np.einsum("ij,ij->i", x, x) > 0.0
    if not np.any(keep):
        raise NoUsableVectorsError("no usable vectors: 資料全為零向量")
    return x[keep]


def loss_and_gradient(
    skew: SkewParams,
    gamma: float,
    warm_start: np.ndarray,
    x: np.ndarray,
    alpha_target: float,
    with_gradient: bool = True,
) -> tuple[float, np.ndarray | None]:
    """對已去除零向量的 x 計算 loss 與（選擇性）梯度。

    W = T(A)·T′，y = W x。梯度沿 y → W → T → A 反向傳遞：
    dL/dA = c · P⁻ᵀ · G_T · (I + T)ᵀ，其中 P = I − cA、c = γ/2。
    """
    n, d = x.shape
    if d != skew.dim:
        raise DimensionMismatchError(f"資料維度 {d} 與轉換維度 {skew.dim} 不一致")

    t = cayley_map(skew, gamma)
    w = t @ warm_start
    y = x @ w.T

    sq = np.square(y)
    tails = np.cumsum(sq[:, ::-1], axis=1)[:, ::-1]
    r0 = tails[:, :1]
    ratios = tails / r0
    resid = ratios - decay_target(d, alpha_target)
    loss = float(np.sum(np.square(resid)) / (n * d))
    if not with_gradient:
        return loss, None

    g_ratio = 2.0 * resid / (n * d)
    g_sq = np.cumsum(g_ratio, axis=1) / r0 - np.sum(g_ratio * tails, axis=1, keepdims=True) / np.square(r0)
    g_y = 2.0 * y * g_sq
    g_w = g_y.T @ x
    g_t = g_w @ warm_start.T

    c = 0.5 * gamma
    eye = np.eye(d)
    try:
        left = linalg.solve((eye - c * skew.to_matrix()).T, g_t)
    except (linalg.LinAlgError, ValueError) as e:
        raise NumericalBreakdownError(f"梯度求解失敗: {e}") from e
    g_a = c * left @ (eye + t).T

    iu = np.triu_indices(d, 1)
    return loss, g_a[iu] - g_a.T[iu]


def compaction_loss(model: TransformModel, data, alpha_target: float) -> float:
    """以模型的 float64 運算子計算 loss（零向量略過）。"""
    x = usable_rows(data)
    loss, _ = loss_and_gradient(
        model.skew, model.gamma, model.warm_start, x, alpha_target, with_gradient=False
    )
    return loss


def loss_gradient(model: TransformModel, data, alpha_target: float) -> np.ndarray:
    """compaction_loss 對 SkewParams.upper 的梯度。"""
    x = usable_rows(data)
    _, grad = loss_and_gradient(model.skew, model.gamma, model.warm_start, x, alpha_target)
    return grad

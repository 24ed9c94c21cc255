"""Cayley 參數化：skew-symmetric A ↦ 正交矩陣 T(A)。"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from tailbound.exceptions import DimensionMismatchError, InvalidParameterError, NumericalBreakdownError


def n_skew_params(d: int) -> int:
    """d×d skew-symmetric 矩陣的自由參數數量 d(d−1)/2。"""
    return d * (d - 1) // 2


@dataclass(frozen=True, eq=False)
class SkewParams:
    """A 的嚴格上三角係數（row-major，與 np.triu_indices(d, 1) 同序）。"""

    dim: int
    upper: np.ndarray

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InvalidParameterError(f"維度必須 >= 1，收到 {self.dim}")
        upper = np.asarray(self.upper, dtype=np.float64).ravel()
        if upper.shape[0] != n_skew_params(self.dim):
            raise DimensionMismatchError(
                f"d={self.dim} 需要 {n_skew_params(self.dim)} 個 skew 參數，收到 {upper.shape[0]}"
            )
        object.__setattr__(self, "upper", upper)

    @classmethod
    def zeros(cls, d: int) -> "SkewParams":
        return cls(dim=d, upper=np.zeros(n_skew_params(d)))

    @classmethod
    def from_matrix(cls, a: np.ndarray) -> "SkewParams":
        """取上三角；輸入先反對稱化，吸收捨入造成的微小不對稱。"""
        a = np.asarray(a, dtype=np.float64)
        d = a.shape[0]
        skew = 0.5 * (a - a.T)
        return cls(dim=d, upper=skew[np.triu_indices(d, 1)])

    def to_matrix(self) -> np.ndarray:
        """重建 A：A = U − Uᵀ，對角線精確為 0。"""
        u = np.zeros((self.dim, self.dim), dtype=np.float64)
        u[np.triu_indices(self.dim, 1)] = self.upper
        return u - u.T


def cayley_map(skew: SkewParams, gamma: float) -> np.ndarray:
    """T = (I − (γ/2)A)⁻¹ (I + (γ/2)A)，以 float64 求解。"""
    if gamma <= 0:
        raise InvalidParameterError(f"gamma 必須 > 0，收到 {gamma}")
    c = 0.5 * gamma
    a = skew.to_matrix()
    eye = np.eye(skew.dim)
    try:
        t = linalg.solve(eye - c * a, eye + c * a)
    except (linalg.LinAlgError, ValueError) as e:
        raise NumericalBreakdownError(f"Cayley 求解失敗: {e}") from e
    if not np.all(np.isfinite(t)):
        raise NumericalBreakdownError("Cayley 映射產生非有限值")
    return t


def inverse_cayley(t: np.ndarray, gamma: float) -> SkewParams:
    """由正交矩陣反求 A = (2/γ)(T + I)⁻¹(T − I)。

    T 有特徵值 −1 時 (T + I) 不可逆，此時拋出 NumericalBreakdownError。
    """
    if gamma <= 0:
        raise InvalidParameterError(f"gamma 必須 > 0，收到 {gamma}")
    t = np.asarray(t, dtype=np.float64)
    eye = np.eye(t.shape[0])
    try:
        a = linalg.solve(t + eye, t - eye) * (2.0 / gamma)
    except (linalg.LinAlgError, ValueError) as e:
        raise NumericalBreakdownError(f"反 Cayley 求解失敗（T 含特徵值 -1）: {e}") from e
    if not np.all(np.isfinite(a)):
        raise NumericalBreakdownError("反 Cayley 映射產生非有限值")
    return SkewParams.from_matrix(a)

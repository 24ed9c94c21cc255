"""轉換後向量與各層尾部能量（tail energy）預計算。"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from tailbound.bounds.levels import LevelSpec
from tailbound.exceptions import DimensionMismatchError
from tailbound.utils.helpers import as_matrix

if TYPE_CHECKING:
    from tailbound.transform.model import TransformModel


@dataclass(frozen=True)
class TransformedVector:
    """T(x) 係數與各層尾部能量。

    tails[ℓ] = R^{(ℓ,d)} = Σ_{j ≥ m_ℓ} coeffs[j]²（0-indexed），tails[L] = 0。
    """

    coeffs: np.ndarray
    tails: np.ndarray

    @property
    def norm_sq(self) -> float:
        return float(self.tails[0])

    @property
    def dim(self) -> int:
        return int(self.coeffs.shape[0])


def _suffix_energy(coeffs: np.ndarray, levels: LevelSpec) -> np.ndarray:
    """對 (n, d) 係數做一次反向累加，取出每層門檻處的尾部能量 (n, L+1)。"""
    sq = np.square(coeffs, dtype=np.float64)
    n, d = sq.shape
    suffix = np.zeros((n, d + 1), dtype=np.float64)
    suffix[:, :d] = np.cumsum(sq[:, ::-1], axis=1)[:, ::-1]
    return suffix[:, list(levels.thresholds)]


def precompute_tails(coeffs, levels: LevelSpec) -> TransformedVector:
    """計算單一向量的 TransformedVector。"""
    arr = np.asarray(coeffs)
    if arr.ndim != 1 or arr.shape[0] != levels.d:
        raise DimensionMismatchError(
            f"係數長度 {arr.shape} 與 LevelSpec 維度 {levels.d} 不一致"
        )
    tails = _suffix_energy(arr.reshape(1, -1), levels)[0]
    return TransformedVector(coeffs=arr, tails=tails)


def transform_query(q, levels: LevelSpec, model: TransformModel | None = None) -> TransformedVector:
    """轉換查詢向量；查詢係數保留 float64。"""
    vec = np.asarray(q, dtype=np.float64).ravel()
    if model is not None:
        vec = model.apply(vec)
    return precompute_tails(vec, levels)


@dataclass(frozen=True)
class TransformedDataset:
    """轉換後資料集：float32 係數 (N, d) 與 float64 尾部能量表 (N, L+1)。"""

    coeffs: np.ndarray
    tails: np.ndarray
    levels: LevelSpec
    ids: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.coeffs.ndim != 2 or self.coeffs.shape[1] != self.levels.d:
            raise DimensionMismatchError(
                f"資料維度 {self.coeffs.shape} 與 LevelSpec 維度 {self.levels.d} 不一致"
            )
        if self.tails.shape != (self.coeffs.shape[0], self.levels.n_levels + 1):
            raise DimensionMismatchError(f"尾部能量表 shape 錯誤: {self.tails.shape}")
        if self.ids is None:
            object.__setattr__(self, "ids", np.arange(self.coeffs.shape[0], dtype=np.int64))

    @classmethod
    def from_vectors(
        cls, data, levels: LevelSpec, model: TransformModel | None = None
    ) -> "TransformedDataset":
        """套用轉換（None 表示 identity）後以 32-bit 儲存並預計算尾部能量。"""
        x = as_matrix(data, dtype=np.float64)
        if x.shape[1] != levels.d:
            raise DimensionMismatchError(f"資料維度 {x.shape[1]} 與 LevelSpec 維度 {levels.d} 不一致")
        if model is not None:
            x = model.apply(x)
        coeffs = np.ascontiguousarray(x, dtype=np.float32)
        return cls(coeffs=coeffs, tails=_suffix_energy(coeffs, levels), levels=levels)

    @classmethod
    def from_coeffs(cls, coeffs: np.ndarray, levels: LevelSpec) -> "TransformedDataset":
        """由已轉換的 float32 係數重建（用於載入索引檔）。"""
        coeffs = np.ascontiguousarray(coeffs, dtype=np.float32)
        return cls(coeffs=coeffs, tails=_suffix_energy(coeffs, levels), levels=levels)

    def __len__(self) -> int:
        return int(self.coeffs.shape[0])

    @property
    def dim(self) -> int:
        return self.levels.d

    def vector(self, i: int) -> TransformedVector:
        return TransformedVector(coeffs=self.coeffs[i], tails=self.tails[i])

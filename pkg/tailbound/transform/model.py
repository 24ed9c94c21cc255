"""TransformModel：學習得到的正交運算子 T(A)·T′ 與 PNRM1 檔案格式。"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from tailbound.config.constants import DEFAULT_GAMMA, ORTHOGONALITY_TOL, TRANSFORM_MAGIC
from tailbound.exceptions import (
    DimensionMismatchError,
    IndexFormatError,
    NumericalBreakdownError,
)
from tailbound.logging_config import get_logger
from tailbound.transform.cayley import SkewParams, cayley_map, inverse_cayley

logger = get_logger("transform.model")


def orthogonality_error(matrix: np.ndarray) -> float:
    """max |MᵀM − I|，以 float64 計算。"""
    m = np.asarray(matrix, dtype=np.float64)
    return float(np.max(np.abs(m.T @ m - np.eye(m.shape[0]))))


@dataclass(frozen=True, eq=False)
class TransformModel:
    """正交轉換模型。

    matrix 為發布用的 float32 矩陣（= T(A)·T′ 捨入後），建立時重新檢查正交性。
    apply() 使用發布矩陣，operator() 為訓練用的 float64 精確運算子。
    """

    dim: int
    gamma: float
    skew: SkewParams
    warm_start: np.ndarray
    matrix: np.ndarray
    seed: int = 0

    def __post_init__(self) -> None:
        d = self.dim
        if self.skew.dim != d or self.warm_start.shape != (d, d) or self.matrix.shape != (d, d):
            raise DimensionMismatchError(f"TransformModel 各元件維度需為 {d}")
        object.__setattr__(self, "warm_start", np.asarray(self.warm_start, dtype=np.float64))
        object.__setattr__(self, "matrix", np.ascontiguousarray(self.matrix, dtype=np.float32))
        err = orthogonality_error(self.matrix)
        if err > ORTHOGONALITY_TOL:
            raise NumericalBreakdownError(f"轉換矩陣正交性誤差 {err:.2e} 超過容差 {ORTHOGONALITY_TOL}")

    @classmethod
    def compose(
        cls,
        skew: SkewParams,
        gamma: float = DEFAULT_GAMMA,
        warm_start: np.ndarray | None = None,
        seed: int = 0,
    ) -> "TransformModel":
        """由 skew 參數與 warm start 組合並發布為 float32。"""
        d = skew.dim
        warm = np.eye(d) if warm_start is None else np.asarray(warm_start, dtype=np.float64)
        op = cayley_map(skew, gamma) @ warm
        return cls(dim=d, gamma=gamma, skew=skew, warm_start=warm, matrix=op.astype(np.float32), seed=seed)

    @classmethod
    def identity(cls, d: int) -> "TransformModel":
        return cls.compose(SkewParams.zeros(d))

    @cached_property
    def _published(self) -> np.ndarray:
        return self.matrix.astype(np.float64)

    def operator(self) -> np.ndarray:
        """float64 的 T(A)·T′。"""
        return cayley_map(self.skew, self.gamma) @ self.warm_start

    def apply(self, x) -> np.ndarray:
        """轉換單一向量 (d,) 或矩陣 (n, d)；結果為 float64。"""
        arr = np.asarray(x, dtype=np.float64)
        if arr.shape[-1] != self.dim:
            raise DimensionMismatchError(f"向量維度 {arr.shape[-1]} 與模型維度 {self.dim} 不一致")
        return arr @ self._published.T

    def orthogonality_error(self) -> float:
        return orthogonality_error(self.matrix)

    # ------------------------------------------------------------------
    # PNRM1：magic | u32 d | f32 gamma | d×d f32 矩陣 | d×d f32 warm start | u64 seed
    # ------------------------------------------------------------------

    def to_bytes(self) -> bytes:
        return b"".join([
            TRANSFORM_MAGIC,
            np.array([self.dim], dtype="<u4").tobytes(),
            np.array([self.gamma], dtype="<f4").tobytes(),
            self.matrix.astype("<f4").tobytes(order="C"),
            self.warm_start.astype("<f4").tobytes(order="C"),
            np.array([self.seed], dtype="<u8").tobytes(),
        ])

    @classmethod
    def from_bytes(cls, buf: bytes, offset: int = 0) -> tuple["TransformModel", int]:
        """從 buf[offset:] 解析一個模型，回傳 (模型, 下一個 offset)。"""
        end = offset + len(TRANSFORM_MAGIC)
        if buf[offset:end] != TRANSFORM_MAGIC:
            raise IndexFormatError(f"轉換檔 magic 錯誤: {bytes(buf[offset:end])!r}")
        if len(buf) < end + 8:
            raise IndexFormatError("轉換檔 header 截斷")
        d = int(np.frombuffer(buf, dtype="<u4", count=1, offset=end)[0])
        gamma = float(np.frombuffer(buf, dtype="<f4", count=1, offset=end + 4)[0])
        pos = end + 8
        need = pos + 2 * d * d * 4 + 8
        if d < 1 or len(buf) < need:
            raise IndexFormatError(f"轉換檔內容截斷或維度無效 (d={d})")

        matrix = np.frombuffer(buf, dtype="<f4", count=d * d, offset=pos).reshape(d, d).astype(np.float32)
        pos += d * d * 4
        warm = np.frombuffer(buf, dtype="<f4", count=d * d, offset=pos).reshape(d, d).astype(np.float64)
        pos += d * d * 4
        seed = int(np.frombuffer(buf, dtype="<u8", count=1, offset=pos)[0])
        pos += 8

        for name, m in (("matrix", matrix), ("warm_start", warm)):
            err = orthogonality_error(m)
            if err > ORTHOGONALITY_TOL:
                raise IndexFormatError(f"轉換檔 {name} 正交性誤差 {err:.2e} 超過容差")

        try:
            skew = inverse_cayley(matrix.astype(np.float64) @ warm.T, gamma)
        except NumericalBreakdownError:
            # 旋轉含 −1 特徵值時無法反求 A，改把整個矩陣視為 warm start
            logger.warning("無法由轉換檔反求 skew 參數，以 A=0 載入")
            skew, warm = SkewParams.zeros(d), matrix.astype(np.float64)

        model = cls(dim=d, gamma=gamma, skew=skew, warm_start=warm, matrix=matrix, seed=seed)
        return model, pos

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())
        logger.info("轉換模型已儲存: %s (d=%d)", path, self.dim)

    @classmethod
    def load(cls, path: str | Path) -> "TransformModel":
        buf = Path(path).read_bytes()
        model, end = cls.from_bytes(buf)
        if end != len(buf):
            raise IndexFormatError(f"轉換檔尾端有多餘的 {len(buf) - end} bytes")
        return model

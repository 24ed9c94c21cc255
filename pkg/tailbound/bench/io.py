"""fvecs / ivecs / bvecs 讀寫。

每筆紀錄：little-endian int32 維度 d，接著 d 個 payload 元素（f32 / i32 / u8）。
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from tailbound.config.constants import VECTOR_DTYPES, VectorFormat
from tailbound.exceptions import VectorFormatError
from tailbound.logging_config import get_logger

logger = get_logger("bench.io")


def infer_format(path: str | Path) -> VectorFormat:
    suffix = Path(path).suffix.lower().lstrip(".")
    try:
        return VectorFormat(suffix)
    except ValueError as e:
        raise VectorFormatError(f"無法由副檔名判斷向量格式: {path}") from e


def _locate_error(raw: np.ndarray, d: int, itemsize: int) -> str:
    """逐筆走訪以區分「維度不一致」與「紀錄截斷」。"""
    pos = 0
    record = 0
    while pos < raw.size:
        if pos + 4 > raw.size:
            return f"truncated record #{record}: 只剩 {raw.size - pos} bytes 的 header"
        dim = int(raw[pos:pos + 4].view("<i4")[0])
        if dim != d:
            return f"inconsistent dimensionality: 紀錄 #{record} 的 d={dim}，第一筆為 d={d}"
        end = pos + 4 + dim * itemsize
        if end > raw.size:
            return f"truncated record #{record}: 需要 {end - pos} bytes，只剩 {raw.size - pos}"
        pos = end
        record += 1
    return "未知的格式錯誤"


def read_vectors(path: str | Path, fmt: VectorFormat | str | None = None) -> np.ndarray:
    """讀取整個向量檔為 (N, d) 矩陣；空檔回傳 0 筆。"""
    fmt = VectorFormat(fmt) if fmt is not None else infer_format(path)
    dtype = np.dtype(VECTOR_DTYPES[fmt])
    raw = np.fromfile(path, dtype=np.uint8)
    if raw.size == 0:
        return np.empty((0, 0), dtype=dtype)
    if raw.size < 4:
        raise VectorFormatError(f"truncated record #0: {path} 只有 {raw.size} bytes")

    d = int(raw[:4].view("<i4")[0])
    if d <= 0:
        raise VectorFormatError(f"向量維度必須 > 0，收到 d={d} ({path})")
    record = 4 + d * dtype.itemsize
    if raw.size % record != 0:
        raise VectorFormatError(f"{path}: {_locate_error(raw, d, dtype.itemsize)}")

    rows = raw.reshape(-1, record)
    dims = np.ascontiguousarray(rows[:, :4]).view("<i4").ravel()
    if np.any(dims != d):
        raise VectorFormatError(f"{path}: {_locate_error(raw, d, dtype.itemsize)}")
    data = np.ascontiguousarray(rows[:, 4:]).view(dtype)
    logger.debug("讀取 %s: N=%d d=%d (%s)", path, data.shape[0], d, fmt.value)
    return data


def write_vectors(path: str | Path, array, fmt: VectorFormat | str | None = None) -> None:
    """寫出 (N, d) 矩陣；ivecs / bvecs 的值必須能無損轉為目標型別。"""
    fmt = VectorFormat(fmt) if fmt is not None else infer_format(path)
    dtype = np.dtype(VECTOR_DTYPES[fmt])
    arr = np.asarray(array)
    if arr.ndim != 2:
        raise VectorFormatError(f"需要 2D 矩陣，收到 shape={arr.shape}")
    n, d = arr.shape
    if n == 0:
        Path(path).write_bytes(b"")
        return
    if d <= 0:
        raise VectorFormatError("向量維度必須 > 0")

    payload = arr.astype(dtype)
    if fmt != VectorFormat.FVECS and not np.array_equal(payload, arr):
        raise VectorFormatError(f"資料無法無損寫為 {fmt.value}（超出 {dtype} 範圍或含非整數）")

    out = np.empty((n, 4 + d * dtype.itemsize), dtype=np.uint8)
    out[:, :4] = np.array([d], dtype="<i4").view(np.uint8)
    out[:, 4:] = np.ascontiguousarray(payload).view(np.uint8).reshape(n, -1)
    out.tofile(path)
    logger.debug("寫出 %s: N=%d d=%d (%s)", path, n, d, fmt.value)

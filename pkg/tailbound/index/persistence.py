"""索引單檔格式 PFLT1 / PIVF1 / PHNW1（little-endian）。

共同 header：
    magic(5) | u32 版本 | u8 有無轉換模型 | [PNRM1 模型] |
    u32 d | u32 L | (L+1)×u32 門檻 | u8 引擎模式 | u32 批次大小 | f64 剪枝 slack |
    u64 N | N×d f32 轉換後係數 | N×i64 ids
之後依索引類型附加：
    PIVF1：u64 seed | u32 n_list | n_list×d f64 centroids | N×i64 assignments
    PHNW1：u64 seed | u32 M | u32 ef_construction | i64 entry | u32 層數 |
           每層 u64 節點數 | 節點 i64 | 度數 u32 | 鄰居 i64（攤平）
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from tailbound.bounds.levels import LevelSpec
from tailbound.bounds.tails import TransformedDataset
from tailbound.config.constants import (
    FLAT_MAGIC,
    HNSW_MAGIC,
    INDEX_FORMAT_VERSION,
    IVF_MAGIC,
    EngineVariant,
)
from tailbound.config.settings import EngineConfig
from tailbound.exceptions import ConfigError, IndexFormatError
from tailbound.index.base import BaseIndex
from tailbound.index.flat import FlatIndex
from tailbound.index.hnsw import HnswIndex
from tailbound.index.ivf import IVFFlatIndex
from tailbound.logging_config import get_logger
from tailbound.transform.model import TransformModel

logger = get_logger("index.persistence")

_VARIANTS = list(EngineVariant)
_MAGICS = {FlatIndex: FLAT_MAGIC, IVFFlatIndex: IVF_MAGIC, HnswIndex: HNSW_MAGIC}


class _Writer:
    def __init__(self) -> None:
        self.parts: list[bytes] = []

    def raw(self, data: bytes) -> None:
        self.parts.append(data)

    def scalar(self, value, dtype: str) -> None:
        self.parts.append(np.array([value], dtype=dtype).tobytes())

    def array(self, values, dtype: str) -> None:
        self.parts.append(np.ascontiguousarray(values, dtype=dtype).tobytes(order="C"))

    def getvalue(self) -> bytes:
        return b"".join(self.parts)


class _Reader:
    def __init__(self, buf: bytes, offset: int = 0) -> None:
        self.buf = buf
        self.pos = offset

    def array(self, dtype: str, count: int) -> np.ndarray:
        size = np.dtype(dtype).itemsize * count
        if count < 0 or self.pos + size > len(self.buf):
            raise IndexFormatError(f"索引檔截斷：offset {self.pos} 需要 {size} bytes")
        out = np.frombuffer(self.buf, dtype=dtype, count=count, offset=self.pos).copy()
        self.pos += size
        return out

    def scalar(self, dtype: str):
        return self.array(dtype, 1)[0].item()


def _write_header(w: _Writer, magic: bytes, index: BaseIndex) -> None:
    w.raw(magic)
    w.scalar(INDEX_FORMAT_VERSION, "<u4")
    w.scalar(1 if index.model is not None else 0, "u1")
    if index.model is not None:
        w.raw(index.model.to_bytes())
    levels = index.levels
    w.scalar(levels.d, "<u4")
    w.scalar(levels.n_levels, "<u4")
    w.array(levels.thresholds, "<u4")
    w.scalar(_VARIANTS.index(index.engine.variant), "u1")
    w.scalar(index.engine.batch_size, "<u4")
    w.scalar(index.engine.prune_slack, "<f8")
    w.scalar(len(index.dataset), "<u8")
    w.array(index.dataset.coeffs, "<f4")
    w.array(index.dataset.ids, "<i8")


def _read_header(r: _Reader) -> tuple[TransformedDataset, TransformModel | None, EngineConfig]:
    version = r.scalar("<u4")
    if version != INDEX_FORMAT_VERSION:
        raise IndexFormatError(f"不支援的索引格式版本 {version}（目前為 {INDEX_FORMAT_VERSION}）")
    model = None
    if r.scalar("u1"):
        model, r.pos = TransformModel.from_bytes(r.buf, r.pos)

    d = r.scalar("<u4")
    n_levels = r.scalar("<u4")
    try:
        levels = LevelSpec(tuple(int(t) for t in r.array("<u4", n_levels + 1)))
        variant_code = r.scalar("u1")
        if variant_code >= len(_VARIANTS):
            raise IndexFormatError(f"未知的引擎模式代碼 {variant_code}")
        engine = EngineConfig(
            variant=_VARIANTS[variant_code],
            batch_size=r.scalar("<u4"),
            prune_slack=r.scalar("<f8"),
        )
    except ConfigError as e:
        raise IndexFormatError(f"索引檔參數無效: {e}") from e
    if levels.d != d:
        raise IndexFormatError(f"LevelSpec 維度 {levels.d} 與 header 維度 {d} 不一致")

    n = r.scalar("<u8")
    coeffs = r.array("<f4", n * d).reshape(n, d)
    ids = r.array("<i8", n)
    dataset = TransformedDataset(
        coeffs=coeffs.astype(np.float32),
        tails=TransformedDataset.from_coeffs(coeffs, levels).tails,
        levels=levels,
        ids=ids.astype(np.int64),
    )
    return dataset, model, engine


def _write_hnsw(w: _Writer, index: HnswIndex) -> None:
    w.scalar(index.seed, "<u8")
    w.scalar(index.m, "<u4")
    w.scalar(index.ef_construction, "<u4")
    w.scalar(index.entry_point, "<i8")
    w.scalar(len(index.layers), "<u4")
    for layer in index.layers:
        nodes = sorted(layer)
        w.scalar(len(nodes), "<u8")
        w.array(nodes, "<i8")
        w.array([len(layer[n]) for n in nodes], "<u4")
        w.array([u for n in nodes for u in layer[n]], "<i8")


def _read_hnsw(r: _Reader, dataset, model, engine) -> HnswIndex:
    seed = r.scalar("<u8")
    m = r.scalar("<u4")
    ef_construction = r.scalar("<u4")
    entry = r.scalar("<i8")
    layers = []
    for _ in range(r.scalar("<u4")):
        count = r.scalar("<u8")
        nodes = r.array("<i8", count)
        degrees = r.array("<u4", count)
        flat = r.array("<i8", int(degrees.sum()))
        bounds = np.concatenate([[0], np.cumsum(degrees, dtype=np.int64)])
        layers.append({
            int(node): [int(u) for u in flat[bounds[j]:bounds[j + 1]]]
            for j, node in enumerate(nodes)
        })
    n = len(dataset)
    if not 0 <= entry < n:
        raise IndexFormatError(f"HNSW 入口點 {entry} 超出節點範圍 [0, {n})")
    for layer in layers:
        for node, adj in layer.items():
            if not 0 <= node < n or any(not 0 <= u < n for u in adj):
                raise IndexFormatError("HNSW 邊的端點超出節點範圍")
    return HnswIndex(dataset, layers, entry, m, ef_construction, seed, model, engine)


def save_index(index: BaseIndex, path: str | Path) -> None:
    """寫出索引（含 LevelSpec、轉換模型、參數與 payload）。"""
    magic = _MAGICS.get(type(index))
    if magic is None:
        raise IndexFormatError(f"不支援儲存的索引類型: {type(index).__name__}")
    w = _Writer()
    _write_header(w, magic, index)
    if isinstance(index, IVFFlatIndex):
        w.scalar(index.seed, "<u8")
        w.scalar(index.n_list, "<u4")
        w.array(index.centroids, "<f8")
        w.array(index.assignments, "<i8")
    elif isinstance(index, HnswIndex):
        _write_hnsw(w, index)
    Path(path).write_bytes(w.getvalue())
    logger.info("索引已儲存: %s (%s, N=%d)", path, index.kind.value, len(index))


def load_index(path: str | Path) -> BaseIndex:
    """依 magic 讀取 PFLT1 / PIVF1 / PHNW1 索引檔。"""
    buf = Path(path).read_bytes()
    magic = buf[:len(FLAT_MAGIC)]
    r = _Reader(buf, len(magic))
    if magic not in (FLAT_MAGIC, IVF_MAGIC, HNSW_MAGIC):
        raise IndexFormatError(f"未知的索引檔 magic: {magic!r}")

    dataset, model, engine = _read_header(r)
    if magic == FLAT_MAGIC:
        index: BaseIndex = FlatIndex(dataset, model, engine)
    elif magic == IVF_MAGIC:
        seed = r.scalar("<u8")
        n_list = r.scalar("<u4")
        centroids = r.array("<f8", n_list * dataset.dim).reshape(n_list, dataset.dim)
        assignments = r.array("<i8", len(dataset))
        if np.any((assignments < 0) | (assignments >= n_list)):
            raise IndexFormatError("IVF 分群編號超出範圍")
        index = IVFFlatIndex(dataset, centroids, assignments, model, engine, seed)
    else:
        index = _read_hnsw(r, dataset, model, engine)

    if r.pos != len(buf):
        raise IndexFormatError(f"索引檔尾端有多餘的 {len(buf) - r.pos} bytes")
    logger.info("索引已載入: %s (%s, N=%d)", path, index.kind.value, len(index))
    return index

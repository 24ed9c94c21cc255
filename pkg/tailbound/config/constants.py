"""常數定義。"""

from enum import Enum


class EngineVariant(str, Enum):
    """refinement 執行模式。"""
    POINT_CENTRIC = "point_centric"   # B=1，逐點精算後才更新 heap
    BATCH_NOUB = "batch_noub"         # 批次 level-major，每批結束才更新 heap
    BATCH_UB = "batch_ub"             # 批次 level-major，UB 一旦低於 d_k 立刻入 heap


class SearchMode(str, Enum):
    """索引搜尋模式。"""
    BASELINE = "baseline"             # 全維度距離
    PROGRESSIVE = "progressive"       # 逐層界限剪枝


class IndexKind(str, Enum):
    FLAT = "flat"
    IVF = "ivf"
    HNSW = "hnsw"


class VectorFormat(str, Enum):
    """ANN benchmark 向量容器格式。"""
    FVECS = "fvecs"   # float32
    IVECS = "ivecs"   # int32
    BVECS = "bvecs"   # uint8


# 每種格式的 payload dtype（little-endian）
VECTOR_DTYPES: dict[VectorFormat, str] = {
    VectorFormat.FVECS: "<f4",
    VectorFormat.IVECS: "<i4",
    VectorFormat.BVECS: "u1",
}

# 檔案 magic
TRANSFORM_MAGIC = b"PNRM1"
FLAT_MAGIC = b"PFLT1"
IVF_MAGIC = b"PIVF1"
HNSW_MAGIC = b"PHNW1"

# 索引檔案內部格式版本（magic 之後）
INDEX_FORMAT_VERSION = 1

# 預設值
DEFAULT_MAX_LEVELS = 32
DEFAULT_BATCH_SIZE = 256
DEFAULT_PRUNE_SLACK = 1e-6
DEFAULT_GAMMA = 1.0
DEFAULT_ALPHA_TARGET = 8.0
DEFAULT_P_VALUES: tuple[float, ...] = (0.1, 0.25, 0.5)
KMEANS_ITERATIONS = 25
KMEANS_REPAIR_ROUNDS = 3

# 正交性容差
ORTHOGONALITY_TOL = 1e-4

"""tailbound 自訂例外。"""


class TailboundError(Exception):
    """tailbound 通用錯誤。"""


class ConfigError(TailboundError, ValueError):
    """配置值違反約束。"""


class InvalidParameterError(TailboundError, ValueError):
    """函數參數超出允許範圍。"""


class DimensionMismatchError(TailboundError, ValueError):
    """向量維度與 LevelSpec / 模型維度不一致。"""


class LevelSkipError(TailboundError):
    """refine_step 跳過了某一層。"""


class NumericalBreakdownError(TailboundError):
    """線性求解失敗或正交性超出容差（數值崩潰）。"""


class NoUsableVectorsError(TailboundError, ValueError):
    """資料集中沒有非零向量可用於計算 loss。"""


class DatasetTooSmallError(TailboundError, ValueError):
    """資料量不足以切出訓練 / 驗證集。"""


class TrainingDivergedError(TailboundError):
    """訓練中出現非有限 loss（學習率發散）。"""


class VectorFormatError(TailboundError):
    """fvecs / ivecs / bvecs 檔案格式錯誤。"""


class IndexFormatError(TailboundError):
    """索引或轉換檔案格式錯誤（magic、版本、正交性檢查）。"""


class EmptyIndexError(TailboundError):
    """索引為空，無法搜尋。"""


class EmptyCandidateSetError(TailboundError, ValueError):
    """候選集合為空。"""
